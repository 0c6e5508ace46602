#include "bvi/estimators.hpp"

#include <cmath>
#include <vector>

namespace bvi {

namespace {

MCEstimate finish(std::vector<double>& vals, int n_requested, int dropped,
                  const char* what) {
  if (dropped * 100 > n_requested)
    throw SupportMismatchError(
        std::string(what) + ": " + std::to_string(dropped) + " of " +
        std::to_string(n_requested) +
        " samples had non-finite integrand (support mismatch)");
  const int kept = static_cast<int>(vals.size());
  if (kept < 2)
    throw SupportMismatchError(std::string(what) +
                               ": fewer than 2 finite samples");
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= kept;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (kept - 1));
  return MCEstimate{mean, sd / std::sqrt(static_cast<double>(kept)), kept,
                    dropped};
}

}  // namespace

double gamma_blend(const Mixture& q_prev, const GaussianComponent& h,
                   double alpha, const TargetDensity& target, const Vec& x) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("gamma_blend: alpha outside [0,1]");
  if (!all_finite(x))
    throw std::invalid_argument("gamma_blend: non-finite point");
  double log_blend;
  if (alpha == 0.0)
    log_blend = q_prev.log_pdf(x);
  else if (alpha == 1.0)
    log_blend = h.log_pdf(x);
  else
    log_blend = log_add(std::log1p(-alpha) + q_prev.log_pdf(x),
                        std::log(alpha) + h.log_pdf(x));
  return log_blend - target.log_f(x);
}

MCEstimate elbo_estimate(const Mixture& q, const TargetDensity& target, int n,
                         std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("elbo_estimate: n must be >= 2");
  check_dim(target.dim, q.dim(), "elbo_estimate");
  std::mt19937_64 rng(mix_seed(seed, 0));
  std::vector<double> vals;
  vals.reserve(n);
  int dropped = 0;
  for (int i = 0; i < n; ++i) {
    const Vec x = q.sample(rng);
    const double v = target.log_f(x) - q.log_pdf(x);
    if (std::isfinite(v))
      vals.push_back(v);
    else
      ++dropped;
  }
  return finish(vals, n, dropped, "elbo_estimate");
}

MCEstimate alpha_gradient_estimate(const Mixture& q_prev,
                                   const GaussianComponent& h, double alpha,
                                   const TargetDensity& target, int n,
                                   std::uint64_t seed) {
  if (n < 2)
    throw std::invalid_argument("alpha_gradient_estimate: n must be >= 2");
  check_dim(target.dim, q_prev.dim(), "alpha_gradient_estimate");
  check_dim(target.dim, h.dim(), "alpha_gradient_estimate");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha_gradient_estimate: alpha outside [0,1]");
  std::mt19937_64 rng_h(mix_seed(seed, 1));
  std::mt19937_64 rng_q(mix_seed(seed, 2));
  std::vector<double> vals;
  vals.reserve(n);
  int dropped = 0;
  for (int i = 0; i < n; ++i) {
    const Vec xh = h.sample(rng_h);
    const Vec xq = q_prev.sample(rng_q);
    const double v = gamma_blend(q_prev, h, alpha, target, xh) -
                     gamma_blend(q_prev, h, alpha, target, xq);
    if (std::isfinite(v))
      vals.push_back(v);
    else
      ++dropped;
  }
  return finish(vals, n, dropped, "alpha_gradient_estimate");
}

}  // namespace bvi

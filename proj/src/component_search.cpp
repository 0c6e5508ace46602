#include "bvi/component_search.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "bvi/finite_diff.hpp"
#include "bvi/lbfgs.hpp"

namespace bvi {

void SearchConfig::validate() const {
  if (!(lambda > 0.0))
    throw std::invalid_argument("SearchConfig: lambda must be positive");
  if (!(stab_a > 0.0))
    throw std::invalid_argument("SearchConfig: stab_a must be positive");
  if (!(fd_rel_step > 0.0))
    throw std::invalid_argument("SearchConfig: fd_rel_step must be positive");
  if (restarts < 1)
    throw std::invalid_argument("SearchConfig: restarts must be >= 1");
  if (max_evals < 10)
    throw std::invalid_argument("SearchConfig: max_evals must be >= 10");
}

double stabilized_log_residual(const Mixture& q_prev, const TargetDensity& target,
                               const SearchConfig& cfg, const Vec& x) {
  const double log_a = std::log(cfg.stab_a);
  return log_add(target.log_f(x), log_a) - log_add(q_prev.log_pdf(x), log_a);
}

namespace {

// d/dx logsumexp(u(x), c) = sigmoid(u - c) * u'(x)
double floor_weight(double log_val, double log_a) {
  if (log_val == kNegInf) return 0.0;
  const double t = log_val - log_a;
  if (t > 40.0) return 1.0;
  if (t < -40.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-t));
}

}  // namespace

LaplacePeak find_peak(const Mixture& q_prev, const TargetDensity& target,
                      const SearchConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  check_dim(target.dim, q_prev.dim(), "find_peak");
  const double log_a = std::log(cfg.stab_a);

  auto residual = [&](const Vec& x) {
    return log_add(target.log_f(x), log_a) - log_add(q_prev.log_pdf(x), log_a);
  };

  bool found = false;
  Vec best_x;
  double best_val = kNegInf;
  bool best_conv = false;

  for (int r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    Vec x0;
    bool ok = false;
    for (int attempt = 0; attempt < 20; ++attempt) {
      x0 = q_prev.sample(rng);
      if (std::isfinite(residual(x0))) {
        ok = true;
        break;
      }
    }
    if (!ok)
      throw std::runtime_error(
          "find_peak: objective non-finite at 20 initial draws");

    EvalCounter budget{0, cfg.max_evals};
    auto objective = [&](const Vec& x) {
      ++budget.count;
      return -residual(x);
    };
    GradFn gradient;
    if (target.grad_log_f) {
      gradient = [&](const Vec& x) -> Vec {
        ++budget.count;
        const double lf = target.log_f(x);
        const double lq = q_prev.log_pdf(x);
        Vec g = Vec::Zero(x.size());
        const double wf = floor_weight(lf, log_a);
        if (wf > 0.0) g -= wf * target.grad_log_f(x);
        const double wq = floor_weight(lq, log_a);
        if (wq > 0.0) g += wq * q_prev.grad_log_pdf(x);
        return g;
      };
    } else {
      gradient = [&](const Vec& x) {
        return fd_gradient(objective, x, cfg.fd_rel_step);
      };
    }

    LbfgsOptions opts;
    opts.grad_tol = cfg.grad_tol;
    LbfgsResult run = lbfgs_minimize(objective, gradient, x0, opts, budget);
    const double val = -run.value;
    if (!found || val > best_val) {
      found = true;
      best_x = run.x;
      best_val = val;
      best_conv = run.converged;
    }
  }

  LaplacePeak peak;
  peak.location = best_x;
  peak.value = best_val;
  peak.optimizer_converged = best_conv;
  auto neg_residual = [&](const Vec& x) { return -residual(x); };
  peak.hessian = fd_hessian(neg_residual, best_x, cfg.fd_rel_step,
                            cfg.hessian_mode == HessianMode::diagonal);
  return peak;
}

ComponentResult build_component(const LaplacePeak& peak, const SearchConfig& cfg) {
  cfg.validate();
  if (!all_finite(peak.location))
    throw std::invalid_argument("build_component: non-finite peak location");
  const Eigen::Index d = peak.location.size();
  Mat h = (peak.hessian + peak.hessian.transpose()) / 2.0;
  if (!h.allFinite())
    throw std::invalid_argument("build_component: non-finite Hessian");

  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("build_component: eigendecomposition failed");
  const Vec evals = es.eigenvalues();
  const double max_eval = evals[d - 1];
  if (!(max_eval > 0.0))
    throw DegenerateHessianError(
        "build_component: residual has no positive curvature (all Hessian "
        "eigenvalues <= 0)");

  const double tau = std::max(1e-6, 1e-6 * max_eval);
  bool repaired = false;
  Vec inv_scaled(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double v = evals[i];
    if (v < tau) {
      v = tau;
      repaired = true;
    }
    inv_scaled[i] = (cfg.lambda / 2.0) / v;
  }
  Mat sigma = es.eigenvectors() * inv_scaled.asDiagonal() *
              es.eigenvectors().transpose();
  return ComponentResult{GaussianComponent(peak.location, sigma), repaired};
}

}  // namespace bvi

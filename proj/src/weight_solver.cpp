#include "bvi/weight_solver.hpp"

#include <algorithm>
#include <cmath>

namespace bvi {

void SgdConfig::validate() const {
  if (n < 2) throw std::invalid_argument("SgdConfig: n must be >= 2");
  if (!(b > 0.0)) throw std::invalid_argument("SgdConfig: b must be positive");
  if (!(eps > 0.0))
    throw std::invalid_argument("SgdConfig: eps must be positive");
  if (max_iters < 1)
    throw std::invalid_argument("SgdConfig: max_iters must be >= 1");
}

SgdResult sgd_projected(const AlphaGradFn& grad_fn, const SgdConfig& cfg) {
  cfg.validate();
  SgdResult res;
  double alpha = 0.0;
  for (int k = 1; k <= cfg.max_iters; ++k) {
    const double g = grad_fn(alpha, mix_seed(cfg.seed, static_cast<std::uint64_t>(k)));
    const double next = std::clamp(alpha - (cfg.b / k) * g, 0.0, 1.0);
    res.trace.push_back({k, next, g});
    res.iters = k;
    const double delta = std::abs(next - alpha);
    alpha = next;
    if (delta < cfg.eps) {
      res.converged = true;
      break;
    }
  }
  res.alpha = alpha;
  return res;
}

SgdResult solve_alpha(const Mixture& q_prev, const GaussianComponent& h,
                      const TargetDensity& target, const SgdConfig& cfg) {
  return sgd_projected(
      [&](double alpha, std::uint64_t iter_seed) {
        return alpha_gradient_estimate(q_prev, h, alpha, target, cfg.n,
                                       iter_seed)
            .value;
      },
      cfg);
}

}  // namespace bvi

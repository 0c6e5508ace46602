#pragma once

#include <cstdint>

#include "bvi/mixture.hpp"
#include "bvi/target.hpp"

namespace bvi {

enum class HessianMode { dense, diagonal };

struct SearchConfig {
  double lambda = 1.0;               // covariance scale: Sigma = (lambda/2) H^-1
  double stab_a = 4.5399929762484854e-5;  // tail floor, exp(-10)
  double fd_rel_step = 1e-4;         // FD step 1e-4 * (1 + |theta_i|)
  HessianMode hessian_mode = HessianMode::dense;
  int restarts = 3;
  int max_evals = 10000;             // objective evaluations per restart
  double grad_tol = 1e-5;

  void validate() const;
};

struct LaplacePeak {
  Vec location;      // eta
  Mat hessian;       // H of the negated stabilized log-residual at eta
  double value;      // stabilized log-residual at eta
  bool optimizer_converged = false;
};

struct ComponentResult {
  GaussianComponent component;
  bool repaired = false;  // Hessian needed eigenvalue flooring
};

/// logsumexp(log f(x), log a) - logsumexp(log q_prev(x), log a): the
/// log-residual with both densities floored at a, which pins the value to 0
/// deep in the tails so the peak search stays bounded.
double stabilized_log_residual(const Mixture& q_prev, const TargetDensity& target,
                               const SearchConfig& cfg, const Vec& x);

/// Quasi-Newton ascent on the stabilized log-residual from a draw of q_prev,
/// repeated for cfg.restarts restarts (best kept by residual value, earlier
/// restart winning ties); the Hessian at the winner comes from central finite
/// differences.  Gradients are finite-difference unless the target supplies
/// grad_log_f.
LaplacePeak find_peak(const Mixture& q_prev, const TargetDensity& target,
                      const SearchConfig& cfg, std::uint64_t seed);

/// Laplace-style component: mean at the peak, Sigma = (lambda/2) H^-1.
/// Indefinite H is repaired by flooring eigenvalues at
/// tau = max(1e-6, 1e-6 * lambda_max); H with no positive eigenvalue raises
/// DegenerateHessianError.
ComponentResult build_component(const LaplacePeak& peak, const SearchConfig& cfg);

}  // namespace bvi

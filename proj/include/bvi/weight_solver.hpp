#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bvi/estimators.hpp"

namespace bvi {

struct SgdConfig {
  int n = 100;             // MC sample size per iteration
  double b = 0.1;          // initial step size; iteration k uses b/k
  double eps = 1e-4;       // stop when |alpha_k - alpha_{k-1}| < eps
  int max_iters = 10000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SgdTraceRow {
  int k;
  double alpha;  // iterate after the k-th update
  double grad;   // gradient estimate used for the k-th update
};

struct SgdResult {
  double alpha = 0.0;
  int iters = 0;
  bool converged = false;  // false: max_iters hit before |delta| < eps
  std::vector<SgdTraceRow> trace;
};

/// Gradient oracle for one SGD iteration: current alpha plus a per-iteration
/// seed derived from (cfg.seed, k), so fresh Monte Carlo draws appear every
/// step and the whole path is reproducible.
using AlphaGradFn = std::function<double(double alpha, std::uint64_t iter_seed)>;

/// Projected SGD on [0,1] from alpha = 0 with Robbins-Monro steps b/k.
SgdResult sgd_projected(const AlphaGradFn& grad_fn, const SgdConfig& cfg);

/// Binds the Monte Carlo alpha-gradient estimator into sgd_projected.
/// Estimator aborts (support mismatch) propagate to the caller.
SgdResult solve_alpha(const Mixture& q_prev, const GaussianComponent& h,
                      const TargetDensity& target, const SgdConfig& cfg);

}  // namespace bvi

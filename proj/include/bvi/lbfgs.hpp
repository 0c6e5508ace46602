#pragma once

#include <functional>

#include "bvi/common.hpp"

namespace bvi {

using GradFn = std::function<Vec(const Vec&)>;

/// Shared evaluation budget.  Callers wrap the objective so every call,
/// including those made inside finite-difference gradients, counts against
/// the same limit.
struct EvalCounter {
  int count = 0;
  int limit = 10000;
  bool exhausted() const { return count >= limit; }
};

struct LbfgsOptions {
  int memory = 8;
  double grad_tol = 1e-5;  // stop when the gradient 2-norm drops below this
  int max_iters = 1000;
  double armijo_c1 = 1e-4;
  double min_step = 1e-16;
};

struct LbfgsResult {
  Vec x;
  double value;
  Vec grad;
  int iters = 0;
  bool converged = false;  // grad norm reached grad_tol
};

/// Two-loop-recursion L-BFGS with backtracking Armijo line search.  Stops on
/// gradient tolerance, iteration cap, exhausted eval budget, or a failed line
/// search; `converged` reports only the first of these.
LbfgsResult lbfgs_minimize(const std::function<double(const Vec&)>& f,
                           const GradFn& grad, Vec x0,
                           const LbfgsOptions& opts, EvalCounter& budget);

}  // namespace bvi

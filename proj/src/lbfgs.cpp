#include "bvi/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace bvi {

LbfgsResult lbfgs_minimize(const std::function<double(const Vec&)>& f,
                           const GradFn& grad, Vec x0,
                           const LbfgsOptions& opts, EvalCounter& budget) {
  LbfgsResult res;
  res.x = std::move(x0);
  res.value = f(res.x);
  res.grad = grad(res.x);

  struct Pair {
    Vec s, y;
    double rho;
  };
  std::deque<Pair> hist;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    res.iters = iter;
    if (res.grad.norm() < opts.grad_tol) {
      res.converged = true;
      return res;
    }
    if (budget.exhausted()) return res;

    // Two-loop recursion. H0 = gamma*I with gamma from the newest pair.
    Vec dir = -res.grad;
    std::vector<double> alpha(hist.size());
    for (std::size_t i = hist.size(); i-- > 0;) {
      alpha[i] = hist[i].rho * hist[i].s.dot(dir);
      dir -= alpha[i] * hist[i].y;
    }
    if (!hist.empty()) {
      const Pair& last = hist.back();
      dir *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t i = 0; i < hist.size(); ++i) {
      const double beta = hist[i].rho * hist[i].y.dot(dir);
      dir += (alpha[i] - beta) * hist[i].s;
    }

    double slope = res.grad.dot(dir);
    if (!(slope < 0.0)) {  // not a descent direction; fall back to steepest
      dir = -res.grad;
      slope = -res.grad.squaredNorm();
    }

    double step = hist.empty() ? std::min(1.0, 1.0 / std::max(1.0, res.grad.norm()))
                               : 1.0;
    double f_new = kPosInf;
    Vec x_new;
    bool accepted = false;
    while (step >= opts.min_step && !budget.exhausted()) {
      x_new = res.x + step * dir;
      f_new = f(x_new);
      if (std::isfinite(f_new) &&
          f_new <= res.value + opts.armijo_c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return res;  // line search failed or budget gone

    const Vec g_new = grad(x_new);
    const Vec s = x_new - res.x;
    const Vec y = g_new - res.grad;
    const double ys = y.dot(s);
    if (ys > 1e-10 * y.norm() * s.norm()) {
      hist.push_back({s, y, 1.0 / ys});
      if (static_cast<int>(hist.size()) > opts.memory) hist.pop_front();
    }
    res.x = std::move(x_new);
    res.value = f_new;
    res.grad = g_new;
  }
  res.converged = res.grad.norm() < opts.grad_tol;
  return res;
}

}  // namespace bvi

#include "bvi/finite_diff.hpp"

#include <cmath>

namespace bvi {

Vec fd_steps(const Vec& x, double rel_step) {
  if (!(rel_step > 0.0))
    throw std::invalid_argument("fd_steps: rel_step must be positive");
  return rel_step * (1.0 + x.cwiseAbs().array()).matrix();
}

Vec fd_gradient(const ScalarFn& f, const Vec& x, double rel_step) {
  const Vec h = fd_steps(x, rel_step);
  Vec g(x.size());
  Vec p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h[i];
    const double fp = f(p);
    p[i] = x[i] - h[i];
    const double fm = f(p);
    p[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h[i]);
  }
  return g;
}

Mat fd_hessian(const ScalarFn& f, const Vec& x, double rel_step, bool diagonal) {
  const Vec h = fd_steps(x, rel_step);
  const Eigen::Index d = x.size();
  Mat out = Mat::Zero(d, d);
  const double f0 = f(x);
  Vec p = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    p[i] = x[i] + h[i];
    const double fp = f(p);
    p[i] = x[i] - h[i];
    const double fm = f(p);
    p[i] = x[i];
    out(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  if (diagonal) return out;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      p[i] = x[i] + h[i];
      p[j] = x[j] + h[j];
      const double fpp = f(p);
      p[j] = x[j] - h[j];
      const double fpm = f(p);
      p[i] = x[i] - h[i];
      const double fmm = f(p);
      p[j] = x[j] + h[j];
      const double fmp = f(p);
      p[i] = x[i];
      p[j] = x[j];
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace bvi

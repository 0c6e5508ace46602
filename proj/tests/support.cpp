#include "support.hpp"

#include <algorithm>
#include <cmath>

namespace testsup {

double simpson(const std::function<double(double)>& f, double lo, double hi,
               int n) {
  if (n % 2 != 0) ++n;
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double simpson2(const std::function<double(double, double)>& f, double xlo,
                double xhi, double ylo, double yhi, int nx, int ny) {
  auto inner = [&](double x) {
    return simpson([&](double y) { return f(x, y); }, ylo, yhi, ny);
  };
  return simpson(inner, xlo, xhi, nx);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_logpdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * M_PI * var) - 0.5 * d * d / var;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    ks = std::max(ks, std::abs(F - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(F - static_cast<double>(i + 1) / n));
  }
  return ks;
}

Mat random_spd(int d, double eig_lo, double eig_hi, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  std::uniform_real_distribution<double> unif(eig_lo, eig_hi);
  Vec eigs(d);
  for (int i = 0; i < d; ++i) eigs(i) = unif(rng);
  return q * eigs.asDiagonal() * q.transpose();
}

double blend_discrepancy(const std::function<double(double)>& log_q,
                         const std::function<double(double)>& log_h,
                         const std::function<double(double)>& log_f,
                         double alpha, double lo, double hi, int n) {
  auto integrand = [&](double x) {
    const double lq = log_q(x), lh = log_h(x);
    double lm;
    if (alpha <= 0.0)
      lm = lq;
    else if (alpha >= 1.0)
      lm = lh;
    else
      lm = bvi::log_add(std::log1p(-alpha) + lq, std::log(alpha) + lh);
    if (lm == bvi::kNegInf) return 0.0;
    return std::exp(lm) * (lm - log_f(x));
  };
  return simpson(integrand, lo, hi, n);
}

}  // namespace testsup

#pragma once

#include <functional>
#include <random>
#include <vector>

#include "bvi/common.hpp"

// Shared oracle helpers for the test suite.  These deliberately avoid the
// library's own quadrature so checks against them are independent.
namespace testsup {

using bvi::Mat;
using bvi::Vec;

// Composite Simpson on [lo, hi]; n is rounded up to the next even count.
double simpson(const std::function<double(double)>& f, double lo, double hi,
               int n);

// Tensor-product Simpson on [xlo, xhi] x [ylo, yhi].
double simpson2(const std::function<double(double, double)>& f, double xlo,
                double xhi, double ylo, double yhi, int nx, int ny);

// Golden-section minimizer for a unimodal scalar function.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol);

double std_normal_cdf(double x);
double normal_logpdf(double x, double mean, double var);

// Kolmogorov-Smirnov statistic of a sample against a CDF.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Random symmetric positive definite matrix with eigenvalues uniform in
// [eig_lo, eig_hi], conjugated by a random orthogonal matrix.
Mat random_spd(int d, double eig_lo, double eig_hi, std::mt19937_64& rng);

// Blend discrepancy integral(m_a * (log m_a - log f)) by Simpson, with
// m_a = (1-alpha) exp(log_q) + alpha exp(log_h); densities given in log form.
double blend_discrepancy(const std::function<double(double)>& log_q,
                         const std::function<double(double)>& log_h,
                         const std::function<double(double)>& log_f,
                         double alpha, double lo, double hi, int n);

}  // namespace testsup

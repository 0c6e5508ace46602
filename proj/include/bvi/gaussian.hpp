#pragma once

#include <random>

#include "bvi/common.hpp"

namespace bvi {

/// Multivariate normal with dense SPD covariance.  The Cholesky factor is
/// computed once at construction; all density math goes through it, the
/// covariance matrix itself is kept verbatim so serialization round-trips
/// byte for byte.
class GaussianComponent {
 public:
  GaussianComponent(Vec mean, Mat cov);

  int dim() const { return static_cast<int>(mean_.size()); }
  const Vec& mean() const { return mean_; }
  const Mat& cov() const { return cov_; }
  const Mat& chol_lower() const { return chol_lower_; }
  double log_det_cov() const { return log_det_cov_; }

  double log_pdf(const Vec& x) const;
  Vec grad_log_pdf(const Vec& x) const;
  Vec sample(std::mt19937_64& rng) const;

 private:
  Vec mean_;
  Mat cov_;
  Mat chol_lower_;       // L with L L^T = cov
  double log_det_cov_;   // 2 * sum log diag(L)
  double log_norm_;      // -d/2 log(2 pi) - 1/2 log|cov|
};

/// Standard normal vector of length d.
Vec standard_normal(int d, std::mt19937_64& rng);

}  // namespace bvi

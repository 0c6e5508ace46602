#include "bvi/gaussian.hpp"

#include <Eigen/Cholesky>

namespace bvi {

namespace {
constexpr double kHalfLog2Pi = 0.9189385332046727;  // log(2 pi) / 2
}

GaussianComponent::GaussianComponent(Vec mean, Mat cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  const auto d = mean_.size();
  if (d == 0) throw std::invalid_argument("GaussianComponent: empty mean");
  if (!cov_.allFinite() || !mean_.allFinite())
    throw std::invalid_argument("GaussianComponent: non-finite parameters");
  if (cov_.rows() != d || cov_.cols() != d)
    throw DimensionMismatchError("GaussianComponent: covariance shape " +
                                 std::to_string(cov_.rows()) + "x" +
                                 std::to_string(cov_.cols()) +
                                 " does not match mean length " +
                                 std::to_string(d));
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw std::invalid_argument("GaussianComponent: covariance not symmetric");
  cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();

  // Factorization with jitter repair: bump the diagonal by delta*I, doubling
  // at most 10 times, before giving up on a marginally indefinite input.
  Eigen::LLT<Mat> llt(cov_);
  if (llt.info() != Eigen::Success) {
    double delta = 1e-9 * cov_.trace() / static_cast<double>(d);
    bool fixed = false;
    if (delta > 0.0) {
      for (int attempt = 0; attempt < 10; ++attempt, delta *= 2.0) {
        Mat repaired = cov_ + delta * Mat::Identity(d, d);
        llt.compute(repaired);
        if (llt.info() == Eigen::Success) {
          cov_ = std::move(repaired);
          fixed = true;
          break;
        }
      }
    }
    if (!fixed)
      throw std::invalid_argument(
          "GaussianComponent: covariance not positive definite");
  }
  chol_lower_ = llt.matrixL();
  log_det_cov_ = 2.0 * chol_lower_.diagonal().array().log().sum();
  log_norm_ = -static_cast<double>(d) * kHalfLog2Pi - 0.5 * log_det_cov_;
}

double GaussianComponent::log_pdf(const Vec& x) const {
  check_dim(dim(), x.size(), "GaussianComponent::log_pdf");
  const Vec z = chol_lower_.triangularView<Eigen::Lower>().solve(x - mean_);
  return log_norm_ - 0.5 * z.squaredNorm();
}

Vec GaussianComponent::grad_log_pdf(const Vec& x) const {
  check_dim(dim(), x.size(), "GaussianComponent::grad_log_pdf");
  const Vec z = chol_lower_.triangularView<Eigen::Lower>().solve(x - mean_);
  return -chol_lower_.transpose().triangularView<Eigen::Upper>().solve(z);
}

Vec GaussianComponent::sample(std::mt19937_64& rng) const {
  return mean_ + chol_lower_ * standard_normal(dim(), rng);
}

Vec standard_normal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Vec z(d);
  for (int i = 0; i < d; ++i) z[i] = n01(rng);
  return z;
}

}  // namespace bvi

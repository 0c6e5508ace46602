#pragma once

#include <random>
#include <vector>

#include "bvi/gaussian.hpp"

namespace bvi {

/// Finite Gaussian mixture.  Weights are nonnegative and renormalized to sum
/// to one at every mutation, so the density always integrates to one.
class Mixture {
 public:
  Mixture(std::vector<double> weights, std::vector<GaussianComponent> components);

  /// Single-component mixture, the usual boosting start state.
  explicit Mixture(GaussianComponent init);

  int dim() const { return components_.front().dim(); }
  int size() const { return static_cast<int>(components_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<GaussianComponent>& components() const { return components_; }

  double log_pdf(const Vec& x) const;
  Vec grad_log_pdf(const Vec& x) const;
  Vec sample(std::mt19937_64& rng) const;

  /// Exact first and second moments: mean = sum_i w_i mu_i,
  /// cov = sum_i w_i (Sigma_i + mu_i mu_i^T) - mean mean^T.
  Vec mean() const;
  Mat covariance() const;

  /// Returns the convex blend (1-alpha)*this + alpha*extra.
  Mixture blended_with(const GaussianComponent& extra, double alpha) const;

  /// Drops components whose weight falls below `threshold` and renormalizes.
  /// The heaviest component is always kept.
  void prune(double threshold);

 private:
  void validate_and_normalize();

  std::vector<double> weights_;
  std::vector<GaussianComponent> components_;
};

}  // namespace bvi

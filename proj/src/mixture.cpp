#include "bvi/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bvi {

Mixture::Mixture(std::vector<double> weights,
                 std::vector<GaussianComponent> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (components_.empty())
    throw std::invalid_argument("Mixture: needs at least one component");
  if (weights_.size() != components_.size())
    throw DimensionMismatchError("Mixture: " + std::to_string(weights_.size()) +
                                 " weights for " +
                                 std::to_string(components_.size()) +
                                 " components");
  const int d = components_.front().dim();
  for (const auto& c : components_)
    check_dim(d, c.dim(), "Mixture: component dimension");
  validate_and_normalize();
}

Mixture::Mixture(GaussianComponent init)
    : weights_{1.0} {
  components_.push_back(std::move(init));
}

void Mixture::validate_and_normalize() {
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0))
      throw std::invalid_argument("Mixture: negative or NaN weight");
    total += w;
  }
  if (!(total > 0.0))
    throw std::invalid_argument("Mixture: weights sum to zero");
  // Leave weights untouched when they already sum to 1 within the invariant
  // tolerance, so serialized mixtures reload bit for bit.
  if (std::abs(total - 1.0) > 1e-12)
    for (double& w : weights_) w /= total;
}

double Mixture::log_pdf(const Vec& x) const {
  check_dim(dim(), x.size(), "Mixture::log_pdf");
  std::vector<double> terms;
  terms.reserve(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    terms.push_back(std::log(weights_[i]) + components_[i].log_pdf(x));
  }
  return log_sum_exp(terms);
}

Vec Mixture::grad_log_pdf(const Vec& x) const {
  check_dim(dim(), x.size(), "Mixture::grad_log_pdf");
  std::vector<double> terms(components_.size(), kNegInf);
  for (std::size_t i = 0; i < components_.size(); ++i)
    if (weights_[i] > 0.0)
      terms[i] = std::log(weights_[i]) + components_[i].log_pdf(x);
  const double total = log_sum_exp(terms);
  Vec g = Vec::Zero(dim());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    g += std::exp(terms[i] - total) * components_[i].grad_log_pdf(x);
  }
  return g;
}

Vec Mixture::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u = u01(rng);
  double cum = 0.0;
  std::size_t pick = components_.size() - 1;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    cum += weights_[i];
    if (u < cum) {
      pick = i;
      break;
    }
  }
  return components_[pick].sample(rng);
}

Vec Mixture::mean() const {
  Vec m = Vec::Zero(dim());
  for (std::size_t i = 0; i < components_.size(); ++i)
    m += weights_[i] * components_[i].mean();
  return m;
}

Mat Mixture::covariance() const {
  const Vec m = mean();
  Mat s = Mat::Zero(dim(), dim());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const Vec& mu = components_[i].mean();
    s += weights_[i] * (components_[i].cov() + mu * mu.transpose());
  }
  return s - m * m.transpose();
}

Mixture Mixture::blended_with(const GaussianComponent& extra, double alpha) const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("Mixture::blended_with: alpha outside [0,1]");
  check_dim(dim(), extra.dim(), "Mixture::blended_with");
  std::vector<double> w;
  w.reserve(weights_.size() + 1);
  for (double wi : weights_) w.push_back((1.0 - alpha) * wi);
  w.push_back(alpha);
  std::vector<GaussianComponent> comps = components_;
  comps.push_back(extra);
  return Mixture(std::move(w), std::move(comps));
}

void Mixture::prune(double threshold) {
  const std::size_t heaviest = static_cast<std::size_t>(
      std::max_element(weights_.begin(), weights_.end()) - weights_.begin());
  std::vector<double> w;
  std::vector<GaussianComponent> comps;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] >= threshold || i == heaviest) {
      w.push_back(weights_[i]);
      comps.push_back(std::move(components_[i]));
    }
  }
  weights_ = std::move(w);
  components_ = std::move(comps);
  validate_and_normalize();
}

}  // namespace bvi

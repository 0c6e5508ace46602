#pragma once

#include <cstdint>

#include "bvi/mixture.hpp"
#include "bvi/target.hpp"

namespace bvi {

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int n = 0;          // samples actually averaged
  int n_dropped = 0;  // non-finite integrand samples excluded
};

/// Integrand of the discrepancy derivative:
/// log((1-alpha) q_prev(x) + alpha h(x)) - log f(x), evaluated in log space.
/// Returns +inf where f vanishes but the blend does not.
double gamma_blend(const Mixture& q_prev, const GaussianComponent& h,
                   double alpha, const TargetDensity& target, const Vec& x);

/// Monte Carlo ELBO: mean of log f - log q over n draws from q.  The
/// discrepancy estimate is the negation.  Non-finite integrand values are
/// dropped and counted; more than 1% of n aborts with SupportMismatchError.
MCEstimate elbo_estimate(const Mixture& q, const TargetDensity& target, int n,
                         std::uint64_t seed);

/// Monte Carlo derivative of the discrepancy in alpha:
/// mean over i of gamma(x_i^h) - gamma(x_i^q), with the h and q sample
/// streams drawn from distinct sub-seeds of `seed`.
MCEstimate alpha_gradient_estimate(const Mixture& q_prev,
                                   const GaussianComponent& h, double alpha,
                                   const TargetDensity& target, int n,
                                   std::uint64_t seed);

}  // namespace bvi

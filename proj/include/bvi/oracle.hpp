#pragma once

#include <cstdint>
#include <vector>

#include "bvi/mixture.hpp"
#include "bvi/target.hpp"

namespace bvi {

struct ReferencePosterior {
  std::string source;  // "quadrature-grid" or "mh-samples"
  Vec mean;
  Mat covariance;
  double log_normalizer = std::numeric_limits<double>::quiet_NaN();
  std::vector<Vec> samples;  // mh only
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
  double ess_proxy = std::numeric_limits<double>::quiet_NaN();
};

/// Trapezoid normalization and moments on a uniform grid over `box`
/// (dim x 2, rows are (lo, hi)); d <= 2 only.  Errors when more than 1e-4 of
/// the mass sits on the boundary nodes, which means the box is too small.
ReferencePosterior quadrature_reference(const TargetDensity& target,
                                        const Mat& box, int grid_points);

/// Same on explicit sorted 1D nodes, for targets needing non-uniform grids.
ReferencePosterior quadrature_reference_1d(const TargetDensity& target,
                                           const Vec& nodes);

/// KL(q || f/Z) by trapezoid quadrature of q * (log q - log f) plus log Z.
/// Z comes from the target's known normalizer if present, otherwise from
/// quadrature of f on the same grid.
double quadrature_kl(const Mixture& q, const TargetDensity& target,
                     const Mat& box, int grid_points);

/// Discrepancy D(alpha) = KL((1-alpha) q + alpha h || f/Z) on a 1D grid;
/// shared by convexity and weight-solver oracle checks.
double quadrature_blend_discrepancy(const Mixture& q_prev,
                                    const GaussianComponent& h, double alpha,
                                    const TargetDensity& target,
                                    const Mat& box, int grid_points);

/// Random-walk Metropolis with a joint Gaussian proposal.  Per-coordinate
/// step scales shrink or grow toward 0.25 acceptance during burn-in and are
/// frozen afterwards.  Errors if post-burn-in acceptance leaves [0.05, 0.6].
ReferencePosterior mh_reference(const TargetDensity& target, int n_samples,
                                Vec step_scales, int burn_in,
                                std::uint64_t seed, const Vec& start);

/// l1 relative error of the mixture mean against the reference mean.
double rem(const Mixture& q, const ReferencePosterior& ref);

/// Closed-form KL(a || b) between Gaussians, via Cholesky solves.
double gaussian_kl(const GaussianComponent& a, const GaussianComponent& b);

/// Batch-means Monte Carlo standard errors for a chain's mean and covariance
/// entries (n_batches contiguous batches).
struct ChainStats {
  Vec mean;
  Mat cov;
  Vec mean_se;
  Mat cov_se;
};
ChainStats chain_statistics(const std::vector<Vec>& samples, int n_batches);

}  // namespace bvi

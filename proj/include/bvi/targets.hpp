#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bvi/mixture.hpp"
#include "bvi/target.hpp"

namespace bvi {

/// Sensor-network localization model.  Sensors 0..2 are anchors with known
/// positions; the remaining num_sensors-3 positions are the unknowns, packed
/// as theta = (x_3, y_3, x_4, y_4, ...), so d = 2*(num_sensors-3).
struct SensorModel {
  int num_sensors = 0;    // N, anchors included
  double range = 0.3;     // R
  double noise_sd = 0.02; // sigma
  Mat anchors;            // 3 x 2
  Eigen::MatrixXi Z;      // N x N, symmetric 0/1, zero diagonal
  Mat Y;                  // N x N, distances where Z_ij = 1, zero elsewhere
  Mat box;                // 2 x 2, row k = (lo, hi) for coordinate k of each sensor

  void validate() const;
};

struct LogisticModel {
  Mat design;   // N x p, intercept column first
  Vec labels;   // entries in {-1, +1}
  double prior_scale = 1.0;

  void validate() const;
};

TargetDensity make_cauchy();
TargetDensity make_gmm(std::vector<double> weights, std::vector<Vec> means,
                       std::vector<Mat> covs);
TargetDensity make_banana(double curvature);
TargetDensity make_sensor(SensorModel model);
TargetDensity make_logistic(LogisticModel model);

/// CSV with a header row; one column holds binary labels (+-1, or 0/1 with 0
/// remapped to -1), the rest are predictors.  Empty label_column means the
/// first column.  An intercept column of ones is prepended to the design.
LogisticModel load_csv_dataset(const std::string& path,
                               const std::string& label_column = "");

/// Fixed benchmark instances: a four-mode 1D mixture and a five-component 2D
/// mixture with pseudo-random means and covariances (deterministic).
TargetDensity default_gmm1d();
TargetDensity default_gmm2d();
Mixture default_gmm1d_mixture();
Mixture default_gmm2d_mixture();

/// Draws sensor layouts uniformly in the unit square and simulates the link
/// and distance observations.  Advances seed until every unknown sensor has
/// at least min_links observed links (at most 1000 attempts), so the
/// generated instance is always localizable.  Returns the seed actually used.
std::uint64_t generate_sensor_model(int num_sensors, double range,
                                    double noise_sd, const Mat& box,
                                    std::uint64_t seed, int min_links,
                                    SensorModel& model, Mat& truth);

/// Synthetic stand-in for the nodal involvement study: binary predictors with
/// fixed marginal rates, labels from a logistic model with fixed
/// coefficients.  Returns rows of (label01, x1..x5) and the column names.
struct SyntheticLogisticData {
  std::vector<std::string> columns;  // label column first
  Mat rows;                          // n x 6, first column 0/1 labels
};
SyntheticLogisticData generate_logistic_data(int n, std::uint64_t seed);

}  // namespace bvi

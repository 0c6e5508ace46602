#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "bvi/boost_driver.hpp"
#include "bvi/oracle.hpp"
#include "bvi/targets.hpp"

namespace bvi::io {

using nlohmann::json;

// ---- primitives -----------------------------------------------------------

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j, const char* what);
json mat_to_json(const Mat& m);
Mat mat_from_json(const json& j, const char* what);

void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

std::uint64_t fnv1a(const std::string& s);
std::string hash_hex(std::uint64_t h);

// ---- domain types ---------------------------------------------------------

json mixture_to_json(const Mixture& q);
Mixture mixture_from_json(const json& j);

json trace_to_json(const BoostTrace& trace, const std::string& config_hash);
BoostTrace trace_from_json(const json& j);

struct Checkpoint {
  std::string config_hash;
  Mixture mixture;
  BoostTrace trace;
};
json checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const json& j);

json sensor_to_json(const SensorModel& m);
SensorModel sensor_from_json(const json& j);

// ---- experiment spec ------------------------------------------------------

struct OracleSpec {
  std::string kind = "none";  // none | quadrature | mh
  Mat box;                    // quadrature: dim x 2
  int grid_points = 2001;
  int mh_samples = 100000;
  int mh_burn_in = 20000;
  double mh_step = 0.25;
  std::uint64_t mh_seed = 20240901;
  Vec mh_start;  // empty: fall back to the run's init mean
};

struct ExperimentSpec {
  std::string selector;
  double banana_curvature = 0.1;
  std::string sensor_file;
  std::string csv_file;
  std::string label_column;
  double log_shift = 0.0;
  bool has_gmm_params = false;
  std::vector<double> gmm_weights;
  std::vector<Vec> gmm_means;
  std::vector<Mat> gmm_covs;
  RunConfig run;
  OracleSpec oracle;
  std::string output_dir = ".";
};

/// Parses and validates; missing fields take module defaults.  Throws
/// std::invalid_argument naming the offending field.
ExperimentSpec spec_from_json(const json& j);

/// Fully-defaulted canonical form of the algorithm-relevant part (target +
/// run); its FNV-1a hash keys checkpoints.
json spec_canonical_json(const ExperimentSpec& spec);
std::string spec_config_hash(const ExperimentSpec& spec);

/// Instantiates the spec's target, loading data files as needed and applying
/// the configured log-density shift.
TargetDensity build_target(const ExperimentSpec& spec);

/// Runs the spec's oracle (quadrature or MH) for cmd_eval.
ReferencePosterior build_reference(const ExperimentSpec& spec,
                                   const TargetDensity& target);

// ---- CSV outputs ----------------------------------------------------------

void write_samples_csv(const std::string& path, const std::vector<Vec>& rows);
void write_grid_csv(const std::string& path, const Mixture& q, const Mat& box,
                    int resolution);
void write_timings_csv(const std::string& path, const BoostTrace& trace);

}  // namespace bvi::io

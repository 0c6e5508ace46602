#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace bvi {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

struct DimensionMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when Monte Carlo estimation hits too many samples outside the
/// target's support (supp(q) not contained in supp(f)).
struct SupportMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when the residual has no positive curvature at its stationary
/// point; callers treat this as "no useful new component".
struct DegenerateHessianError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check_dim(int expected, Eigen::Index got, const char* where) {
  if (got != expected)
    throw DimensionMismatchError(std::string(where) + ": expected dimension " +
                                 std::to_string(expected) + ", got " +
                                 std::to_string(got));
}

/// log(exp(a) + exp(b)), stable for any mix of finite and -inf inputs.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

/// Stable log-sum-exp over a span of log values.
inline double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf || std::isinf(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// SplitMix64 finalizer; used to derive independent RNG streams from
// (master_seed, iteration, stage) tuples.
inline std::uint64_t split_mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return split_mix(split_mix(a) ^ (0x9e3779b97f4a7c15ull + b));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

inline bool all_finite(const Vec& x) {
  return x.allFinite();
}

}  // namespace bvi

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "bvi/common.hpp"

namespace bvi {

/// Evaluable unnormalized log-posterior log f on R^d.  log_f may return -inf
/// for zero-density regions; it must never return NaN for finite input.
/// grad_log_f is optional; numerical consumers fall back to central
/// differences when it is absent.
struct TargetDensity {
  int dim = 0;
  std::function<double(const Vec&)> log_f;
  std::optional<double> log_normalizer;
  std::function<Vec(const Vec&)> grad_log_f;
  std::string name;

  double operator()(const Vec& x) const { return log_f(x); }
};

/// Same target with log_f shifted by a constant.  The posterior is unchanged;
/// this rescales the unnormalized density into the range where the
/// tail-stabilization floor behaves sensibly.
TargetDensity with_log_shift(TargetDensity base, double shift);

}  // namespace bvi

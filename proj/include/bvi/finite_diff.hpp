#pragma once

#include <functional>

#include "bvi/common.hpp"

namespace bvi {

using ScalarFn = std::function<double(const Vec&)>;

/// Per-coordinate step h_i = rel_step * (1 + |x_i|).
Vec fd_steps(const Vec& x, double rel_step);

/// Central-difference gradient, 2d evaluations.
Vec fd_gradient(const ScalarFn& f, const Vec& x, double rel_step);

/// Central-difference Hessian.  Dense mode evaluates d(d+1)/2 stencils and
/// symmetrizes; diagonal mode evaluates d stencils and zeroes the rest.
Mat fd_hessian(const ScalarFn& f, const Vec& x, double rel_step, bool diagonal);

}  // namespace bvi

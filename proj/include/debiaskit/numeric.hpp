#pragma once

#include "debiaskit/embedding.hpp"

#include <span>

namespace debiaskit {

/// Correctly rounded sum (Shewchuk partials). The result does not depend on
/// the order of the inputs, and negating every input negates the result
/// exactly; the metrics rely on both properties.
double exact_sum(std::span<const double> values);
double exact_mean(std::span<const double> values);

/// Flip v so its largest-magnitude component is positive (lowest index wins ties).
void canonicalize_sign(Vector& v);

/// Column means of the rows.
Vector row_mean(const Matrix& rows);

struct PrincipalAxes {
  Matrix axes;              // k x d, unit rows, descending singular value
  Vector singular_values;   // length k
};

/// Top-k right singular vectors of `rows` (optionally mean-centered first),
/// each canonically signed. k is clamped to min(n, d).
PrincipalAxes principal_axes(const Matrix& rows, Index k, bool center);

/// Scale used for "is this numerically zero" decisions on a set of rows.
double row_scale(const Matrix& rows);

}  // namespace debiaskit

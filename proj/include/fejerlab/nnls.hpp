#pragma once

#include "fejerlab/matrix.hpp"
#include "fejerlab/vector.hpp"

namespace fejerlab {

/// Least squares over the nonnegative orthant: minimizes |g w - d| subject
/// to w >= 0 (Lawson-Hanson active set on the normal equations). Columns of
/// g are the cone generators; g w is then the projection of d on the cone.
[[nodiscard]] Vector nnls(const Matrix& g, const Vector& d);

/// Least squares over the probability simplex: minimizes |v w - x| subject
/// to w >= 0 and sum w == 1. Finite active-set method; v w is then the
/// projection of x on the convex hull of the columns of v.
[[nodiscard]] Vector simplex_weights_lsq(const Matrix& v, const Vector& x);

} // namespace fejerlab

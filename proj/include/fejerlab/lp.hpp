#pragma once

#include "fejerlab/matrix.hpp"
#include "fejerlab/vector.hpp"

namespace fejerlab {

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0; // objective at the optimum when status == Optimal
    Vector point;       // an optimal point when status == Optimal
};

/// Maximizes c.x over the polyhedron { x : a x <= b } with x free, by a
/// two-phase dense simplex (free variables split into differences of
/// nonnegatives, Bland's rule against cycling). Desk-scale sizes only.
[[nodiscard]] LpResult lp_maximize(const Matrix& a, const Vector& b,
                                   const Vector& c);

} // namespace fejerlab

#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "fejerlab/rng.hpp"
#include "fejerlab/vector.hpp"

namespace fejerlab {

/// Closed half-space { z : a.z <= b } with a nonzero normal.
struct Halfspace {
    Vector a;
    double b = 0.0;
};

struct Singleton {
    Vector c;
};

struct Ball {
    Vector c;
    double r = 0.0;
};

/// Axis box [lo, hi], componentwise lo <= hi.
struct Box {
    Vector lo;
    Vector hi;
};

struct Polyhedron {
    std::vector<Halfspace> rows;
};

/// Convex hull of finitely many points.
struct PointCloudHull {
    std::vector<Vector> vertices;
};

/// Validated closed convex set description. Construction rejects malformed
/// data (radius below zero, crossed box bounds, zero half-space normals,
/// mixed dimensions, empty vertex lists).
class ConvexSetSpec {
public:
    using Variant = std::variant<Singleton, Ball, Box, Polyhedron, PointCloudHull>;

    explicit ConvexSetSpec(Variant v);

    [[nodiscard]] const Variant& data() const { return v_; }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] const char* kind_name() const;

private:
    Variant v_;
    std::size_t dim_ = 0;
};

/// Supremum of d.z over the set: +infinity when the set is unbounded in
/// direction d, -infinity for an empty polyhedron. Positively homogeneous
/// in d.
[[nodiscard]] double support_function(const ConvexSetSpec& set, const Vector& d);

/// Nearest point of the set. Closed form for Singleton, Ball, Box, and a
/// one-row Polyhedron; alternating (Dykstra) projections for multi-row
/// polyhedra; active-set least squares over vertex weights for hulls.
[[nodiscard]] Vector project_point(const ConvexSetSpec& set, const Vector& x);

/// Linear-inequality description, defined for Box and Polyhedron only (the
/// sets whose normal cones the cone diagnostics work with). Empty optional
/// for other variants.
[[nodiscard]] std::optional<std::vector<Halfspace>> constraint_rows(
    const ConvexSetSpec& set);

/// Indices of rows active at zbar within active_tol. Throws ZbarNotInSet
/// when a row is violated by more than active_tol, and UnsupportedOperator
/// never: callers must check constraint_rows first.
[[nodiscard]] std::vector<std::size_t> active_rows(
    const std::vector<Halfspace>& rows, const Vector& zbar, double active_tol);

/// Deterministic member samples used for monotonicity certification. The
/// extent hint bounds the search region for unbounded polyhedra.
[[nodiscard]] std::vector<Vector> sample_points(const ConvexSetSpec& set,
                                                std::size_t count,
                                                SeededRng& rng,
                                                double extent_hint);

} // namespace fejerlab

#pragma once

#include <memory>
#include <variant>

#include "fejerlab/convex_set.hpp"
#include "fejerlab/matrix.hpp"
#include "fejerlab/vector.hpp"

namespace fejerlab {

/// Planar map (1/2) Id + (1/2) R_{2 theta}: the halfway average between a
/// point and its rotation by 2 theta. Contracts norms by |cos theta| and
/// turns by theta per step.
struct PlanarRotationAveraged {
    double theta = 0.0;
};

/// Resolvent (Id + A)^{-1} of a skew orthogonal matrix A, which collapses
/// to the closed form (1/2) Id - (1/2) A.
struct SkewResolvent {
    Matrix a;
};

/// Halfway average of the right shift on the first trunc coordinates.
/// Applying it to a vector whose last coordinate is nonzero would push
/// mass out of range and is a hard error.
struct RightShiftAveraged {
    std::size_t trunc = 0;
};

/// Resolvent (Id + M)^{-1} of a monotone matrix M, evaluated by a pivoted
/// direct solve.
struct LinearResolvent {
    Matrix m;
};

/// Nearest-point map of a closed convex set.
struct Projection {
    ConvexSetSpec set;
};

class OperatorSpec;

/// Krasnoselskii-Mann relaxation (1 - lambda) Id + lambda base with
/// 0 < lambda <= 1.
struct KMAveraged {
    std::shared_ptr<const OperatorSpec> base;
    double lambda = 1.0;
};

/// Validated operator description. Construction enforces the variant
/// invariants (skew orthogonality, sampled monotonicity, positive
/// truncation, lambda range) so that apply() can trust its input.
class OperatorSpec {
public:
    using Variant = std::variant<PlanarRotationAveraged, SkewResolvent,
                                 RightShiftAveraged, LinearResolvent,
                                 Projection, KMAveraged>;

    explicit OperatorSpec(Variant v);

    [[nodiscard]] const Variant& data() const { return v_; }
    [[nodiscard]] const char* kind_name() const;
    /// Dimension the operator acts on; 0 when any dimension works.
    [[nodiscard]] std::size_t expected_dim() const;

private:
    Variant v_;
};

/// One application of the operator. Dimension mismatches raise
/// DimensionMismatch; the truncated shift raises TruncationOverflow when
/// the last stored coordinate is nonzero.
[[nodiscard]] Vector apply(const OperatorSpec& op, const Vector& x);

/// Residual |solve(Id + A, x) - ((1/2) x - (1/2) A x)|: the solver route
/// against the closed form. Small for genuinely skew orthogonal A.
[[nodiscard]] double resolvent_formula_check(const SkewResolvent& op,
                                             const Vector& x);

/// |<T x, x - T x>| for the halfway-averaged isometry variants (planar
/// rotation, skew resolvent, truncated shift). The image is orthogonal to
/// the step for these maps. Other variants raise UnsupportedOperator.
[[nodiscard]] double orthogonality_defect(const OperatorSpec& op,
                                          const Vector& x);

} // namespace fejerlab

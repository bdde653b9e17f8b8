#include "fejerlab/operators.hpp"

#include <cmath>
#include <string>

#include "fejerlab/errors.hpp"
#include "fejerlab/rng.hpp"

namespace fejerlab {

namespace {

void require_dim(std::size_t want, const Vector& x, const char* what) {
    if (want != 0 && x.dim() != want) {
        throw DimensionMismatch(std::string(what) + " acts on dimension " +
                                std::to_string(want) + ", got " +
                                std::to_string(x.dim()));
    }
}

// Monotonicity is checked on a fixed deterministic sample: all basis
// vectors, their pairwise sums, and a batch of random directions. A
// sampled check can in principle miss a violation, so the resolvent solve
// keeps its own singularity guard.
void require_sampled_monotone(const Matrix& m) {
    const std::size_t n = m.rows();
    const auto check = [&](const Vector& x) {
        const double q = inner_product(m.apply(x), x);
        if (q < -1e-12 * x.norm_sq()) {
            throw InvalidOperator(
                "matrix fails the monotonicity sample: <Mx, x> = " +
                std::to_string(q));
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        check(Vector::basis(n, i));
        for (std::size_t j = i + 1; j < n; ++j) {
            check(Vector::basis(n, i) + Vector::basis(n, j));
            check(Vector::basis(n, i) - Vector::basis(n, j));
        }
    }
    SeededRng rng(0x9e3779b97f4a7c15ull);
    for (int k = 0; k < 64; ++k) check(rng.unit_sphere(n));
}

Vector apply_planar_rotation_averaged(double theta, const Vector& x) {
    // (1/2) x + (1/2) R_{2 theta} x
    const double c = std::cos(2.0 * theta);
    const double s = std::sin(2.0 * theta);
    return Vector{0.5 * x[0] + 0.5 * (c * x[0] - s * x[1]),
                  0.5 * x[1] + 0.5 * (s * x[0] + c * x[1])};
}

Vector apply_shift_averaged(std::size_t trunc, const Vector& x) {
    if (x[trunc - 1] != 0.0) {
        throw TruncationOverflow(
            "shifting would move mass past coordinate " +
            std::to_string(trunc) +
            "; enlarge the truncation or stop earlier");
    }
    std::vector<double> y(trunc, 0.0);
    y[0] = 0.5 * x[0];
    for (std::size_t k = 1; k < trunc; ++k) {
        y[k] = 0.5 * x[k] + 0.5 * x[k - 1];
    }
    return Vector(std::move(y));
}

} // namespace

OperatorSpec::OperatorSpec(Variant v) : v_(std::move(v)) {
    if (const auto* rot = std::get_if<PlanarRotationAveraged>(&v_)) {
        if (!std::isfinite(rot->theta)) {
            throw InvalidOperator("rotation angle must be finite");
        }
    } else if (const auto* skew = std::get_if<SkewResolvent>(&v_)) {
        if (skew->a.rows() == 0 || skew->a.rows() != skew->a.cols()) {
            throw InvalidOperator("skew matrix must be square and nonempty");
        }
        if (!is_skew_orthogonal(skew->a, 1e-12)) {
            throw InvalidOperator(
                "matrix is not skew orthogonal within 1e-12");
        }
    } else if (const auto* shift = std::get_if<RightShiftAveraged>(&v_)) {
        if (shift->trunc < 2) {
            throw InvalidOperator("shift truncation must be at least 2");
        }
    } else if (const auto* lin = std::get_if<LinearResolvent>(&v_)) {
        if (lin->m.rows() == 0 || lin->m.rows() != lin->m.cols()) {
            throw InvalidOperator("resolvent matrix must be square");
        }
        require_sampled_monotone(lin->m);
    } else if (const auto* km = std::get_if<KMAveraged>(&v_)) {
        if (!km->base) {
            throw InvalidOperator("averaged operator needs a base");
        }
        if (!(km->lambda > 0.0) || km->lambda > 1.0) {
            throw InvalidOperator("relaxation parameter must be in (0, 1]");
        }
    }
}

const char* OperatorSpec::kind_name() const {
    switch (v_.index()) {
        case 0: return "planar_rotation_averaged";
        case 1: return "skew_resolvent";
        case 2: return "right_shift_averaged";
        case 3: return "linear_resolvent";
        case 4: return "projection";
        default: return "km_averaged";
    }
}

std::size_t OperatorSpec::expected_dim() const {
    if (std::holds_alternative<PlanarRotationAveraged>(v_)) return 2;
    if (const auto* skew = std::get_if<SkewResolvent>(&v_)) {
        return skew->a.rows();
    }
    if (const auto* shift = std::get_if<RightShiftAveraged>(&v_)) {
        return shift->trunc;
    }
    if (const auto* lin = std::get_if<LinearResolvent>(&v_)) {
        return lin->m.rows();
    }
    if (const auto* proj = std::get_if<Projection>(&v_)) {
        return proj->set.dim();
    }
    return std::get<KMAveraged>(v_).base->expected_dim();
}

Vector apply(const OperatorSpec& op, const Vector& x) {
    require_dim(op.expected_dim(), x, op.kind_name());
    if (const auto* rot = std::get_if<PlanarRotationAveraged>(&op.data())) {
        return apply_planar_rotation_averaged(rot->theta, x);
    }
    if (const auto* skew = std::get_if<SkewResolvent>(&op.data())) {
        return 0.5 * x - 0.5 * skew->a.apply(x);
    }
    if (const auto* shift = std::get_if<RightShiftAveraged>(&op.data())) {
        return apply_shift_averaged(shift->trunc, x);
    }
    if (const auto* lin = std::get_if<LinearResolvent>(&op.data())) {
        const std::size_t n = lin->m.rows();
        Matrix sys(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                sys.set(i, j, lin->m.at(i, j) + ((i == j) ? 1.0 : 0.0));
            }
        }
        return solve_linear(sys, x);
    }
    if (const auto* proj = std::get_if<Projection>(&op.data())) {
        return project_point(proj->set, x);
    }
    const auto& km = std::get<KMAveraged>(op.data());
    return (1.0 - km.lambda) * x + km.lambda * apply(*km.base, x);
}

double resolvent_formula_check(const SkewResolvent& op, const Vector& x) {
    const std::size_t n = op.a.rows();
    require_dim(n, x, "resolvent_formula_check");
    Matrix sys(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sys.set(i, j, op.a.at(i, j) + ((i == j) ? 1.0 : 0.0));
        }
    }
    const Vector solved = solve_linear(sys, x);
    const Vector closed = 0.5 * x - 0.5 * op.a.apply(x);
    return (solved - closed).norm();
}

double orthogonality_defect(const OperatorSpec& op, const Vector& x) {
    const bool supported =
        std::holds_alternative<PlanarRotationAveraged>(op.data()) ||
        std::holds_alternative<SkewResolvent>(op.data()) ||
        std::holds_alternative<RightShiftAveraged>(op.data());
    if (!supported) {
        throw UnsupportedOperator(
            std::string("orthogonality_defect is defined for the averaged "
                        "isometry maps, not ") +
            op.kind_name());
    }
    const Vector tx = apply(op, x);
    return std::abs(inner_product(tx, x - tx));
}

} // namespace fejerlab

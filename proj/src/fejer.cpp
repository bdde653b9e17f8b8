#include "fejerlab/fejer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

#include "fejerlab/errors.hpp"
#include "fejerlab/format.hpp"

namespace fejerlab {

namespace {

// Below this a step is treated as numerically stationary even when the
// caller asked for stop_tol = 0; see largest_fejer_halfspaces.  The cutoff
// sits well above 1e-154: under that, squared components go subnormal and
// computed norms can be off by ~1e-4 relative, enough to spoil any
// direction or halfspace built from the step.
constexpr double kDegenerateStep = 1e-150;

} // namespace

IterationTrace iterate(std::shared_ptr<const OperatorSpec> op, Vector x0,
                       std::size_t max_steps, double stop_tol) {
    if (!op) throw ConfigError("iterate needs an operator");
    if (!(stop_tol >= 0.0) || !std::isfinite(stop_tol)) {
        throw ConfigError("stop tolerance must be finite and nonnegative");
    }
    const std::size_t want = op->expected_dim();
    if (want != 0 && x0.dim() != want) {
        throw DimensionMismatch("starting point has dimension " +
                                std::to_string(x0.dim()) + ", operator wants " +
                                std::to_string(want));
    }

    IterationTrace trace;
    trace.op = std::move(op);
    trace.stop_tol = stop_tol;
    trace.points.reserve(max_steps + 1);
    trace.step_norms.reserve(max_steps);
    trace.points.push_back(std::move(x0));

    for (std::size_t n = 0; n < max_steps; ++n) {
        Vector next = apply(*trace.op, trace.points.back());
        const double step = (trace.points.back() - next).norm();
        trace.points.push_back(std::move(next));
        trace.step_norms.push_back(step);
        if (step < stop_tol) {
            trace.stop_reason = StopReason::StepBelowTol;
            return trace;
        }
    }
    trace.stop_reason = StopReason::MaxSteps;
    return trace;
}

std::vector<Halfspace> largest_fejer_halfspaces(const IterationTrace& trace) {
    const double skip_below = std::max(trace.stop_tol, kDegenerateStep);
    std::vector<Halfspace> out;
    out.reserve(trace.steps());
    for (std::size_t n = 0; n < trace.steps(); ++n) {
        if (trace.step_norms[n] < skip_below) continue;
        const Vector& x = trace.points[n];
        const Vector& y = trace.points[n + 1];
        out.push_back(Halfspace{2.0 * (x - y), x.norm_sq() - y.norm_sq()});
    }
    return out;
}

double fejer_violation(const std::vector<Vector>& points, const Vector& z) {
    if (points.empty()) throw IndexOutOfRange("violation of an empty orbit");
    double worst = 0.0;
    double prev = (points.front() - z).norm();
    bool first = true;
    for (std::size_t n = 1; n < points.size(); ++n) {
        const double cur = (points[n] - z).norm();
        const double jump = cur - prev;
        if (first || jump > worst) worst = jump;
        first = false;
        prev = cur;
    }
    return worst;
}

double fejer_violation(const IterationTrace& trace, const Vector& z) {
    return fejer_violation(trace.points, z);
}

double max_halfspace_excess(const std::vector<Halfspace>& halfspaces,
                            const Vector& z) {
    if (halfspaces.empty()) return 0.0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& h : halfspaces) {
        worst = std::max(worst, inner_product(h.a, z) - h.b);
    }
    return worst;
}

double default_fejer_tolerance(const Vector& x0) {
    return 1e-12 * (1.0 + x0.norm());
}

FejerAuditReport audit_fejer_inequalities(const IterationTrace& trace,
                                          const Vector& z, const Vector& zbar,
                                          std::size_t n, std::size_t m,
                                          double fejer_tol) {
    if (m >= trace.points.size() || n >= m) {
        throw IndexOutOfRange("audit window [" + std::to_string(n) + ", " +
                              std::to_string(m) + "] does not fit a trace of " +
                              std::to_string(trace.points.size()) + " points");
    }
    if (fejer_violation(trace, z) > fejer_tol) {
        throw NotAFejerPoint(
            "distances to the candidate increase along the orbit by more "
            "than " +
            format_double(fejer_tol));
    }

    const Vector& xn = trace.points[n];
    const Vector& xn1 = trace.points[n + 1];
    const Vector& xm = trace.points[m];
    const Vector diff = xn - xn1;

    const double lhs = inner_product(diff, z - zbar);
    const double half_drop =
        0.5 * ((xn - zbar).norm_sq() - (xn1 - zbar).norm_sq());
    const double expanded =
        inner_product(xn1 - zbar, diff) + 0.5 * diff.norm_sq();
    const double cs_bound =
        (xn1 - zbar).norm() * diff.norm() + 0.5 * diff.norm_sq();

    FejerAuditReport report;
    report.n = n;
    report.m = m;
    report.consecutive_slack = half_drop - lhs;
    report.expansion_residual = half_drop - expanded;
    report.cauchy_schwarz_slack = cs_bound - expanded;
    report.window_slack =
        0.5 * ((xn - zbar).norm_sq() - (xm - zbar).norm_sq()) -
        inner_product(xn - xm, z - zbar);
    return report;
}

void write_trace_csv(const IterationTrace& trace, std::ostream& out) {
    const std::size_t dim = trace.points.front().dim();
    out << "n";
    for (std::size_t j = 0; j < dim; ++j) out << ",x_" << j;
    out << ",norm,step_norm\n";
    for (std::size_t n = 0; n < trace.points.size(); ++n) {
        const Vector& x = trace.points[n];
        out << n;
        for (std::size_t j = 0; j < dim; ++j) {
            out << ',' << format_double(x[j]);
        }
        out << ',' << format_double(x.norm()) << ',';
        if (n < trace.step_norms.size()) {
            out << format_double(trace.step_norms[n]);
        }
        out << '\n';
    }
}

} // namespace fejerlab

#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

#include "fejerlab/convex_set.hpp"
#include "fejerlab/operators.hpp"
#include "fejerlab/vector.hpp"

namespace fejerlab {

enum class StopReason {
    MaxSteps,     // ran the full step budget
    StepBelowTol, // consecutive step norm dropped below the tolerance
};

// Orbit of x_{n+1} = T x_n together with the step norms.  step_norms[n]
// is |x_n - x_{n+1}|, so there is one fewer entry than points.  The
// operator is kept alive by the trace because later analyses re-apply it.
struct IterationTrace {
    std::shared_ptr<const OperatorSpec> op;
    std::vector<Vector> points;
    std::vector<double> step_norms;
    double stop_tol = 0.0;
    StopReason stop_reason = StopReason::MaxSteps;

    std::size_t steps() const { return step_norms.size(); }
    const Vector& last() const { return points.back(); }
};

// Runs the iteration from x0 for at most max_steps applications, stopping
// early when a step norm falls strictly below stop_tol.  stop_tol = 0
// therefore never stops early, which is how long rotation runs are driven
// all the way into the subnormal range.
IterationTrace iterate(std::shared_ptr<const OperatorSpec> op, Vector x0,
                       std::size_t max_steps, double stop_tol);

// One halfspace  <a, z> <= b  per recorded step, with
//   a = 2 (x_n - x_{n+1}),   b = |x_n|^2 - |x_{n+1}|^2.
// Their intersection is the largest set the sequence is Fejer monotone
// with respect to.  Steps shorter than max(stop_tol, 1e-150) are skipped:
// those constraints are satisfied by everything up to rounding and their
// normals carry no usable direction once squared components drift toward
// the subnormal range.
std::vector<Halfspace> largest_fejer_halfspaces(const IterationTrace& trace);

// Largest violation of monotone distances along the orbit,
//   max_n ( |x_{n+1} - z| - |x_n - z| ).
// Nonpositive means the distances to z never increase.  A trace with a
// single point reports 0.
double fejer_violation(const std::vector<Vector>& points, const Vector& z);
double fejer_violation(const IterationTrace& trace, const Vector& z);

// max over the halfspaces of <a, z> - b; nonpositive means z satisfies
// every constraint.  This is the second route to the same membership
// question as fejer_violation, and the two must agree up to tolerance.
double max_halfspace_excess(const std::vector<Halfspace>& halfspaces,
                            const Vector& z);

// Scale-aware default for deciding "is z a Fejer point of this orbit".
double default_fejer_tolerance(const Vector& x0);

// Slack accounting for the inequality chain that controls one step (and a
// window of steps) of a Fejer monotone orbit.  For a Fejer point z and an
// arbitrary anchor zbar:
//
//   consecutive_slack     = 1/2 (|x_n - zbar|^2 - |x_{n+1} - zbar|^2)
//                           - <x_n - x_{n+1}, z - zbar>        (>= 0)
//   expansion_residual    = same half-difference minus
//                           <x_{n+1} - zbar, x_n - x_{n+1}>
//                           - 1/2 |x_n - x_{n+1}|^2            (identity, ~0)
//   cauchy_schwarz_slack  = |x_{n+1} - zbar| |x_n - x_{n+1}|
//                           + 1/2 |x_n - x_{n+1}|^2
//                           - the expanded form above          (>= 0)
//   window_slack          = 1/2 (|x_n - zbar|^2 - |x_m - zbar|^2)
//                           - <x_n - x_m, z - zbar>            (>= 0)
struct FejerAuditReport {
    std::size_t n = 0;
    std::size_t m = 0;
    double consecutive_slack = 0.0;
    double expansion_residual = 0.0;
    double cauchy_schwarz_slack = 0.0;
    double window_slack = 0.0;
};

// Audits the chain at step n and over the window [n, m], n < m.  Throws
// NotAFejerPoint when z increases some distance along the orbit by more
// than fejer_tol, and IndexOutOfRange when the window does not fit the
// trace.  zbar is unconstrained.
FejerAuditReport audit_fejer_inequalities(const IterationTrace& trace,
                                          const Vector& z, const Vector& zbar,
                                          std::size_t n, std::size_t m,
                                          double fejer_tol);

// Writes "n,x_0,...,norm,step_norm" rows with shortest round-trip floats.
// The last row has no outgoing step, so its step_norm cell is empty.
void write_trace_csv(const IterationTrace& trace, std::ostream& out);

} // namespace fejerlab

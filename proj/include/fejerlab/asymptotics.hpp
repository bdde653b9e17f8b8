#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "fejerlab/convex_set.hpp"
#include "fejerlab/fejer.hpp"
#include "fejerlab/vector.hpp"

namespace fejerlab {

enum class DirectionKind {
    StepDiff, // normalized x_n - x_{n+1}
    ToLimit,  // normalized x_n - zbar
};

const char* direction_kind_name(DirectionKind kind);

// A normalized direction harvested from the orbit, plus two measurements
// filled in by annotate_directions: how far the direction is from the
// polar cone of Z at zbar (polar_residual, zero on the cone) and from the
// unit vectors of the normal cone itself (normal_cone_dist, +inf when the
// cone is trivial).  Both start as NaN until annotated.
struct DirectionRecord {
    std::size_t n;
    DirectionKind kind;
    UnitVector dir;
    double polar_residual = std::numeric_limits<double>::quiet_NaN();
    double normal_cone_dist = std::numeric_limits<double>::quiet_NaN();
};

// Extracts both direction sequences from a trace.  Steps (for StepDiff)
// and offsets from zbar (for ToLimit) shorter than max(stop_tol, 1e-150)
// are skipped because their normalized direction is mostly rounding
// noise.  Throws AllDegenerate when nothing survives at all.
std::vector<DirectionRecord> direction_sequences(const IterationTrace& trace,
                                                 const Vector& zbar);

// sigma_Z(d) - <zbar, d>.  Nonnegative whenever zbar lies in Z, and zero
// exactly when d is normal to Z at zbar.
double polar_residual(const ConvexSetSpec& z_set, const Vector& zbar,
                      const UnitVector& d);

// Distance from d to the unit vectors of the normal cone N_Z(zbar),
//   min { |d - u| : u in N_Z(zbar), |u| = 1 }.
//
// For halfspace-described sets the cone is generated by the unit normals
// of the rows active at zbar.  Projecting d onto that cone (nonnegative
// least squares) gives the exact answer when the projection is nonzero;
// otherwise the minimum sits on a generator or a pairwise arc between two
// generators, which a fixed grid scans.  A trivial cone (zbar interior)
// has no unit vectors, reported as +inf.  Singletons have the whole space
// as normal cone, so the distance is 0; a ball contributes the single
// outward radius direction when zbar sits on its boundary.
double normal_cone_distance(const ConvexSetSpec& z_set, const Vector& zbar,
                            const UnitVector& d, double active_tol = 1e-8);

// Fills polar_residual on every record, and normal_cone_dist on every
// record whose set carries a usable cone description (hull sets do not,
// so their cone distances stay NaN).
void annotate_directions(std::vector<DirectionRecord>& records,
                         const ConvexSetSpec& z_set, const Vector& zbar,
                         double active_tol = 1e-8);

struct DirectionCluster {
    UnitVector representative;
    std::size_t count;
};

// Groups the tail of one direction sequence into epsilon-balls: each
// direction joins the first existing cluster whose anchor is within
// epsilon, otherwise it opens a new one.  Representatives are the
// normalized cluster means, in order of first appearance.  The tail is
// the trailing ceil(tail_fraction * K) records of the requested kind.
std::vector<DirectionCluster> cluster_directions(
    const std::vector<DirectionRecord>& records, DirectionKind kind,
    double tail_fraction = 0.5, double epsilon = 1e-2);

// Largest gap, in degrees, between consecutive tail directions on the
// planar unit circle, wraparound included.  A single direction leaves a
// 360 degree hole.  Planar traces only.
double max_angular_gap(const std::vector<DirectionRecord>& records,
                       DirectionKind kind, double tail_fraction = 0.5);

// Tail deviation of both direction sequences from the single outward
// normal, for the case where N_Z(zbar) is a ray.
struct ZigzagReport {
    UnitVector ray;
    double max_step_deviation;
    double max_limit_deviation;
};

// Requires a halfspace-described Z with exactly one row active at zbar;
// anything else throws NotARay.  Reports max |dir - ray| over the tails
// of both sequences, which is small precisely when the orbit approaches
// zbar without zigzagging.
ZigzagReport no_zigzag_check(const std::vector<DirectionRecord>& records,
                             const ConvexSetSpec& z_set, const Vector& zbar,
                             double tail_fraction = 0.5,
                             double active_tol = 1e-8);

// Writes "n,kind,d_0,...,polar_residual,normal_cone_dist" rows.
void write_directions_csv(const std::vector<DirectionRecord>& records,
                          std::ostream& out);

} // namespace fejerlab

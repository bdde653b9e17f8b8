#include "fejerlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "fejerlab/errors.hpp"
#include "fejerlab/format.hpp"
#include "fejerlab/matrix.hpp"
#include "fejerlab/nnls.hpp"

namespace fejerlab {

namespace {

// Matches the stationary-step cutoff in fejer.cpp: below 1e-150 the
// squared components of a difference vector can go subnormal and the
// computed norm is no longer trustworthy as a direction divisor.
constexpr double kDegenerate = 1e-150;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Trailing ceil(tail_fraction * K) records of one kind, in orbit order.
std::vector<const DirectionRecord*> tail_of_kind(
    const std::vector<DirectionRecord>& records, DirectionKind kind,
    double tail_fraction) {
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0) {
        throw ConfigError("tail fraction must lie in (0, 1]");
    }
    std::vector<const DirectionRecord*> of_kind;
    for (const auto& r : records) {
        if (r.kind == kind) of_kind.push_back(&r);
    }
    if (of_kind.empty()) {
        throw EmptyTail(std::string("no ") + direction_kind_name(kind) +
                        " directions to take a tail of");
    }
    std::size_t keep = static_cast<std::size_t>(
        std::ceil(tail_fraction * static_cast<double>(of_kind.size())));
    keep = std::clamp<std::size_t>(keep, 1, of_kind.size());
    return {of_kind.end() - static_cast<std::ptrdiff_t>(keep), of_kind.end()};
}

} // namespace

const char* direction_kind_name(DirectionKind kind) {
    return kind == DirectionKind::StepDiff ? "step_diff" : "to_limit";
}

std::vector<DirectionRecord> direction_sequences(const IterationTrace& trace,
                                                 const Vector& zbar) {
    const double cutoff = std::max(trace.stop_tol, kDegenerate);
    std::vector<DirectionRecord> out;
    out.reserve(trace.points.size() + trace.steps());
    for (std::size_t n = 0; n < trace.steps(); ++n) {
        const Vector d = trace.points[n] - trace.points[n + 1];
        if (d.norm() <= cutoff) continue;
        out.push_back(
            DirectionRecord{n, DirectionKind::StepDiff, unit_direction(d)});
    }
    for (std::size_t n = 0; n < trace.points.size(); ++n) {
        const Vector d = trace.points[n] - zbar;
        if (d.norm() <= cutoff) continue;
        out.push_back(
            DirectionRecord{n, DirectionKind::ToLimit, unit_direction(d)});
    }
    if (out.empty()) {
        throw AllDegenerate(
            "every step and every offset from the limit candidate is below "
            "the degeneracy cutoff");
    }
    return out;
}

double polar_residual(const ConvexSetSpec& z_set, const Vector& zbar,
                      const UnitVector& d) {
    return support_function(z_set, d.vec()) - inner_product(zbar, d.vec());
}

double normal_cone_distance(const ConvexSetSpec& z_set, const Vector& zbar,
                            const UnitVector& d, double active_tol) {
    if (zbar.dim() != z_set.dim() || d.dim() != z_set.dim()) {
        throw DimensionMismatch("normal cone query dimensions disagree");
    }
    if (const auto* s = std::get_if<Singleton>(&z_set.data())) {
        if ((zbar - s->c).norm() > active_tol) {
            throw ZbarNotInSet("zbar is not the singleton's point");
        }
        return 0.0; // the cone is the whole space, d itself is in it
    }
    if (const auto* ball = std::get_if<Ball>(&z_set.data())) {
        const double off = (zbar - ball->c).norm();
        if (off > ball->r + active_tol) {
            throw ZbarNotInSet("zbar lies outside the ball");
        }
        if (off < ball->r - active_tol) return kInf;
        const UnitVector radius = unit_direction(zbar - ball->c);
        return (d.vec() - radius.vec()).norm();
    }
    const auto rows = constraint_rows(z_set);
    if (!rows) {
        throw InvalidSet(
            "normal cone analysis needs a halfspace description; a point "
            "cloud hull does not carry one");
    }
    const auto active = active_rows(*rows, zbar, active_tol);
    if (active.empty()) return kInf; // interior point, trivial cone

    std::vector<Vector> gens;
    gens.reserve(active.size());
    for (std::size_t idx : active) {
        gens.push_back(unit_direction((*rows)[idx].a).vec());
    }
    const std::size_t dim = z_set.dim();
    Matrix g(dim, gens.size());
    for (std::size_t j = 0; j < gens.size(); ++j) {
        for (std::size_t i = 0; i < dim; ++i) g.set(i, j, gens[j][i]);
    }

    const Vector w = nnls(g, d.vec());
    const Vector p = g.apply(w);
    if (p.norm() > 1e-12) {
        return (d.vec() - unit_direction(p).vec()).norm();
    }

    // The projection vanished, so <d, u> <= 0 across the cone and the
    // nearest unit vector sits on a generator or on an arc between two of
    // them; a fixed scan of those is enough.
    double best = kInf;
    for (const auto& gen : gens) {
        best = std::min(best, (d.vec() - gen).norm());
    }
    constexpr int kArcPoints = 64;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        for (std::size_t j = i + 1; j < gens.size(); ++j) {
            for (int t = 1; t <= kArcPoints; ++t) {
                const double s =
                    static_cast<double>(t) / (kArcPoints + 1);
                const Vector combo = (1.0 - s) * gens[i] + s * gens[j];
                if (combo.norm() <= 1e-12) continue;
                best = std::min(
                    best, (d.vec() - unit_direction(combo).vec()).norm());
            }
        }
    }
    return best;
}

void annotate_directions(std::vector<DirectionRecord>& records,
                         const ConvexSetSpec& z_set, const Vector& zbar,
                         double active_tol) {
    // Hull sets have no halfspace description, so their cone distances
    // stay NaN while the polar residuals are still filled in.
    const bool have_cones =
        !std::holds_alternative<PointCloudHull>(z_set.data());
    for (auto& r : records) {
        r.polar_residual = polar_residual(z_set, zbar, r.dir);
        if (have_cones) {
            r.normal_cone_dist =
                normal_cone_distance(z_set, zbar, r.dir, active_tol);
        }
    }
}

std::vector<DirectionCluster> cluster_directions(
    const std::vector<DirectionRecord>& records, DirectionKind kind,
    double tail_fraction, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("cluster radius must be positive and finite");
    }
    const auto tail = tail_of_kind(records, kind, tail_fraction);

    struct Bucket {
        Vector anchor;
        Vector sum;
        std::size_t count;
    };
    std::vector<Bucket> buckets;
    for (const auto* r : tail) {
        const Vector& v = r->dir.vec();
        bool placed = false;
        for (auto& bucket : buckets) {
            if ((v - bucket.anchor).norm() <= epsilon) {
                bucket.sum += v;
                ++bucket.count;
                placed = true;
                break;
            }
        }
        if (!placed) buckets.push_back(Bucket{v, v, 1});
    }

    std::vector<DirectionCluster> out;
    out.reserve(buckets.size());
    for (const auto& bucket : buckets) {
        out.push_back(DirectionCluster{unit_direction(bucket.sum),
                                       bucket.count});
    }
    return out;
}

double max_angular_gap(const std::vector<DirectionRecord>& records,
                       DirectionKind kind, double tail_fraction) {
    const auto tail = tail_of_kind(records, kind, tail_fraction);
    std::vector<double> angles;
    angles.reserve(tail.size());
    for (const auto* r : tail) angles.push_back(angle_of(r->dir));
    std::sort(angles.begin(), angles.end());
    if (angles.size() == 1) return 360.0;
    double worst = 360.0 - angles.back() + angles.front();
    for (std::size_t i = 1; i < angles.size(); ++i) {
        worst = std::max(worst, angles[i] - angles[i - 1]);
    }
    return worst;
}

ZigzagReport no_zigzag_check(const std::vector<DirectionRecord>& records,
                             const ConvexSetSpec& z_set, const Vector& zbar,
                             double tail_fraction, double active_tol) {
    const auto rows = constraint_rows(z_set);
    if (!rows) {
        throw NotARay(std::string("a ") + z_set.kind_name() +
                      " has no halfspace rows to form a normal ray from");
    }
    const auto active = active_rows(*rows, zbar, active_tol);
    if (active.size() != 1) {
        throw NotARay("the normal cone at zbar is a ray only when exactly "
                      "one constraint is active; found " +
                      std::to_string(active.size()));
    }
    const UnitVector ray = unit_direction((*rows)[active.front()].a);

    ZigzagReport report{ray, 0.0, 0.0};
    for (const auto* r :
         tail_of_kind(records, DirectionKind::StepDiff, tail_fraction)) {
        report.max_step_deviation = std::max(
            report.max_step_deviation, (r->dir.vec() - ray.vec()).norm());
    }
    for (const auto* r :
         tail_of_kind(records, DirectionKind::ToLimit, tail_fraction)) {
        report.max_limit_deviation = std::max(
            report.max_limit_deviation, (r->dir.vec() - ray.vec()).norm());
    }
    return report;
}

void write_directions_csv(const std::vector<DirectionRecord>& records,
                          std::ostream& out) {
    if (records.empty()) {
        out << "n,kind,polar_residual,normal_cone_dist\n";
        return;
    }
    const std::size_t dim = records.front().dir.dim();
    out << "n,kind";
    for (std::size_t j = 0; j < dim; ++j) out << ",d_" << j;
    out << ",polar_residual,normal_cone_dist\n";
    for (const auto& r : records) {
        out << r.n << ',' << direction_kind_name(r.kind);
        for (std::size_t j = 0; j < dim; ++j) {
            out << ',' << format_double(r.dir[j]);
        }
        out << ',' << format_double(r.polar_residual) << ','
            << format_double(r.normal_cone_dist) << '\n';
    }
}

} // namespace fejerlab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "fejerlab/asymptotics.hpp"
#include "fejerlab/convex_set.hpp"
#include "fejerlab/errors.hpp"
#include "fejerlab/fejer.hpp"
#include "fejerlab/operators.hpp"

using namespace fejerlab;

namespace {

DirectionRecord record_at_deg(std::size_t n, DirectionKind kind, double deg) {
    const double rad = deg * M_PI / 180.0;
    return DirectionRecord{
        n, kind, unit_direction(Vector{std::cos(rad), std::sin(rad)})};
}

IterationTrace rotation_trace(double theta, std::size_t steps) {
    const auto op = std::make_shared<const OperatorSpec>(
        OperatorSpec(PlanarRotationAveraged{theta}));
    return iterate(op, Vector{1.0, 0.0}, steps, 0.0);
}

const ConvexSetSpec kLowerHalf{
    Polyhedron{{Halfspace{Vector{0.0, 1.0}, 0.0}}}};
const ConvexSetSpec kUnitBox{Box{Vector{-1.0, -1.0}, Vector{1.0, 1.0}}};

} // namespace

TEST_CASE("direction sequences split by kind and skip degenerate entries") {
    const auto trace = rotation_trace(M_PI / 4.0, 10);
    const auto records = direction_sequences(trace, Vector::zeros(2));

    std::size_t steps = 0;
    std::size_t limits = 0;
    for (const auto& r : records) {
        if (r.kind == DirectionKind::StepDiff) ++steps;
        if (r.kind == DirectionKind::ToLimit) ++limits;
        CHECK(r.dir.vec().norm() == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::isnan(r.polar_residual));
        CHECK(std::isnan(r.normal_cone_dist));
    }
    CHECK(steps == 10);
    CHECK(limits == 11);

    // An offset identical to zbar produces no to-limit record.
    const auto shifted = direction_sequences(trace, trace.points.front());
    std::size_t limits2 = 0;
    for (const auto& r : shifted) {
        if (r.kind == DirectionKind::ToLimit) ++limits2;
    }
    CHECK(limits2 == 10);
}

TEST_CASE("direction sequences drop offsets below the degeneracy cutoff") {
    IterationTrace t;
    t.points = {Vector{1.0, 0.0}, Vector{1e-160, 0.0}};
    t.step_norms = {(t.points[0] - t.points[1]).norm()};
    const auto records = direction_sequences(t, Vector::zeros(2));
    // One macroscopic step, one usable to-limit offset; the 1e-160 offset
    // sits under the cutoff where squared norms would go subnormal.
    CHECK(records.size() == 2);
}

TEST_CASE("all-degenerate traces are rejected") {
    IterationTrace t;
    t.points = {Vector::zeros(2)};
    CHECK_THROWS_AS(direction_sequences(t, Vector::zeros(2)), AllDegenerate);
}

TEST_CASE("polar residual against supported sets") {
    const Vector origin = Vector::zeros(2);
    const ConvexSetSpec single{Singleton{Vector{0.5, -0.5}}};
    CHECK(polar_residual(single, Vector{0.5, -0.5},
                         unit_direction(Vector{1.0, 3.0})) ==
          doctest::Approx(0.0).epsilon(1e-15));

    const ConvexSetSpec ball{Ball{origin, 2.0}};
    const auto east = unit_direction(Vector{1.0, 0.0});
    const auto north = unit_direction(Vector{0.0, 1.0});
    CHECK(polar_residual(ball, Vector{2.0, 0.0}, east) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(polar_residual(ball, Vector{2.0, 0.0}, north) ==
          doctest::Approx(2.0).epsilon(1e-15));

    CHECK(polar_residual(kLowerHalf, origin, north) == 0.0);
    CHECK(std::isinf(polar_residual(kLowerHalf, origin, east)));
}

TEST_CASE("normal cone distance") {
    const auto east = unit_direction(Vector{1.0, 0.0});
    const auto north = unit_direction(Vector{0.0, 1.0});
    const auto diag = unit_direction(Vector{1.0, 1.0});

    SUBCASE("singleton cones are the whole space") {
        const ConvexSetSpec single{Singleton{Vector{1.0, 2.0}}};
        CHECK(normal_cone_distance(single, Vector{1.0, 2.0}, east) == 0.0);
        CHECK_THROWS_AS(
            normal_cone_distance(single, Vector{0.0, 0.0}, east),
            ZbarNotInSet);
    }

    SUBCASE("ball boundary points have radial cones") {
        const ConvexSetSpec ball{Ball{Vector::zeros(2), 2.0}};
        CHECK(normal_cone_distance(ball, Vector{2.0, 0.0}, east) ==
              doctest::Approx(0.0).epsilon(1e-15));
        CHECK(normal_cone_distance(ball, Vector{2.0, 0.0}, north) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(std::isinf(
            normal_cone_distance(ball, Vector{0.5, 0.0}, east)));
        CHECK_THROWS_AS(
            normal_cone_distance(ball, Vector{9.0, 0.0}, east),
            ZbarNotInSet);
    }

    SUBCASE("box faces and corners") {
        CHECK(normal_cone_distance(kUnitBox, Vector{1.0, 0.3}, east) ==
              doctest::Approx(0.0).epsilon(1e-14));
        CHECK(normal_cone_distance(kUnitBox, Vector{1.0, 0.3}, north) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        // At a corner the cone is spanned by both outward normals.
        CHECK(normal_cone_distance(kUnitBox, Vector{1.0, 1.0}, diag) ==
              doctest::Approx(0.0).epsilon(1e-12));
        CHECK(normal_cone_distance(kUnitBox, Vector{1.0, 1.0}, north) ==
              doctest::Approx(0.0).epsilon(1e-12));
        const auto west = unit_direction(Vector{-1.0, 0.0});
        CHECK(normal_cone_distance(kUnitBox, Vector{1.0, 1.0}, west) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
        CHECK(std::isinf(
            normal_cone_distance(kUnitBox, Vector{0.0, 0.0}, east)));
    }

    SUBCASE("hull sets have no halfspace description") {
        const ConvexSetSpec hull{
            PointCloudHull{{Vector{0.0, 0.0}, Vector{1.0, 0.0}}}};
        CHECK_THROWS_AS(
            normal_cone_distance(hull, Vector{0.0, 0.0}, east), InvalidSet);
    }
}

TEST_CASE("annotation fills residuals and leaves hull cones alone") {
    const auto trace = rotation_trace(M_PI / 6.0, 12);
    auto records = direction_sequences(trace, Vector::zeros(2));
    const ConvexSetSpec single{Singleton{Vector::zeros(2)}};
    annotate_directions(records, single, Vector::zeros(2), 1e-8);
    for (const auto& r : records) {
        CHECK_FALSE(std::isnan(r.polar_residual));
        CHECK(r.normal_cone_dist == 0.0);
    }

    auto records2 = direction_sequences(trace, Vector::zeros(2));
    const ConvexSetSpec hull{
        PointCloudHull{{Vector{0.0, 0.0}, Vector{0.1, 0.0}}}};
    annotate_directions(records2, hull, Vector::zeros(2), 1e-8);
    for (const auto& r : records2) {
        CHECK_FALSE(std::isnan(r.polar_residual));
        CHECK(std::isnan(r.normal_cone_dist));
    }
}

TEST_CASE("greedy clustering by chord distance") {
    std::vector<DirectionRecord> recs;
    recs.push_back(record_at_deg(0, DirectionKind::StepDiff, 0.0));
    recs.push_back(record_at_deg(1, DirectionKind::StepDiff, 0.2));
    recs.push_back(record_at_deg(2, DirectionKind::StepDiff, 90.0));
    recs.push_back(record_at_deg(3, DirectionKind::StepDiff, 90.1));
    recs.push_back(record_at_deg(4, DirectionKind::StepDiff, 180.0));
    recs.push_back(record_at_deg(5, DirectionKind::ToLimit, 45.0));

    const auto loose =
        cluster_directions(recs, DirectionKind::StepDiff, 1.0, 1e-2);
    CHECK(loose.size() == 3);
    CHECK(loose[0].count == 2);
    CHECK(loose[1].count == 2);
    CHECK(loose[2].count == 1);
    // Representatives are renormalized means inside each bucket.
    CHECK(angle_of(loose[0].representative) ==
          doctest::Approx(0.1).epsilon(1e-9));

    const auto tight =
        cluster_directions(recs, DirectionKind::StepDiff, 1.0, 1e-6);
    CHECK(tight.size() == 5);

    // Only the trailing 40 percent (two records) of the step kind.
    const auto tail =
        cluster_directions(recs, DirectionKind::StepDiff, 0.4, 1e-2);
    CHECK(tail.size() == 2);

    const auto other =
        cluster_directions(recs, DirectionKind::ToLimit, 1.0, 1e-2);
    CHECK(other.size() == 1);

    CHECK_THROWS_AS(
        cluster_directions(recs, DirectionKind::StepDiff, 0.0, 1e-2),
        ConfigError);
    CHECK_THROWS_AS(
        cluster_directions(recs, DirectionKind::StepDiff, 1.5, 1e-2),
        ConfigError);
    CHECK_THROWS_AS(
        cluster_directions({}, DirectionKind::StepDiff, 0.5, 1e-2),
        EmptyTail);
}

TEST_CASE("angular gaps with wraparound") {
    std::vector<DirectionRecord> recs;
    for (double deg : {0.0, 90.0, 180.0, 270.0}) {
        recs.push_back(record_at_deg(recs.size(), DirectionKind::ToLimit, deg));
    }
    CHECK(max_angular_gap(recs, DirectionKind::ToLimit, 1.0) ==
          doctest::Approx(90.0).epsilon(1e-12));

    std::vector<DirectionRecord> two;
    two.push_back(record_at_deg(0, DirectionKind::ToLimit, 350.0));
    two.push_back(record_at_deg(1, DirectionKind::ToLimit, 10.0));
    CHECK(max_angular_gap(two, DirectionKind::ToLimit, 1.0) ==
          doctest::Approx(340.0).epsilon(1e-12));

    std::vector<DirectionRecord> one;
    one.push_back(record_at_deg(0, DirectionKind::ToLimit, 42.0));
    CHECK(max_angular_gap(one, DirectionKind::ToLimit, 1.0) == 360.0);

    std::vector<DirectionRecord> flat;
    flat.push_back(DirectionRecord{
        0, DirectionKind::ToLimit, unit_direction(Vector{1.0, 0.0, 0.0})});
    CHECK_THROWS_AS(max_angular_gap(flat, DirectionKind::ToLimit, 1.0),
                    DimensionMismatch);
}

TEST_CASE("zigzag check wants exactly one active constraint") {
    std::vector<DirectionRecord> recs;
    for (std::size_t n = 0; n < 6; ++n) {
        recs.push_back(record_at_deg(n, DirectionKind::StepDiff, 90.0));
        recs.push_back(record_at_deg(n, DirectionKind::ToLimit, 90.0));
    }

    const auto rep = no_zigzag_check(recs, kLowerHalf, Vector::zeros(2), 0.5,
                                     1e-8);
    CHECK(rep.ray[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rep.max_step_deviation <= 1e-15);
    CHECK(rep.max_limit_deviation <= 1e-15);

    // Corner: two active rows.  Interior: none.  Singleton: no rows.
    CHECK_THROWS_AS(
        no_zigzag_check(recs, kUnitBox, Vector{1.0, 1.0}, 0.5, 1e-8), NotARay);
    CHECK_THROWS_AS(
        no_zigzag_check(recs, kUnitBox, Vector{0.0, 0.0}, 0.5, 1e-8), NotARay);
    CHECK_THROWS_AS(
        no_zigzag_check(recs, ConvexSetSpec{Singleton{Vector::zeros(2)}},
                        Vector::zeros(2), 0.5, 1e-8),
        NotARay);
}

TEST_CASE("directions csv layout") {
    std::vector<DirectionRecord> recs;
    recs.push_back(record_at_deg(0, DirectionKind::StepDiff, 90.0));
    recs[0].polar_residual = 0.0;

    std::ostringstream os;
    write_directions_csv(recs, os);
    CHECK(os.str() ==
          "n,kind,d_0,d_1,polar_residual,normal_cone_dist\n"
          "0,step_diff,6.123233995736766e-17,1,0,nan\n");

    std::ostringstream empty;
    write_directions_csv({}, empty);
    CHECK(empty.str() == "n,kind,polar_residual,normal_cone_dist\n");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fejerlab/errors.hpp"
#include "fejerlab/exact_oracle.hpp"
#include "fejerlab/rational.hpp"

using namespace fejerlab;

TEST_CASE("binomial coefficients") {
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(6, 3) == 20);
    CHECK(binomial(52, 5) == 2598960);
    CHECK(binomial(10, 11) == 0);
    CHECK(binomial(10, -1) == 0);
    CHECK(binomial(-2, 0) == 0);
    // Symmetry on a larger row.
    CHECK(binomial(40, 11) == binomial(40, 29));
}

TEST_CASE("binomial convolution identity on a small grid") {
    for (long long m = 0; m <= 12; ++m) {
        for (long long n = 0; n <= 12; ++n) {
            for (long long r = 0; r <= 12; ++r) {
                CHECK(vandermonde_check(m, n, r));
            }
        }
    }
    CHECK(vandermonde_check(50, 50, 100));
    CHECK_FALSE(vandermonde_check(-1, 2, 1));
}

TEST_CASE("sparse rational vectors") {
    QVector v;
    CHECK(v.support_size() == 0);
    CHECK(v.coord(1) == 0);
    CHECK(v.coord(17) == 0);
    v.set(2, BigRational(3, 4));
    CHECK(v.coord(2) == BigRational(3, 4));
    CHECK_THROWS_AS(v.set(0, BigRational(1)), IndexOutOfRange);
    // Reads outside the coordinate range are just zero, which is what the
    // Pascal-style stepping loops rely on at the k = 0 boundary.
    CHECK(v.coord(0) == 0);
    CHECK(v.coord(-1) == 0);

    QVector w = QVector::basis(2);
    CHECK(v.dot(w) == BigRational(3, 4));
    CHECK((v - w).coord(2) == BigRational(-1, 4));
    CHECK(w.norm_sq() == 1);
}

TEST_CASE("shift iterates have binomial coordinates") {
    const QVector x0 = shift_iterate_exact(0);
    CHECK(x0.support_size() == 1);
    CHECK(x0.coord(1) == 1);

    const QVector x2 = shift_iterate_exact(2);
    CHECK(x2.support_size() == 3);
    CHECK(x2.coord(1) == BigRational(1, 4));
    CHECK(x2.coord(2) == BigRational(1, 2));
    CHECK(x2.coord(3) == BigRational(1, 4));

    const QVector x5 = shift_iterate_exact(5);
    for (long long k = 1; k <= 6; ++k) {
        CHECK(x5.coord(k) == BigRational(binomial(5, k - 1), 32));
    }

    CHECK_THROWS_AS(shift_iterate_exact(-1), IndexOutOfRange);
}

TEST_CASE("closed forms match the vectors they describe") {
    CHECK(shift_norm_sq_exact(0) == 1);
    CHECK(shift_norm_sq_exact(1) == BigRational(1, 2));
    CHECK(shift_norm_sq_exact(2) == BigRational(3, 8));
    CHECK(shift_norm_sq_exact(5) == BigRational(63, 256));
    CHECK(shift_inner_exact(1) == BigRational(3, 8));

    for (long long n = 0; n <= 30; ++n) {
        const QVector x = shift_iterate_exact(n);
        const QVector x1 = shift_iterate_exact(n + 1);
        CHECK(x.norm_sq() == shift_norm_sq_exact(n));
        CHECK(x.dot(x1) == shift_inner_exact(n));
        CHECK((x - x1).norm_sq() == shift_diff_norm_sq_exact(n));
        CHECK(shift_orthogonality_exact(n) == 0);
        CHECK(x1.dot(x - x1) == 0);
        // Norms fall strictly at every single step.
        CHECK(shift_norm_sq_exact(n + 1) < shift_norm_sq_exact(n));
    }

    // The step length is a fixed fraction of the current norm.
    for (long long n : {0LL, 3LL, 10LL, 25LL}) {
        CHECK(shift_diff_norm_sq_exact(n) * BigRational(2 * (n + 1)) ==
              shift_norm_sq_exact(n));
    }
}

TEST_CASE("normalized coordinates and their totals") {
    CHECK(shift_normalized_coord_sq(2, 2) == BigRational(2, 3));
    CHECK(shift_normalized_coord_sq(2, 9) == 0);

    for (long long n : {0LL, 1LL, 2LL, 7LL, 20LL}) {
        BigRational total = 0;
        for (long long k = 1; k <= n + 1; ++k) {
            total += shift_normalized_coord_sq(n, k);
        }
        CHECK(total == 1);

        BigRational diff_total = 0;
        for (long long k = 1; k <= n + 2; ++k) {
            diff_total += shift_diff_normalized_coord_sq(n, k);
        }
        CHECK(diff_total == 1);
    }

    CHECK_THROWS_AS(shift_normalized_coord_sq(3, 0), IndexOutOfRange);
    CHECK_THROWS_AS(shift_diff_normalized_coord_sq(-1, 1), IndexOutOfRange);
}

TEST_CASE("coordinate proxy tracks the exact normalized coordinate") {
    CHECK(shift_coordinate_proxy(0, 1) == 1.0);
    CHECK(shift_coordinate_proxy(4, 99) == 0.0);
    for (long long n : {1LL, 6LL, 13LL, 40LL}) {
        for (long long k : {1LL, 2LL, n / 2 + 1}) {
            const double exact = std::sqrt(
                static_cast<double>(shift_normalized_coord_sq(n, k)));
            CHECK(shift_coordinate_proxy(n, k) ==
                  doctest::Approx(exact).epsilon(1e-13));
        }
    }
    // Individual coordinates die off even though the norm stays 1.
    CHECK(shift_coordinate_proxy(1000, 1) < 1e-6);
    CHECK(shift_coordinate_proxy(1000, 5) < 1e-6);
}

TEST_CASE("normalized central binomial ratio sits inside its band") {
    // The analytic gap to the band floor is about 1/(128 n^2); past
    // n ~ 1000 that is swamped by log-gamma rounding, so the floor is
    // only asserted where it is numerically meaningful.
    for (long long n : {1LL, 2LL, 5LL, 50LL, 100LL, 1000LL}) {
        const double r = stirling_ratio(n);
        CHECK(r < 1.0);
        CHECK(r > 1.0 - 1.0 / (8.0 * static_cast<double>(n)));
    }
    CHECK(stirling_ratio(10000) < 1.0);
    CHECK(std::fabs(stirling_ratio(100) - 1.0) <= 2e-3);
    CHECK(std::fabs(stirling_ratio(10000) - 1.0) <= 2e-5);
    CHECK_THROWS_AS(stirling_ratio(0), IndexOutOfRange);
}

TEST_CASE("rotation direction census") {
    const auto c5 = rational_rotation_cluster_count(1, 5);
    CHECK(c5.count == 5);
    REQUIRE(c5.angles.size() == 5);
    CHECK(c5.angles[0] == TurnFraction{0, 1});
    CHECK(c5.angles[1] == TurnFraction{1, 5});
    CHECK(c5.angles[4] == TurnFraction{4, 5});

    CHECK(rational_rotation_cluster_count(1, 12).count == 12);
    CHECK(rational_rotation_cluster_count(2, 10).count == 5);
    CHECK(rational_rotation_cluster_count(2, 6).count == 6);

    // A negative cosine doubles the period: offsets walk all sixths.
    const auto c3 = rational_rotation_cluster_count(1, 3);
    CHECK(c3.count == 6);
    REQUIRE(c3.angles.size() == 6);
    CHECK(c3.angles[0] == TurnFraction{0, 1});
    CHECK(c3.angles[1] == TurnFraction{1, 6});
    CHECK(c3.angles[2] == TurnFraction{1, 3});
    CHECK(c3.angles[3] == TurnFraction{1, 2});
    CHECK(c3.angles[4] == TurnFraction{2, 3});
    CHECK(c3.angles[5] == TurnFraction{5, 6});

    // Whole turns collapse to a single direction.
    CHECK(rational_rotation_cluster_count(0, 1).count == 1);
    CHECK(rational_rotation_cluster_count(5, 5).count == 1);
    // Negative numerators are reduced into [0, 1).
    CHECK(rational_rotation_cluster_count(-1, 5).count == 5);

    CHECK_THROWS_AS(rational_rotation_cluster_count(1, 4), DegenerateTheta);
    CHECK_THROWS_AS(rational_rotation_cluster_count(3, 4), DegenerateTheta);
    CHECK_THROWS_AS(rational_rotation_cluster_count(5, 4), DegenerateTheta);
    CHECK_THROWS_AS(rational_rotation_cluster_count(1, 0), DegenerateTheta);
    CHECK_THROWS_AS(rational_rotation_cluster_count(1, -5), DegenerateTheta);
}

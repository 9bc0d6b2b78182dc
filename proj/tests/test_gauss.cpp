#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tpms/gauss.hpp"

using tpms::FamilyParams;
using tpms::branch_values;
using tpms::antipodality_test;
using tpms::MeeksClass;

TEST_CASE("branch values lie on the unit sphere and in the coordinate planes") {
    const FamilyParams p(1.5, 2.5, 4.0, 1.2);
    const auto s = branch_values(p);
    for (int i = 0; i < 8; ++i) CHECK(std::fabs(s.points[i].norm() - 1.0) < 1e-12);
    // pairs from z = +-1 in y = 0, pairs from z = +-t in x = 0
    for (int i = 0; i < 4; ++i) CHECK(s.points[i].y == 0.0);
    for (int i = 4; i < 8; ++i) CHECK(s.points[i].x == 0.0);
}

TEST_CASE("diagonal rectangle formulas at a = b, rho = 1") {
    const double a = 2.0, t = 5.0;
    const auto s = branch_values(FamilyParams(a, a, t, 1.0));
    const double sx = std::sqrt(a * a - 1.0) / a;
    CHECK(s.points[0].x == Catch::Approx(-sx).margin(1e-14));
    CHECK(s.points[0].z == Catch::Approx(-1.0 / a).margin(1e-14));
    CHECK(s.points[2].x == Catch::Approx(-sx).margin(1e-14));
    CHECK(s.points[2].z == Catch::Approx(1.0 / a).margin(1e-14));
    const double sy = std::sqrt(t * t - a * a) / t;
    CHECK(s.points[4].y == Catch::Approx(sy).margin(1e-14));
    CHECK(s.points[4].z == Catch::Approx(-a / t).margin(1e-14));
    CHECK(s.points[6].z == Catch::Approx(a / t).margin(1e-14));
}

TEST_CASE("all eight coordinates have magnitude 1/sqrt2 or 0 at (sqrt2, sqrt2, 2)") {
    const double r2 = std::sqrt(2.0);
    const auto s = branch_values(FamilyParams(r2, r2, 2.0, 1.0));
    for (const auto& pt : s.points) {
        for (double c : {pt.x, pt.y, pt.z}) {
            const double m = std::fabs(c);
            CHECK((m < 1e-14 || std::fabs(m - 1.0 / r2) < 1e-14));
        }
    }
}

TEST_CASE("cube vertices appear exactly at the cubic tD member a = b = sqrt(3)") {
    // at t = 3 the eight values are (+-sqrt2/sqrt3, 0, +-1/sqrt3) and
    // (0, +-sqrt2/sqrt3, +-1/sqrt3): the vertices of a cube rotated 45
    // degrees about the vertical axis
    const double r3 = std::sqrt(3.0);
    const auto s = branch_values(FamilyParams(r3, r3, 3.0, 1.0));
    for (const auto& pt : s.points) {
        // in the 45-degree-rotated frame the cube vertex coordinates are
        // (+-sqrt(2/3), 0, +-sqrt(1/3)) and (0, +-sqrt(2/3), +-sqrt(1/3))
        const double big = std::sqrt(2.0 / 3.0), small = std::sqrt(1.0 / 3.0);
        const double m1 = std::fabs(pt.x) + std::fabs(pt.y); // one of them is 0
        CHECK(std::fabs(m1 - big) < 1e-13);
        CHECK(std::fabs(std::fabs(pt.z) - small) < 1e-13);
    }
}

TEST_CASE("antipodality holds on the diagonal with rho = 1") {
    for (auto [a, t] : {std::pair{2.0, 5.0}, std::pair{1.2, 1.9}, std::pair{3.5, 8.0}}) {
        const auto r = antipodality_test(FamilyParams(a, a, t, 1.0));
        CHECK(r.classification == MeeksClass::meeks);
        CHECK(r.matching_residual < 1e-12);
        CHECK(r.rho4_discrepancy < 1e-14);
    }
}

TEST_CASE("antipodality fails off the diagonal (any rho) and for rho != 1") {
    const auto r = antipodality_test(FamilyParams(1.5, 2.5, 4.0, 1.0));
    CHECK(r.classification == MeeksClass::non_meeks);
    CHECK(r.matching_residual > 1e-6);
    CHECK(r.rho4_from_pm1 == Catch::Approx(1.25 / 5.25).epsilon(1e-14));
    CHECK(r.rho4_from_pmt == Catch::Approx(13.75 / 9.75).epsilon(1e-14));

    const auto r2 = antipodality_test(FamilyParams(2.0, 2.0, 5.0, 3.0));
    CHECK(r2.classification == MeeksClass::non_meeks);
    CHECK(r2.matching_residual > 1e-6);
}

TEST_CASE("branch values commute with the swap up to relabeling") {
    const double rho = 1.37;
    const auto fwd = branch_values(FamilyParams(1.5, 2.5, 4.0, rho));
    // constructing with swapped arguments canonicalizes back and inverts rho,
    // so the point sets coincide
    const auto swp = branch_values(FamilyParams(2.5, 1.5, 4.0, 1.0 / rho));
    for (int i = 0; i < 8; ++i) {
        CHECK(swp.points[i].x == Catch::Approx(fwd.points[i].x).margin(1e-14));
        CHECK(swp.points[i].y == Catch::Approx(fwd.points[i].y).margin(1e-14));
        CHECK(swp.points[i].z == Catch::Approx(fwd.points[i].z).margin(1e-14));
    }
}

TEST_CASE("domain error on degenerate radicands") {
    CHECK_THROWS_AS(branch_values(FamilyParams(1.0 + 1e-18, 2.0, 3.0, 1.0)), std::domain_error);
}

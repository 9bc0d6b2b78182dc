#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "tpms/periods.hpp"
#include "tpms/specfun.hpp"

using tpms::FamilyParams;
using tpms::EdgePeriods;
using tpms::edge_periods;
using tpms::detail::edge_periods_raw;

TEST_CASE("FamilyParams canonicalization and validation") {
    const FamilyParams p(2.5, 1.5, 4.0);
    CHECK(p.a == 1.5);
    CHECK(p.b == 2.5);
    CHECK(p.swapped);
    CHECK_THROWS_AS(FamilyParams(1.0, 2.0, 3.0), std::domain_error);
    CHECK_THROWS_AS(FamilyParams(1.5, 3.0, 2.9), std::domain_error);
    CHECK(FamilyParams(1.5, 2.5, 2.5 + 1e-7).near_degenerate());
    CHECK_FALSE(FamilyParams(1.5, 2.5, 4.0).near_degenerate());
}

TEST_CASE("closed forms match quadrature at (2,2,5)") {
    const auto ep = edge_periods(FamilyParams(2.0, 2.0, 5.0));
    const auto cf = tpms::closed_form_periods_diagonal(2.0, 5.0);
    for (int k : {0, 1, 3, 4}) {
        CHECK(ep.I[k] == Catch::Approx(cf.I[k]).epsilon(1e-10));
        CHECK(ep.J[k] == Catch::Approx(cf.J[k]).epsilon(1e-10));
    }
    // paper anchors: I1 = (Kbar(m1)+Kbar(m2))/sqrt(t^2-1), I2+I4 = 2 K(m2)/sqrt(t^2-1)
    const auto m = tpms::moduli_from_at(2.0, 5.0);
    CHECK(m.m1 == Catch::Approx(1.0 / 8.0).epsilon(1e-15));
    CHECK(m.m2 == Catch::Approx(25.0 / 32.0).epsilon(1e-15));
    const double s = std::sqrt(24.0);
    CHECK(ep.I[0] == Catch::Approx((tpms::ellip_k_bar(m.m1) + tpms::ellip_k_bar(m.m2)) / s)
                         .epsilon(1e-10));
    CHECK(ep.I2pI4() == Catch::Approx(2.0 * tpms::ellip_k(m.m2) / s).epsilon(1e-10));
    // I4 > 0 because K(m2) > K(m1)
    CHECK(ep.I[3] > 0.0);
}

TEST_CASE("closed forms vs quadrature on an (a,t) grid") {
    double worst = 0.0;
    for (double a : {1.3, 2.0, 3.1}) {
        for (double mult : {1.4, 2.8}) {
            const double t = a * mult;
            const auto ep = edge_periods(FamilyParams(a, a, t));
            const auto cf = tpms::closed_form_periods_diagonal(a, t);
            for (int k : {0, 1, 3, 4}) {
                worst = std::max(worst, std::fabs(ep.I[k] - cf.I[k]) / cf.I[k]);
                worst = std::max(worst, std::fabs(ep.J[k] - cf.J[k]) / cf.J[k]);
            }
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("(sqrt2, 2): I2+I4 = 2K(2/3)/sqrt(3)") {
    const auto ep = edge_periods(FamilyParams(std::sqrt(2.0), std::sqrt(2.0), 2.0));
    CHECK(ep.I2pI4() ==
          Catch::Approx(2.0 * tpms::ellip_k(2.0 / 3.0) / std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("swap symmetry: I_k(b,a) = J_{6-k}(a,b)") {
    const auto fwd = edge_periods_raw(1.5, 2.5, 4.0);
    const auto swp = edge_periods_raw(2.5, 1.5, 4.0);
    for (int k = 0; k < 5; ++k) {
        CHECK(swp.I[k] == Catch::Approx(fwd.J[4 - k]).epsilon(1e-12));
        CHECK(swp.J[k] == Catch::Approx(fwd.I[4 - k]).epsilon(1e-12));
    }
    // canonicalized objects coincide, so q_value is swap-invariant by construction
    CHECK(tpms::q_value(1.5, 2.5, 4.0) == tpms::q_value(2.5, 1.5, 4.0));
}

TEST_CASE("Q limits and diagonal") {
    CHECK(std::fabs(tpms::q_value(2.0, 2.0, 5.0)) < 1e-10);
    CHECK(std::fabs(tpms::q_value(1.3, 1.3, 2.1)) < 1e-10);
    CHECK(tpms::q_value(1.5, 2.5, 2.5001) > 0.0);
    CHECK(tpms::q_value(1.5, 2.5, 1e6) < 0.0);
}

TEST_CASE("Q is rho-free: rescaling I by rho and J by 1/rho cancels") {
    const auto ep = edge_periods(FamilyParams(1.5, 2.5, 4.0));
    const double rho = 7.0;
    const double q0 = ep.I1pI5() / ep.I2pI4() - ep.J1pJ5() / ep.J2pJ4();
    const double q1 = (rho * ep.I1pI5()) / (rho * ep.I2pI4()) -
                      (ep.J1pJ5() / rho) / (ep.J2pJ4() / rho);
    CHECK(q0 == q1);
}

TEST_CASE("solve_rho") {
    CHECK(tpms::solve_rho(FamilyParams(2.0, 2.0, 5.0)) == Catch::Approx(1.0).epsilon(1e-10));
    // a point that does not satisfy Q = 0 must be rejected
    CHECK_THROWS_AS(tpms::solve_rho(FamilyParams(1.5, 2.5, 3.0), 1e-9),
                    tpms::inconsistency_error);
}

TEST_CASE("derivative closed forms vs central finite differences") {
    const double eps = 1e-5;
    for (auto [a, t] : {std::pair{2.0, 5.0}, std::pair{1.7, 4.0}}) {
        const auto d = tpms::diagonal_derivatives(a, t);
        const auto plus = edge_periods_raw(a, a + eps, t, 1e-13);
        const auto minus = edge_periods_raw(a, a - eps, t, 1e-13);
        auto fd = [&](int k, bool isJ) {
            return ((isJ ? plus.J[k] : plus.I[k]) - (isJ ? minus.J[k] : minus.I[k])) / (2.0 * eps);
        };
        const double scale = std::fabs(d.dJ4) + std::fabs(d.dJ2) + 1e-3;
        CHECK(std::fabs(fd(0, false) - d.dI1) / scale < 1e-6);
        CHECK(std::fabs(fd(1, false) - d.dI2) / scale < 1e-6);
        CHECK(std::fabs(fd(0, true) - d.dJ1) / scale < 1e-6);
        CHECK(std::fabs(fd(1, true) - d.dJ2) / scale < 1e-6);
        CHECK(std::fabs(fd(3, true) - d.dJ4) / scale < 1e-6);
        CHECK(std::fabs(fd(4, true) - d.dJ5) / scale < 1e-6);
        // (I1+I5)' = 0, so the one-sided difference is O(eps^2)
        const double i1i5_diff = (plus.I[0] + plus.I[4]) - (minus.I[0] + minus.I[4]);
        CHECK(std::fabs(i1i5_diff) < 10.0 * eps * eps);
    }
}

TEST_CASE("q_tilde matches Q(a, a+eps; t)/eps with first-order convergence") {
    const double a = 2.0, t = 5.0;
    const double qt = tpms::q_tilde_diagonal(a, t);
    CHECK(qt == Catch::Approx(-0.00685168772471564435).epsilon(1e-10)); // frozen
    double prev_err = 0.0;
    int level = 0;
    for (double eps : {1e-4, 5e-5, 2.5e-5}) {
        const double fd = tpms::q_value(a, a + eps, t, 1e-13) / eps;
        const double err = std::fabs(fd - qt);
        if (level > 0) {
            const double ratio = err / prev_err;
            CHECK(ratio > 0.3);
            CHECK(ratio < 0.7); // ~0.5 = first order in eps
        }
        prev_err = err;
        ++level;
    }
}

TEST_CASE("q_tilde sign change brackets the boundary curve") {
    // boundary_curve(1.5) = 7.593...: positive below, negative above
    CHECK(tpms::q_tilde_diagonal(1.5, 3.0) > 0.0);
    CHECK(tpms::q_tilde_diagonal(1.5, 10.0) < 0.0);
}

TEST_CASE("logarithmic bound and denominator inequality") {
    for (auto [a, b] : {std::pair{1.5, 2.5}, std::pair{1.2, 4.0}}) {
        const double t = 50.0;
        const auto ep = edge_periods_raw(a, b, t);
        CHECK(t * ep.J[4] > std::log((std::sqrt(t * t - b * b) + t) / b));
        const double tt = 1e4;
        const auto ep2 = edge_periods_raw(a, b, tt);
        CHECK(tt * ep2.I2pI4() > tt * ep2.J2pJ4());
    }
}

TEST_CASE("f(a,a) = pi and f > g off the diagonal") {
    auto f_int = [](double a, double b) {
        return tpms::quad::integrate_singular(
            [&](double z, double dl, double dr) {
                return (2.0 * z - a + b) / std::sqrt(dl * (z + 1.0) * dr * (b + z));
            },
            1.0, a, 1e-12);
    };
    auto g_int = [](double a, double b) {
        return tpms::quad::integrate_singular(
            [&](double z, double dl, double dr) {
                return (2.0 * z + a - b) / std::sqrt(dl * (z + 1.0) * (a + z) * dr);
            },
            1.0, b, 1e-12);
    };
    for (double a : {1.3, 1.9, 3.0})
        CHECK(f_int(a, a) == Catch::Approx(3.14159265358979324).epsilon(1e-10));
    for (auto [a, b] : {std::pair{1.5, 2.5}, std::pair{1.1, 2.0}, std::pair{2.0, 4.5}})
        CHECK(f_int(a, b) > g_int(a, b));
}

TEST_CASE("tail limit identity: lim t (J5 - I5) via Richardson vs closed integral") {
    const double a = 1.5, b = 2.5;
    const double lim = tpms::quad::integrate_improper_tail(
        [&](double z, double d) {
            return (a + b) / (std::sqrt(z * z - 1.0) * std::sqrt(d) * std::sqrt(z + a));
        },
        b, tpms::quad::TailSide::right, 1e-12);
    const double t1 = 1e4, t2 = 1e5;
    const auto e1 = edge_periods_raw(a, b, t1, 1e-13);
    const auto e2 = edge_periods_raw(a, b, t2, 1e-13);
    const double v1 = t1 * (e1.J[4] - e1.I[4]);
    const double v2 = t2 * (e2.J[4] - e2.I[4]);
    // leading correction ~ 1/t: Richardson with nodes t and 10t
    const double extrap = (10.0 * v2 - v1) / 9.0;
    CHECK(extrap == Catch::Approx(lim).epsilon(1e-5));
}

TEST_CASE("Weierstrass data identities at sample points") {
    const FamilyParams p(1.5, 2.5, 4.0, 1.3);
    const tpms::WeierstrassData w(p);
    for (std::complex<double> z : {std::complex<double>(0.3, 0.8), std::complex<double>(-2.1, 0.4),
                                   std::complex<double>(1.7, 2.2)}) {
        const auto p1 = w.phi1(z), p2 = w.phi2(z), dh = w.dh(z);
        CHECK(std::abs(p1 * p2 - dh * dh) < 1e-12 * std::abs(dh * dh));
        const auto g = w.gauss_map(z);
        const auto lhs = g * g;
        const auto rhs = -p.rho * p.rho * (z - p.b) / (z + p.a);
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
        // phi1 = G dh, phi2 = dh / G
        CHECK(std::abs(p1 - g * dh) < 1e-12 * std::abs(p1));
        CHECK(std::abs(p2 - dh / g) < 1e-12 * std::abs(p2));
    }
}

TEST_CASE("near-degenerate inputs are flagged") {
    CHECK(edge_periods(FamilyParams(1.5, 2.5, 2.5 + 1e-7)).near_degenerate);
    CHECK(edge_periods(FamilyParams(1.0 + 1e-7, 2.5, 4.0)).near_degenerate);
    CHECK_FALSE(edge_periods(FamilyParams(1.5, 2.5, 4.0)).near_degenerate);
}

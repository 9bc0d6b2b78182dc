#ifndef TPMS_PERIODS_HPP
#define TPMS_PERIODS_HPP

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include "tpms/quad.hpp"
#include "tpms/specfun.hpp"

namespace tpms {

// One point of the moduli space: branch parameters of the Weierstrass data
// normalized to v = (-t, -a, -1, 1, b, t).  Construction canonicalizes to
// a <= b (swapping only relabels the two Schwarz-Christoffel hexagons).
struct FamilyParams {
    double a;
    double b;
    double t;
    double rho = 1.0;
    bool swapped = false;

    FamilyParams(double a_in, double b_in, double t_in, double rho_in = 1.0)
        : a(a_in), b(b_in), t(t_in), rho(rho_in) {
        if (a > b) {
            std::swap(a, b);
            swapped = true;
            if (rho != 1.0) rho = 1.0 / rho;
        }
        if (!(1.0 < a) || !(b < t))
            throw std::domain_error("FamilyParams: need 1 < a <= b < t");
        if (!(rho > 0.0))
            throw std::domain_error("FamilyParams: rho must be positive");
    }

    bool diagonal() const { return a == b; }
    bool tetragonal(double tol = 1e-12) const { return std::fabs(a * b - t) <= tol * t; }
    // J4 diverges as t -> b+ and several factors degenerate as a -> 1+;
    // results computed here remain valid but lose accuracy predictably.
    bool near_degenerate() const { return (t - b) < 1e-6 || (a - 1.0) < 1e-6; }

    std::array<double, 6> vertices() const { return {-t, -a, -1.0, 1.0, b, t}; }
};

namespace wdata {

// Exponent tables of the three differentials at v_1..v_6.
inline constexpr std::array<double, 6> kPhi1Exp = {-0.5, -0.5, -0.5, -0.5, +0.5, -0.5};
inline constexpr std::array<double, 6> kPhi2Exp = {-0.5, +0.5, -0.5, -0.5, -0.5, -0.5};
inline constexpr std::array<double, 6> kDhExp = {-0.5, 0.0, -0.5, -0.5, 0.0, -0.5};

inline std::complex<double> branch_log(std::complex<double> w) {
    // principal log approached from the upper half-plane: arg in [0, pi]
    if (w.imag() == 0.0 && w.real() < 0.0)
        return {std::log(-w.real()), 3.14159265358979323846};
    return std::log(w);
}

inline std::complex<double> factor_product(const std::array<double, 6>& v,
                                           const std::array<double, 6>& e,
                                           std::complex<double> z) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < 6; ++j) {
        if (e[j] == 0.0) continue;
        acc += e[j] * branch_log(z - v[j]);
    }
    return std::exp(acc);
}

// phase of the factor product on the open edge (v_k, v_{k+1}), k = 0..4.
// The exponent sums are half-integers, so the phase is one of {1, i, -1, -i}
// and is produced exactly.
inline std::complex<double> edge_phase(const std::array<double, 6>& e, int k) {
    double s = 0.0;
    for (int j = k + 1; j < 6; ++j) s += e[j];
    int q = static_cast<int>(std::llround(2.0 * s)) % 4; // phase = exp(i pi q / 2)
    if (q < 0) q += 4;
    switch (q) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// |product| on edge k evaluated cancellation-free: dl, dr are exact distances
// to the edge endpoints.
inline double edge_modulus(const std::array<double, 6>& v, const std::array<double, 6>& e,
                           int k, double z, double dl, double dr) {
    double r = 1.0;
    for (int j = 0; j < 6; ++j) {
        if (e[j] == 0.0) continue;
        double d;
        if (j == k) d = dl;
        else if (j == k + 1) d = dr;
        else d = std::fabs(z - v[j]);
        r *= (e[j] > 0.0) ? std::sqrt(d) : 1.0 / std::sqrt(d);
    }
    return r;
}

inline double edge_modulus_integral(const std::array<double, 6>& v,
                                    const std::array<double, 6>& e, int k, double tol) {
    return quad::integrate_singular(
        [&](double z, double dl, double dr) { return edge_modulus(v, e, k, z, dl, dr); },
        v[static_cast<size_t>(k)], v[static_cast<size_t>(k) + 1], tol);
}

// Edge v6 -> infinity -> v1 in the chart u = 1/z: the integrand of any of the
// three forms becomes prod_j (1 - v_j u)^{e_j} du on (-1/t, 1/t) up to sign
// (sum of exponents is -2, which cancels the u^{-2} Jacobian exactly).
inline double edge6_modulus(const std::array<double, 6>& v, const std::array<double, 6>& e,
                            double u, double dl, double dr) {
    const double t = v[5];
    double r = 1.0;
    for (int j = 0; j < 6; ++j) {
        if (e[j] == 0.0) continue;
        double d;
        if (j == 0) d = t * dl;        // 1 - v1 u = 1 + t u = t (u + 1/t)
        else if (j == 5) d = t * dr;   // 1 - v6 u = 1 - t u = t (1/t - u)
        else d = std::fabs(1.0 - v[j] * u);
        r *= (e[j] > 0.0) ? std::sqrt(d) : 1.0 / std::sqrt(d);
    }
    return r;
}

inline double edge6_modulus_integral(const std::array<double, 6>& v,
                                     const std::array<double, 6>& e, double tol) {
    const double t = v[5];
    return quad::integrate_singular(
        [&](double u, double dl, double dr) { return edge6_modulus(v, e, u, dl, dr); },
        -1.0 / t, 1.0 / t, tol);
}

} // namespace wdata

// Evaluatable Weierstrass data (rho included in phi1/phi2po).
struct WeierstrassData {
    FamilyParams params;
    std::array<double, 6> v;

    explicit WeierstrassData(const FamilyParams& p) : params(p), v(p.vertices()) {}

    std::complex<double> phi1(std::complex<double> z) const {
        return params.rho * wdata::factor_product(v, wdata::kPhi1Exp, z);
    }
    std::complex<double> phi2(std::complex<double> z) const {
        return -wdata::factor_product(v, wdata::kPhi2Exp, z) / params.rho;
    }
    std::complex<double> dh(std::complex<double> z) const {
        return std::complex<double>(0.0, -1.0) * wdata::factor_product(v, wdata::kDhExp, z);
    }
    std::complex<double> gauss_map(std::complex<double> z) const {
        const std::complex<double> i(0.0, 1.0);
        return i * params.rho * std::exp(-0.5 * wdata::branch_log(z - v[1]) +
                                         0.5 * wdata::branch_log(z - v[4]));
    }
};

// The ten edge lengths of the two Schwarz-Christoffel hexagons, at rho = 1.
// I[k], J[k] store I_{k+1}, J_{k+1}; the middle edge (I3, J3) is carried for
// the mesh builder even though the period conditions never use it.
struct EdgePeriods {
    std::array<double, 5> I;
    std::array<double, 5> J;
    bool near_degenerate = false;

    double I1pI5() const { return I[0] + I[4]; }
    double I2pI4() const { return I[1] + I[3]; }
    double J1pJ5() const { return J[0] + J[4]; }
    double J2pJ4() const { return J[1] + J[3]; }
};

namespace detail {

inline EdgePeriods edge_periods_raw(double a, double b, double t, double tol = 1e-12) {
    const std::array<double, 6> v = {-t, -a, -1.0, 1.0, b, t};
    EdgePeriods ep{};
    for (int k = 0; k < 5; ++k) {
        try {
            ep.I[static_cast<size_t>(k)] = wdata::edge_modulus_integral(v, wdata::kPhi1Exp, k, tol);
            ep.J[static_cast<size_t>(k)] = wdata::edge_modulus_integral(v, wdata::kPhi2Exp, k, tol);
        } catch (const quad::accuracy_error& e) {
            throw quad::accuracy_error("edge_periods: edge " + std::to_string(k + 1) + ": " + e.what(),
                                       e.best_estimate, e.error_bound);
        }
    }
    ep.near_degenerate = (t - b) < 1e-6 || (a - 1.0) < 1e-6;
    return ep;
}

} // namespace detail

inline EdgePeriods edge_periods(const FamilyParams& params, double tol = 1e-12) {
    return detail::edge_periods_raw(params.a, params.b, params.t, tol);
}

// Q = (I1+I5)/(I2+I4) - (J1+J5)/(J2+J4); rho-free by construction.
inline double q_value(double a, double b, double t, double tol = 1e-12) {
    const FamilyParams p(a, b, t);
    const EdgePeriods ep = edge_periods(p, tol);
    return ep.I1pI5() / ep.I2pI4() - ep.J1pJ5() / ep.J2pJ4();
}

class inconsistency_error : public std::runtime_error {
  public:
    inconsistency_error(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

// With Q = 0, rho = sqrt((J1+J5)/(I1+I5)) closes both period conditions;
// the second one is re-checked as a consistency gate.
inline double solve_rho(const FamilyParams& params, double tol = 1e-9) {
    const EdgePeriods ep = edge_periods(params);
    const double rho = std::sqrt(ep.J1pJ5() / ep.I1pI5());
    const double second = std::fabs(rho * ep.I2pI4() - ep.J2pJ4() / rho) / ep.J2pJ4();
    if (second > tol)
        throw inconsistency_error(
            "solve_rho: second period condition violated (Q != 0 at these parameters), residual " +
                std::to_string(second),
            second);
    return rho;
}

// The eight a = b closed forms; the middle edge has no closed form here and
// is reported as NaN.
inline EdgePeriods closed_form_periods_diagonal(double a, double t) {
    const ModuliPair m = moduli_from_at(a, t);
    const double s = std::sqrt(t * t - 1.0);
    const double kb1 = ellip_k_bar(m.m1), kb2 = ellip_k_bar(m.m2);
    const double k1 = ellip_k(m.m1), k2 = ellip_k(m.m2);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EdgePeriods ep{};
    ep.I = {(kb1 + kb2) / s, (k1 + k2) / s, nan, (-k1 + k2) / s, (kb1 - kb2) / s};
    ep.J = {ep.I[4], ep.I[3], nan, ep.I[1], ep.I[0]};
    return ep;
}

// d/db at a = b of the individual periods and the combinations entering Q.
struct DiagonalDerivatives {
    double dI1, dI2, dI4, dI5;
    double dJ1, dJ2, dJ4, dJ5;
    double dI2pI4, dJ1pJ5, dJ2pJ4; // dI1pI5 vanishes identically
};

inline DiagonalDerivatives diagonal_derivatives(double a, double t) {
    const ModuliPair m = moduli_from_at(a, t);
    const double s = std::sqrt(t * t - 1.0);
    const double k1 = ellip_k(m.m1), k2 = ellip_k(m.m2);
    const double e1 = ellip_e(m.m1), e2 = ellip_e(m.m2);
    const double kb1 = ellip_k_bar(m.m1), kb2 = ellip_k_bar(m.m2);
    const double eb1 = ellip_e_bar(m.m1), eb2 = ellip_e_bar(m.m2);
    const double ta = t * t - a * a;
    const double a1 = a * a - 1.0;

    DiagonalDerivatives d{};
    d.dI1 = kb2 / (2.0 * a * s);
    d.dI5 = -d.dI1;
    d.dI2 = k2 / (2.0 * a * s);
    d.dI4 = d.dI2;
    d.dJ1 = -kb2 / (2.0 * a * s) - (a / (s * ta)) * (-kb1 + kb2) + (s / ta) * (a / a1) * (-eb1 + eb2);
    d.dJ2 = k2 / (2.0 * a * s) - (a / (s * a1)) * (-k1 + k2) + (s / ta) * (a / a1) * (-e1 + e2);
    d.dJ4 = k2 / (2.0 * a * s) - (a / (s * a1)) * (k1 + k2) + (s / ta) * (a / a1) * (e1 + e2);
    d.dJ5 = kb2 / (2.0 * a * s) - (a / (s * ta)) * (-kb1 - kb2) + (s / ta) * (a / a1) * (-eb1 - eb2);
    d.dI2pI4 = k2 / (a * s);
    d.dJ1pJ5 = 2.0 * a * kb1 / (s * ta) - 2.0 * a * eb1 * s / (a1 * ta);
    d.dJ2pJ4 = k2 / (a * s) - 2.0 * a * k2 / (s * a1) + 2.0 * a * e2 * s / (a1 * ta);
    return d;
}

// Analytic extension Q~(a,a;t) of Q/(b-a) to the diagonal.  Matches the
// finite difference Q(a, a+eps; t)/eps; its vanishing locus is the
// Kbar(m1) E(m2) + Ebar(m1) K(m2) = Kbar(m1) K(m2) boundary curve.
inline double q_tilde_diagonal(double a, double t) {
    const ModuliPair m = moduli_from_at(a, t);
    const double kb1 = ellip_k_bar(m.m1);
    const double eb1 = ellip_e_bar(m.m1);
    const double k2 = ellip_k(m.m2);
    const double e2 = ellip_e(m.m2);
    const double pref = a * (t * t - 1.0) / ((a * a - 1.0) * (t * t - a * a));
    return pref * (kb1 * e2 + eb1 * k2 - kb1 * k2) / (k2 * k2);
}

} // namespace tpms

#endif

#ifndef TPMS_SPECFUN_HPP
#define TPMS_SPECFUN_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace tpms {

// Complete elliptic integrals in the parameter-m convention:
//   K(m) = int_0^{pi/2} (1 - m sin^2)^{-1/2},  E(m) = int_0^{pi/2} (1 - m sin^2)^{+1/2}.
// Computed by the arithmetic-geometric mean; E uses the c-sequence accumulated
// alongside the AGM.  For m within ~1e-8 of 1, E switches to the complementary
// expansion so relative accuracy survives the K-side cancellation.

namespace detail {

struct AgmResult {
    double k;        // K(m)
    double csum;     // sum 2^{n-1} c_n^2, with c_0^2 = m
};

inline AgmResult agm_ke(double m) {
    const double pi = 3.14159265358979323846;
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    double csum = 0.5 * m;          // 2^{-1} c_0^2
    double pow2 = 0.5;
    double prev_c = 2.0;
    for (int n = 0; n < 64; ++n) {
        const double c = 0.5 * (a - b);
        // quadratic convergence: once c stalls, a and b agree to rounding
        if (c <= 4.4e-16 * a || c >= prev_c) return {pi / (2.0 * a), csum};
        prev_c = c;
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        a = an;
        b = bn;
        pow2 *= 2.0;
        csum += pow2 * c * c;
    }
    throw std::runtime_error("specfun: AGM failed to converge");
}

} // namespace detail

inline double ellip_k(double m) {
    if (!(m >= 0.0) || m >= 1.0)
        throw std::domain_error("ellip_k: m must lie in [0, 1), got " + std::to_string(m));
    return detail::agm_ke(m).k;
}

inline double ellip_e(double m) {
    if (!(m >= 0.0) || m > 1.0)
        throw std::domain_error("ellip_e: m must lie in [0, 1], got " + std::to_string(m));
    if (m == 1.0) return 1.0;
    const double mc = 1.0 - m;
    if (mc < 1e-8) {
        // E(m) = 1 + mc/2 (log(4/sqrt(mc)) - 1/2) + O(mc^2 log mc)
        return 1.0 + 0.5 * mc * (std::log(4.0 / std::sqrt(mc)) - 0.5);
    }
    const auto r = detail::agm_ke(m);
    return r.k * (1.0 - r.csum);
}

inline double ellip_k_bar(double m) {
    if (!(m > 0.0) || m > 1.0)
        throw std::domain_error("ellip_k_bar: m must lie in (0, 1]");
    return ellip_k(1.0 - m);
}

inline double ellip_e_bar(double m) {
    if (!(m >= 0.0) || m > 1.0)
        throw std::domain_error("ellip_e_bar: m must lie in [0, 1]");
    return ellip_e(1.0 - m);
}

// Elliptic moduli of the a = b locus: m1 = (a^2-1)/(t^2-1), m2 = (t^2/a^2) m1.
struct ModuliPair {
    double m1;
    double m2;
};

inline ModuliPair moduli_from_at(double a, double t) {
    if (!(a > 1.0) || !(t > a))
        throw std::domain_error("moduli_from_at: need 1 < a < t");
    const double m1 = (a * a - 1.0) / (t * t - 1.0);
    const double m2 = (t * t) / (a * a) * m1;
    if (!(0.0 < m1 && m1 < m2 && m2 < 1.0))
        throw std::domain_error("moduli_from_at: moduli escaped (0,1) ordering");
    return {m1, m2};
}

} // namespace tpms

#endif

#ifndef TPMS_SOLVER_HPP
#define TPMS_SOLVER_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tpms/periods.hpp"
#include "tpms/roots.hpp"
#include "tpms/specfun.hpp"

namespace tpms {

struct SolveReport {
    double a = 0.0;
    double b = 0.0;
    double t = 0.0;
    double rho = 1.0;
    double residual_q = 0.0;       // |Q| at the solution
    double residual_period = 0.0;  // relative defect of the second condition after rho
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
    bool found = false;
    std::vector<std::string> warnings;
    std::vector<std::pair<double, double>> trace; // (parameter, residual) samples seen
};

class bracket_error : public std::runtime_error {
  public:
    bracket_error(const std::string& what, std::vector<std::pair<double, double>> samples)
        : std::runtime_error(what), samples(std::move(samples)) {}
    std::vector<std::pair<double, double>> samples;
};

// Solve Q(a,b;t) = 0 in t for fixed 1 < a < b.  Q > 0 near t = b and
// Q -> -infinity as t grows, so a geometric expansion from b always finds a
// sign change; Brent finishes the job.
inline SolveReport solve_odelta(double a, double b, double tol = 1e-10) {
    if (!(1.0 < a) || !(a < b))
        throw std::domain_error("solve_odelta: need 1 < a < b (a = b is the trivial oD locus)");
    const double quad_tol = std::min(1e-12, 0.01 * tol);
    auto q = [&](double t) { return q_value(a, b, t, quad_tol); };

    SolveReport rep{};
    rep.a = a;
    rep.b = b;

    const double delta = 1e-3;
    double t_lo = b * (1.0 + delta);
    double f_lo = q(t_lo);
    rep.trace.emplace_back(t_lo, f_lo);
    if (f_lo <= 0.0) {
        // extremely rare: move closer to b where Q is provably positive
        t_lo = b * (1.0 + 1e-7);
        f_lo = q(t_lo);
        rep.trace.emplace_back(t_lo, f_lo);
    }
    double t_hi = t_lo, f_hi = f_lo;
    bool bracketed = false;
    for (int k = 0; k < 60; ++k) {
        const double step = std::ldexp(delta, k) * b;
        t_hi = b + step + delta * b;
        if (t_hi > 1e8 * b) break;
        f_hi = q(t_hi);
        rep.trace.emplace_back(t_hi, f_hi);
        if (f_hi < 0.0) {
            bracketed = true;
            break;
        }
        t_lo = t_hi;
        f_lo = f_hi;
    }
    if (!bracketed)
        throw bracket_error("solve_odelta: no sign change of Q up to t = 1e8 b", rep.trace);

    const auto r = roots::brent(q, t_lo, t_hi, f_lo, f_hi, 1e-13 * b, tol);
    rep.t = r.x;
    rep.residual_q = std::fabs(r.fx);
    rep.bracket_lo = t_lo;
    rep.bracket_hi = t_hi;
    rep.iterations = r.iterations;

    FamilyParams p(a, b, rep.t);
    rep.rho = solve_rho(p, 1e-6);
    {
        const EdgePeriods ep = edge_periods(p);
        rep.residual_period =
            std::fabs(rep.rho * ep.I2pI4() - ep.J2pJ4() / rep.rho) / ep.J2pJ4();
        if (ep.near_degenerate) rep.warnings.push_back("near-degenerate parameters");
    }
    rep.found = rep.residual_q <= tol;
    return rep;
}

// Tetragonal residual (I1+I5) - (I2+I4) at t = a b; its interior root is the
// tDelta branch.  The diagonal a = b is always a root (tD), so the scan stays
// strictly inside (1, b).
inline double tdelta_residual(double a, double b, double tol = 1e-12) {
    const EdgePeriods ep = detail::edge_periods_raw(a, b, a * b, tol);
    return ep.I1pI5() - ep.I2pI4();
}

inline SolveReport solve_tdelta(double b, double tol = 1e-10) {
    if (!(b > 1.0)) throw std::domain_error("solve_tdelta: need b > 1");
    const double quad_tol = std::min(1e-12, 0.01 * tol);
    auto r = [&](double a) { return tdelta_residual(a, b, quad_tol); };

    SolveReport rep{};
    rep.b = b;

    const int n = 80;
    const double lo = 1.0 + 1e-4, hi = b * (1.0 - 1e-4);
    double prev_a = lo, prev_f = r(lo);
    rep.trace.emplace_back(prev_a, prev_f);
    double blo = 0.0, bhi = 0.0, flo = 0.0, fhi = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= n; ++i) {
        const double ai = lo + (hi - lo) * i / n;
        const double fi = r(ai);
        rep.trace.emplace_back(ai, fi);
        if (prev_f == 0.0 || prev_f * fi < 0.0) {
            blo = prev_a;
            bhi = ai;
            flo = prev_f;
            fhi = fi;
            bracketed = true;
            break;
        }
        prev_a = ai;
        prev_f = fi;
    }
    if (!bracketed) {
        rep.found = false;
        rep.warnings.push_back("no interior sign change of (I1+I5)-(I2+I4) on (1, b); "
                               "expected for b < a* = 2.1796604316786983");
        return rep;
    }

    const auto res = roots::brent(r, blo, bhi, flo, fhi, 1e-13 * b, 0.0);
    rep.a = res.x;
    rep.t = res.x * b;
    rep.bracket_lo = blo;
    rep.bracket_hi = bhi;
    rep.iterations = res.iterations;

    const EdgePeriods ep = detail::edge_periods_raw(rep.a, b, rep.t, quad_tol);
    rep.residual_q = std::fabs(ep.I1pI5() / ep.I2pI4() - ep.J1pJ5() / ep.J2pJ4());
    const double rel = std::fabs(ep.I1pI5() - ep.I2pI4()) / ep.I2pI4();
    rep.found = rel <= tol;
    rep.rho = solve_rho(FamilyParams(rep.a, b, rep.t), 1e-6);
    // ab = t forces I_k = J_{k+3} in the rho-included normalization; at
    // rho = 1 the four ratios J_{k+3}/I_k, J_k/I_{k+3} all equal rho^2
    {
        const double r2 = rep.rho * rep.rho;
        double sym = 0.0;
        for (int k = 0; k < 2; ++k) {
            sym = std::max(sym, std::fabs(ep.J[static_cast<size_t>(k) + 3] / ep.I[static_cast<size_t>(k)] - r2));
            sym = std::max(sym, std::fabs(ep.J[static_cast<size_t>(k)] / ep.I[static_cast<size_t>(k) + 3] - r2));
        }
        if (sym > 1e-9)
            rep.warnings.push_back("tetragonal period symmetry I_k = J_{k+3} (up to rho^2) violated: " +
                                   std::to_string(sym));
    }
    rep.residual_period = rel;
    return rep;
}

// Boundary curve of the intersection with the Meeks locus:
// Kbar(m1) E(m2) + Ebar(m1) K(m2) = Kbar(m1) K(m2) solved for t > a.
inline double intersection_residual(double a, double t) {
    const ModuliPair m = moduli_from_at(a, t);
    return ellip_k_bar(m.m1) * ellip_e(m.m2) + ellip_e_bar(m.m1) * ellip_k(m.m2) -
           ellip_k_bar(m.m1) * ellip_k(m.m2);
}

inline double boundary_curve(double a, double tol = 1e-12) {
    if (!(a > 1.0)) throw std::domain_error("boundary_curve: need a > 1");
    auto f = [&](double t) { return intersection_residual(a, t); };
    double t_lo = a * (1.0 + 1e-8);
    double f_lo = f(t_lo);
    double t_hi = t_lo, f_hi = f_lo;
    bool bracketed = false;
    for (int k = 0; k < 80; ++k) {
        t_hi = a * (1.0 + 1e-8) * std::pow(1.5, k + 1);
        if (t_hi > 1e8 * a) break;
        f_hi = f(t_hi);
        if (f_lo == 0.0 || f_lo * f_hi < 0.0) {
            bracketed = true;
            break;
        }
        t_lo = t_hi;
        f_lo = f_hi;
    }
    if (!bracketed)
        throw bracket_error("boundary_curve: no sign change in t on (a, 1e8 a)", {});
    const auto r = roots::brent(f, t_lo, t_hi, f_lo, f_hi, 1e-15 * a, tol);
    return r.x;
}

// a* with 2E(m) = K(m), m = a^2/(1+a^2): the tD/tDelta bifurcation point.
inline double solve_tstar() {
    auto g = [](double m) { return 2.0 * ellip_e(m) - ellip_k(m); };
    const auto r = roots::brent(g, 0.5, 1.0 - 1e-12, 1e-16, 0.0, 300);
    const double m = r.x;
    return std::sqrt(m / (1.0 - m));
}

// Numerical evidence for the uniqueness conjecture: count sign changes of
// Q(a,b;.) on a log grid over (b, 1e4 b) and refine each to a root.
struct RootCount {
    int sign_changes = 0;
    std::vector<double> roots;
};

inline RootCount count_roots(double a, double b, int grid = 200, double quad_tol = 1e-10) {
    if (!(1.0 < a) || !(a < b)) throw std::domain_error("count_roots: need 1 < a < b");
    if (grid < 2) throw std::domain_error("count_roots: grid must have at least 2 points");
    auto q = [&](double t) { return q_value(a, b, t, quad_tol); };
    RootCount rc{};
    const double lo = std::log(b * (1.0 + 1e-4)), hi = std::log(1e4 * b);
    double prev_t = std::exp(lo), prev_f = q(prev_t);
    for (int i = 1; i <= grid; ++i) {
        const double ti = std::exp(lo + (hi - lo) * i / grid);
        const double fi = q(ti);
        if (prev_f * fi < 0.0) {
            ++rc.sign_changes;
            rc.roots.push_back(roots::brent(q, prev_t, ti, prev_f, fi, 1e-12 * b, 0.0).x);
        }
        prev_t = ti;
        prev_f = fi;
    }
    return rc;
}

} // namespace tpms

#endif

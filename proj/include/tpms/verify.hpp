#ifndef TPMS_VERIFY_HPP
#define TPMS_VERIFY_HPP

#include <cmath>
#include <string>
#include <vector>

#include "tpms/gauss.hpp"
#include "tpms/periods.hpp"
#include "tpms/solver.hpp"
#include "tpms/surface.hpp"

namespace tpms {
namespace verify {

struct SuiteResult {
    std::string name;
    bool pass = false;
    double worst_residual = 0.0;
    std::string note;
};

namespace vdetail {

inline void track(double r, double limit, double& worst, bool& ok) {
    worst = std::max(worst, r);
    if (!(r <= limit)) ok = false;
}

} // namespace vdetail

inline SuiteResult run_specfun() {
    using vdetail::track;
    SuiteResult res{"specfun", true, 0.0, "Legendre relation + tetragonal moduli"};
    const double pi_half = 1.57079632679489661923;
    for (double m = 0.01; m < 0.995; m += 0.02) {
        const double r = std::fabs(ellip_k_bar(m) * ellip_e(m) + ellip_e_bar(m) * ellip_k(m) -
                                   ellip_k_bar(m) * ellip_k(m) - pi_half);
        track(r, 1e-12, res.worst_residual, res.pass);
    }
    for (double t : {1.6, 2.0, 3.0, 4.7509195974257688}) {
        const auto m = moduli_from_at(std::sqrt(t), t);
        track(std::fabs(m.m1 + m.m2 - 1.0), 1e-14, res.worst_residual, res.pass);
    }
    return res;
}

inline SuiteResult run_periods() {
    using vdetail::track;
    SuiteResult res{"periods", true, 0.0, "closed forms vs quadrature, swap, diagonal Q"};
    for (double a : {1.4, 2.2}) {
        for (double mult : {1.5, 3.0}) {
            const double t = a * mult;
            const auto ep = edge_periods(FamilyParams(a, a, t));
            const auto cf = closed_form_periods_diagonal(a, t);
            for (int k : {0, 1, 3, 4}) {
                track(std::fabs(ep.I[static_cast<size_t>(k)] - cf.I[static_cast<size_t>(k)]) /
                          cf.I[static_cast<size_t>(k)],
                      1e-9, res.worst_residual, res.pass);
            }
        }
    }
    {
        const auto fwd = detail::edge_periods_raw(1.5, 2.5, 4.0);
        const auto swp = detail::edge_periods_raw(2.5, 1.5, 4.0);
        for (int k = 0; k < 5; ++k)
            track(std::fabs(swp.I[static_cast<size_t>(k)] - fwd.J[static_cast<size_t>(4 - k)]) /
                      fwd.J[static_cast<size_t>(4 - k)],
                  1e-11, res.worst_residual, res.pass);
    }
    track(std::fabs(q_value(1.7, 1.7, 3.3)), 1e-10, res.worst_residual, res.pass);
    {
        // f(a,a) = pi
        const double a = 1.8;
        const double f = quad::integrate_singular(
            [&](double z, double dl, double dr) {
                return 2.0 * z / std::sqrt(dl * (z + 1.0) * dr * (a + z));
            },
            1.0, a, 1e-12);
        track(std::fabs(f - 3.14159265358979324), 1e-10, res.worst_residual, res.pass);
    }
    return res;
}

inline SuiteResult run_derivatives() {
    using vdetail::track;
    SuiteResult res{"derivatives", true, 0.0, "analytic d/db vs central differences, eps=1e-5"};
    const double eps = 1e-5;
    for (auto [a, t] : {std::pair{2.0, 5.0}, std::pair{1.7, 4.0}}) {
        const auto d = diagonal_derivatives(a, t);
        const auto plus = detail::edge_periods_raw(a, a + eps, t, 1e-13);
        const auto minus = detail::edge_periods_raw(a, a - eps, t, 1e-13);
        const double scale = std::fabs(d.dJ4) + std::fabs(d.dJ2) + 1e-3;
        auto fd = [&](int k, bool isJ) {
            return ((isJ ? plus.J[static_cast<size_t>(k)] : plus.I[static_cast<size_t>(k)]) -
                    (isJ ? minus.J[static_cast<size_t>(k)] : minus.I[static_cast<size_t>(k)])) /
                   (2.0 * eps);
        };
        track(std::fabs(fd(0, false) - d.dI1) / scale, 1e-6, res.worst_residual, res.pass);
        track(std::fabs(fd(1, false) - d.dI2) / scale, 1e-6, res.worst_residual, res.pass);
        track(std::fabs(fd(0, true) - d.dJ1) / scale, 1e-6, res.worst_residual, res.pass);
        track(std::fabs(fd(1, true) - d.dJ2) / scale, 1e-6, res.worst_residual, res.pass);
        track(std::fabs(fd(3, true) - d.dJ4) / scale, 1e-6, res.worst_residual, res.pass);
        track(std::fabs(fd(4, true) - d.dJ5) / scale, 1e-6, res.worst_residual, res.pass);
        const double qt = q_tilde_diagonal(a, t);
        const double fdq = q_value(a, a + eps, t, 1e-13) / eps;
        track(std::fabs(fdq - qt) / std::fabs(qt), 1e-3, res.worst_residual, res.pass);
    }
    return res;
}

inline SuiteResult run_gauss() {
    using vdetail::track;
    SuiteResult res{"gauss", true, 0.0, "antipodal matching on/off the diagonal"};
    for (double a : {1.3, 2.0, 3.1}) {
        const auto r = antipodality_test(FamilyParams(a, a, 2.0 * a, 1.0));
        track(r.matching_residual, 1e-12, res.worst_residual, res.pass);
        if (r.classification != MeeksClass::meeks) res.pass = false;
    }
    for (auto [a, b] : {std::pair{1.3, 1.9}, std::pair{1.5, 2.5}}) {
        const auto r = antipodality_test(FamilyParams(a, b, 2.0 * b, 1.0));
        if (r.classification != MeeksClass::non_meeks) res.pass = false;
        if (r.matching_residual < 1e-6) res.pass = false;
    }
    return res;
}

inline SuiteResult run_surface() {
    using vdetail::track;
    SuiteResult res{"surface", true, 0.0, "D->P anchor, tD* cell ratio, hexagon geometry"};
    const double r3 = std::sqrt(3.0);
    track(std::fabs(conjugate_cell_ratio(FamilyParams(r3, r3, 3.0, 1.0)) - 1.0), 1e-8,
          res.worst_residual, res.pass);
    const double astar = solve_tstar();
    track(std::fabs(conjugate_cell_ratio(FamilyParams(astar, astar, astar * astar, 1.0)) -
                    1.05677755),
          1e-6, res.worst_residual, res.pass);
    {
        const auto rep = solve_odelta(1.5, 2.5);
        const auto hex = fundamental_hexagon(FamilyParams(rep.a, rep.b, rep.t, rep.rho), 4, 0.0, 1e-9);
        BoxReport box;
        (void)extend_to_lattice_cell(hex, &box);
        track(box.weld_residual, 1e-8, res.worst_residual, res.pass);
        if (box.euler_characteristic != -4) res.pass = false;
    }
    return res;
}

inline std::vector<SuiteResult> run(const std::string& which) {
    std::vector<SuiteResult> out;
    const bool all = which == "all";
    if (all || which == "specfun") out.push_back(run_specfun());
    if (all || which == "periods") out.push_back(run_periods());
    if (all || which == "derivatives") out.push_back(run_derivatives());
    if (all || which == "gauss") out.push_back(run_gauss());
    if (all || which == "surface") out.push_back(run_surface());
    return out;
}

} // namespace verify
} // namespace tpms

#endif

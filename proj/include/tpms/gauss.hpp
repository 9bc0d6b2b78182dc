#ifndef TPMS_GAUSS_HPP
#define TPMS_GAUSS_HPP

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tpms/periods.hpp"

namespace tpms {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {s * x, s * y, s * z}; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline Vec3 cross(const Vec3& u, const Vec3& v) {
    return {u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
}
inline double dot(const Vec3& u, const Vec3& v) { return u.x * v.x + u.y * v.y + u.z * v.z; }

// Stereographic images of +-G at the four branch parameters z in {1, -1, t, -t}.
// The pairs from z = +-1 lie in the plane y = 0, the pairs from z = +-t in x = 0.
struct BranchValueSet {
    // points[2i], points[2i+1] = sigma(+G), sigma(-G) at parameter branch_param[i]
    std::array<Vec3, 8> points;
    std::array<double, 4> branch_param;
    bool antipodal = false;
    double rho_used = 1.0;
    // the two rho^4 candidates whose equality characterizes antipodality
    double rho4_from_pm1 = 0.0;
    double rho4_from_pmt = 0.0;
};

inline BranchValueSet branch_values(const FamilyParams& params) {
    const double a = params.a, b = params.b, t = params.t, rho = params.rho;
    const double r2 = rho * rho;
    const std::array<double, 4> rad = {(a + 1.0) * (b - 1.0), (a - 1.0) * (b + 1.0),
                                       (t + a) * (t - b), (t - a) * (t + b)};
    for (double r : rad)
        if (!(r > 0.0)) throw std::domain_error("branch_values: non-positive radicand");

    BranchValueSet s{};
    s.branch_param = {1.0, -1.0, t, -t};
    s.rho_used = rho;

    auto pair_x = [&](double plus, double minus, int slot) {
        // points in the plane y = 0
        const double den = r2 * minus + plus;
        const double sq = 2.0 * rho * std::sqrt(plus * minus);
        const double zc = (r2 * minus - plus) / den;
        s.points[static_cast<size_t>(2 * slot)] = {-sq / den, 0.0, zc};
        s.points[static_cast<size_t>(2 * slot) + 1] = {sq / den, 0.0, zc};
    };
    auto pair_y = [&](double plus, double minus, int slot) {
        // points in the plane x = 0
        const double den = r2 * minus + plus;
        const double sq = 2.0 * rho * std::sqrt(plus * minus);
        const double zc = (r2 * minus - plus) / den;
        s.points[static_cast<size_t>(2 * slot)] = {0.0, sq / den, zc};
        s.points[static_cast<size_t>(2 * slot) + 1] = {0.0, -sq / den, zc};
    };
    pair_x(a + 1.0, b - 1.0, 0); // z = +1
    pair_x(a - 1.0, b + 1.0, 1); // z = -1
    pair_y(t + a, t - b, 2);     // z = +t
    pair_y(t - a, t + b, 3);     // z = -t

    s.rho4_from_pm1 = (a * a - 1.0) / (b * b - 1.0);
    s.rho4_from_pmt = (t * t - a * a) / (t * t - b * b);
    return s;
}

// Exhaustive antipodal matching of eight points: 105 perfect pairings.
// Returns the smallest over pairings of the largest |p + q| over its pairs.
inline double best_antipodal_matching(const std::array<Vec3, 8>& pts) {
    double best = std::numeric_limits<double>::infinity();
    // recursive enumeration of perfect matchings
    struct Rec {
        const std::array<Vec3, 8>& p;
        std::array<bool, 8> used{};
        double best = std::numeric_limits<double>::infinity();
        void go(double worst) {
            int first = -1;
            for (int i = 0; i < 8; ++i)
                if (!used[static_cast<size_t>(i)]) { first = i; break; }
            if (first < 0) {
                best = std::min(best, worst);
                return;
            }
            used[static_cast<size_t>(first)] = true;
            for (int j = first + 1; j < 8; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                used[static_cast<size_t>(j)] = true;
                const double r = (p[static_cast<size_t>(first)] + p[static_cast<size_t>(j)]).norm();
                const double w = std::max(worst, r);
                if (w < best) go(w);
                used[static_cast<size_t>(j)] = false;
            }
            used[static_cast<size_t>(first)] = false;
        }
    } rec{pts};
    rec.go(0.0);
    best = rec.best;
    return best;
}

enum class MeeksClass { meeks, non_meeks };

struct AntipodalityReport {
    MeeksClass classification = MeeksClass::non_meeks;
    double matching_residual = 0.0; // best exhaustive-matching defect
    double rho4_from_pm1 = 0.0;
    double rho4_from_pmt = 0.0;
    double rho4_discrepancy = 0.0;
};

// Meeks iff a = b and rho = 1; decided by exhaustive matching so the
// algebraic characterization stays testable against it.
inline AntipodalityReport antipodality_test(const FamilyParams& params, double tol = 1e-10) {
    const BranchValueSet s = branch_values(params);
    AntipodalityReport r{};
    r.rho4_from_pm1 = s.rho4_from_pm1;
    r.rho4_from_pmt = s.rho4_from_pmt;
    r.rho4_discrepancy = std::fabs(s.rho4_from_pm1 - s.rho4_from_pmt);
    r.matching_residual = best_antipodal_matching(s.points);
    r.classification = (r.matching_residual <= tol) ? MeeksClass::meeks : MeeksClass::non_meeks;
    return r;
}

} // namespace tpms

#endif

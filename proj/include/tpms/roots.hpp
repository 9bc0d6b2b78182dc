#ifndef TPMS_ROOTS_HPP
#define TPMS_ROOTS_HPP

#include <cmath>
#include <stdexcept>
#include <utility>

namespace tpms {
namespace roots {

struct BrentResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

// Brent's method on a sign-changing bracket [lo, hi] with both endpoint
// values already known.
template <class F>
BrentResult brent(F&& f, double lo, double hi, double flo, double fhi,
                  double xtol = 1e-14, double ftol = 0.0, int max_iter = 200) {
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if (flo * fhi > 0.0) throw std::invalid_argument("brent: endpoints do not bracket a root");

    double a = lo, b = hi, c = hi;
    double fa = flo, fb = fhi, fc = fhi;
    double d = 0.0, e = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * 1e-16 * std::fabs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0 || std::fabs(fb) <= ftol) break;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return {b, fb, it};
}

template <class F>
BrentResult brent(F&& f, double lo, double hi, double xtol = 1e-14, double ftol = 0.0,
                  int max_iter = 200) {
    const double flo = f(lo);
    const double fhi = f(hi);
    return brent(std::forward<F>(f), lo, hi, flo, fhi, xtol, ftol, max_iter);
}

} // namespace roots
} // namespace tpms

#endif

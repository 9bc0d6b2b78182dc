#ifndef TPMS_QUAD_HPP
#define TPMS_QUAD_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace tpms {
namespace quad {

// Thrown when the level budget runs out before the tolerance is met.  Carries
// the best estimate and the last level-to-level difference as an error bound.
class accuracy_error : public std::runtime_error {
  public:
    accuracy_error(const std::string& what, double best, double bound)
        : std::runtime_error(what), best_estimate(best), error_bound(bound) {}
    double best_estimate;
    double error_bound;
};

namespace detail {

// tanh-sinh node on (-1,1).  The distances to the endpoints are stored
// directly (dp = 1+x, dm = 1-x) so integrands with endpoint singularities
// can be evaluated without cancellation.
struct TsNode {
    double dp;
    double dm;
    double w;
};

// Progressive tanh-sinh abscissas: level L holds the nodes at odd multiples
// of h_L = 2^-L (level 0 holds t = 0, 1, 2, ...).  Built once per process.
class TsTable {
  public:
    static constexpr int kMaxLevel = 12;

    static const TsTable& instance() {
        static const TsTable table;
        return table;
    }

    const std::vector<TsNode>& level(int l) const { return levels_[static_cast<size_t>(l)]; }

  private:
    TsTable() {
        const double pi_half = 1.57079632679489661923;
        levels_.resize(kMaxLevel + 1);
        for (int l = 0; l <= kMaxLevel; ++l) {
            const double h = std::ldexp(1.0, -l);
            const int stride = (l == 0) ? 1 : 2;
            const int start = (l == 0) ? 0 : 1;
            for (int k = start;; k += stride) {
                const double t = k * h;
                const double u = pi_half * std::sinh(t);
                // 1 -+ tanh(u) without cancellation
                const double e2u = std::exp(-2.0 * u);
                const double dm = 2.0 * e2u / (1.0 + e2u);
                const double dp = 2.0 / (1.0 + e2u);
                const double sech2 = dp * dm;
                const double w = pi_half * std::cosh(t) * sech2;
                if (dm < 1e-290 || w < 1e-290) break;
                levels_[static_cast<size_t>(l)].push_back({dp, dm, w});
                if (t > 7.0) break;
            }
        }
    }

    std::vector<std::vector<TsNode>> levels_;
};

template <class T> double abs_of(T v) { return std::abs(v); }

} // namespace detail

// Integrate f over (p, q).  The integrand is called as f(z, dl, dr) with
// dl = z - p and dr = q - z supplied to full precision; integrable endpoint
// behaviour of type dl^{-1/2} or dr^{-1/2} is absorbed by the transform.
// Endpoints themselves are never evaluated.
template <class F>
auto integrate_singular(F&& f, double p, double q, double tol)
    -> decltype(f(0.0, 0.0, 0.0)) {
    using R = decltype(f(0.0, 0.0, 0.0));
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_singular: tol must be > 0");
    if (!(q > p)) throw std::invalid_argument("integrate_singular: need p < q");
    const auto& table = detail::TsTable::instance();
    const double c = 0.5 * (p + q);
    const double s = 0.5 * (q - p);

    auto eval = [&](const detail::TsNode& n, bool mirror) -> R {
        // mirror=false: x = +(1 - dm); mirror=true: x = -(1 - dm)
        const double dl = mirror ? s * n.dm : s * n.dp;
        const double dr = mirror ? s * n.dp : s * n.dm;
        const double z = mirror ? c - s * (1.0 - n.dm) : c + s * (1.0 - n.dm);
        R v = f(z, dl, dr);
        if (std::isnan(detail::abs_of(v)))
            throw std::invalid_argument("integrate_singular: integrand returned NaN");
        return v;
    };

    R sum{};
    {
        const auto& nodes = table.level(0);
        sum = nodes[0].w * f(c, s * nodes[0].dp, s * nodes[0].dm);
        for (size_t i = 1; i < nodes.size(); ++i)
            sum += nodes[i].w * (eval(nodes[i], false) + eval(nodes[i], true));
    }
    double h = 1.0;
    R est = s * h * sum;
    double err = detail::abs_of(est);
    for (int l = 1; l <= detail::TsTable::kMaxLevel; ++l) {
        const auto& nodes = table.level(l);
        R add{};
        for (const auto& n : nodes) add += n.w * (eval(n, false) + eval(n, true));
        sum = sum + add;
        h *= 0.5;
        const R next = s * h * sum;
        err = detail::abs_of(next - est);
        est = next;
        if (l >= 3 && err <= tol * std::max(1.0, detail::abs_of(est))) return est;
    }
    if (err <= 100.0 * tol * std::max(1.0, detail::abs_of(est))) return est;
    throw accuracy_error("integrate_singular: level budget exhausted", detail::abs_of(est), err);
}

// Spec-facing wrapper: integrand carrying its endpoint exponents as metadata.
struct SingularIntegrand {
    std::function<double(double z, double dl, double dr)> evaluate;
    double left_exponent = 0.0;
    double right_exponent = 0.0;
    double p = 0.0;
    double q = 1.0;
};

inline double integrate_singular(const SingularIntegrand& f, double tol) {
    return integrate_singular(f.evaluate, f.p, f.q, tol);
}

enum class TailSide { right, left };

// Convergent improper integral over (p, +inf) or (-inf, p) via the rational
// substitution z = p +- s/(1-s) composed with tanh-sinh.  The integrand is
// called as f(z, d) with d = |z - p| exact; it must decay at least like
// |z|^{-3/2} for the transformed endpoint to stay integrable.
template <class F>
auto integrate_improper_tail(F&& f, double p, TailSide side, double tol)
    -> decltype(f(0.0, 0.0)) {
    using R = decltype(f(0.0, 0.0));
    const double sign = (side == TailSide::right) ? 1.0 : -1.0;
    {
        const double a1 = detail::abs_of(f(p + sign * 1e6, 1e6));
        const double a2 = detail::abs_of(f(p + sign * 1e9, 1e9));
        if (a2 > 1e-3 * a1 && a2 > 0.0)
            throw std::invalid_argument("integrate_improper_tail: integrand does not decay like |z|^{-3/2}");
    }
    // z = p +- s/(1-s); both orientations reduce to int_0^inf f(p +- u) du.
    // Nodes past |z - p| ~ 1e120 contribute below 1e-60 for any integrand
    // passing the decay check and would overflow the Jacobian.
    auto g = [&](double, double dl, double dr) -> R {
        if (dl < 1e-300 || dr < 1e-120) return R{};
        const double d = dl / dr; // s/(1-s), also the exact distance |z - p|
        return f(p + sign * d, d) * (1.0 / (dr * dr));
    };
    return integrate_singular(g, 0.0, 1.0, tol);
}

} // namespace quad
} // namespace tpms

#endif

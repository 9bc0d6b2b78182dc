#ifndef TPMS_SURFACE_HPP
#define TPMS_SURFACE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tpms/gauss.hpp"
#include "tpms/periods.hpp"
#include "tpms/quad.hpp"

namespace tpms {

using Complex = std::complex<double>;

// Numerical integrator of the Weierstrass representation
//   F(z) = Re[ e^{i theta} int_{z0}^{z} (w1, w2, w3) ],
//   w1 = (phi2 - phi1)/2,  w2 = i (phi2 + phi1)/2,  w3 = dh,
// with base point z0 = 0, the midpoint of the edge v3 v4.  Interior points
// integrate along 0 -> i sqrt(t) -> z; boundary points accumulate along the
// real axis, where tanh-sinh absorbs the endpoint singularities at the v_k.
// The edge through infinity is handled in the chart u = 1/z, in which the
// integrands of all three forms become regular products again.
class WeierstrassIntegrator {
  public:
    WeierstrassIntegrator(const FamilyParams& params, double theta, double tol = 1e-10)
        : data_(params), theta_(theta), tol_(tol), v_(params.vertices()),
          anchor_(0.0, std::sqrt(params.t)) {
        build_boundary_tables();
        phi_anchor_ = segment_integral(Complex(0.0, 0.0), anchor_);
    }

    const FamilyParams& params() const { return data_.params; }
    double theta() const { return theta_; }

    Vec3 point(Complex z) const {
        return apply_theta(potential(z));
    }

    // potential Phi(z) relative to the base point (before Re / Bonnet angle)
    std::array<Complex, 3> potential(Complex z) const {
        if (z.imag() < 0.0) throw std::domain_error("WeierstrassIntegrator: z is below the real axis");
        if (z.imag() == 0.0) return boundary_potential(z.real());
        auto seg = segment_integral(anchor_, z);
        return add(phi_anchor_, seg);
    }

    // same point through a caller-chosen interior waypoint (for path-independence checks)
    Vec3 point_via(Complex z, Complex waypoint) const {
        auto leg1 = segment_integral(Complex(0.0, 0.0), waypoint);
        auto leg2 = segment_integral(waypoint, z);
        return apply_theta(add(leg1, leg2));
    }

    // boundary point on the compactified real axis; edge 6 points are
    // addressed by u = 1/z (u = 0 is z = infinity)
    Vec3 boundary_point(double x) const { return apply_theta(boundary_potential(x)); }
    Vec3 boundary_point_edge6(double u) const { return apply_theta(edge6_potential(u)); }

    // boundary point on a known finite edge k = 0..4, x strictly inside
    Vec3 boundary_point_on_edge(int k, double x) const {
        const double lo = v_[static_cast<size_t>(k)], hi = v_[static_cast<size_t>(k) + 1];
        std::array<Complex, 3> phi{};
        if (x - lo <= hi - x) {
            for (int c = 0; c < 3; ++c)
                phi[static_cast<size_t>(c)] =
                    phi_vertex_raw_[static_cast<size_t>(k)][static_cast<size_t>(c)] +
                    partial_edge(c, k, lo, x, true, false);
        } else {
            for (int c = 0; c < 3; ++c)
                phi[static_cast<size_t>(c)] =
                    phi_vertex_raw_[static_cast<size_t>(k) + 1][static_cast<size_t>(c)] -
                    partial_edge(c, k, x, hi, false, true);
        }
        return apply_theta(to_w(phi));
    }

    Vec3 vertex_image(int k) const { return apply_theta(phi_vertex_[static_cast<size_t>(k)]); }

    // full complex edge integrals of (w1, w2, w3); k = 0..5
    std::array<Complex, 3> edge_integral(int k) const { return edge_full_[static_cast<size_t>(k)]; }

    // displacement vector of the image of edge k under the Bonnet angle
    Vec3 edge_displacement(int k) const { return apply_theta(edge_full_[static_cast<size_t>(k)]); }

  private:
    static std::array<Complex, 3> add(const std::array<Complex, 3>& a,
                                      const std::array<Complex, 3>& b) {
        return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
    }

    Vec3 apply_theta(const std::array<Complex, 3>& w) const {
        const Complex rot(std::cos(theta_), std::sin(theta_));
        return {(rot * w[0]).real(), (rot * w[1]).real(), (rot * w[2]).real()};
    }

    std::array<Complex, 3> forms(Complex z) const {
        const Complex p1 = data_.phi1(z);
        const Complex p2 = data_.phi2(z);
        const Complex i(0.0, 1.0);
        return {0.5 * (p2 - p1), 0.5 * i * (p2 + p1), data_.dh(z)};
    }

    std::array<Complex, 3> segment_integral(Complex z0, Complex z1) const {
        const Complex dz = z1 - z0;
        std::array<Complex, 3> out{};
        for (int c = 0; c < 3; ++c) {
            out[static_cast<size_t>(c)] = quad::integrate_singular(
                [&](double s, double, double) {
                    return forms(z0 + s * dz)[static_cast<size_t>(c)] * dz;
                },
                0.0, 1.0, tol_);
        }
        return out;
    }

    // -- boundary machinery ------------------------------------------------

    // modulus integral of form `which` (0 = phi1, 1 = phi2, 2 = dh) over the
    // sub-interval (x0, x1) of edge k, with flags telling which side sits at
    // the singular edge endpoint
    double partial_modulus(int which, int k, double x0, double x1, bool left_is_vertex,
                           bool right_is_vertex) const {
        const auto& e = exponents(which);
        return quad::integrate_singular(
            [&](double z, double dl, double dr) {
                double r = 1.0;
                for (int j = 0; j < 6; ++j) {
                    if (e[j] == 0.0) continue;
                    double d;
                    if (left_is_vertex && j == k) d = dl;
                    else if (right_is_vertex && j == k + 1) d = dr;
                    else d = std::fabs(z - v_[static_cast<size_t>(j)]);
                    r *= (e[j] > 0.0) ? std::sqrt(d) : 1.0 / std::sqrt(d);
                }
                return r;
            },
            x0, x1, tol_);
    }

    // complex value of the form over a sub-interval of finite edge k
    Complex partial_edge(int which, int k, double x0, double x1, bool lv, bool rv) const {
        return prefactor(which) * wdata::edge_phase(exponents(which), k) *
               partial_modulus(which, k, x0, x1, lv, rv);
    }

    // edge 6 in the u-chart: integral over (u0, u1) subset (-1/t, 1/t) of
    // prod (1 - v_j u)^{e_j}; endpoints u = +-1/t are the vertices v6, v1
    double edge6_modulus_partial(int which, double u0, double u1, bool left_is_v1,
                                 bool right_is_v6) const {
        const auto& e = exponents(which);
        const double t = data_.params.t;
        return quad::integrate_singular(
            [&](double u, double dl, double dr) {
                double r = 1.0;
                for (int j = 0; j < 6; ++j) {
                    if (e[j] == 0.0) continue;
                    double d;
                    if (j == 0) d = left_is_v1 ? t * dl : std::fabs(1.0 + t * u);
                    else if (j == 5) d = right_is_v6 ? t * dr : std::fabs(1.0 - t * u);
                    else d = std::fabs(1.0 - v_[static_cast<size_t>(j)] * u);
                    r *= (e[j] > 0.0) ? std::sqrt(d) : 1.0 / std::sqrt(d);
                }
                return r;
            },
            u0, u1, tol_);
    }

    Complex edge6_partial(int which, double u0, double u1, bool lv1, bool rv6) const {
        return prefactor(which) * edge6_modulus_partial(which, u0, u1, lv1, rv6);
    }

    const std::array<double, 6>& exponents(int which) const {
        switch (which) {
            case 0: return wdata::kPhi1Exp;
            case 1: return wdata::kPhi2Exp;
            default: return wdata::kDhExp;
        }
    }

    Complex prefactor(int which) const {
        switch (which) {
            case 0: return Complex(data_.params.rho, 0.0);
            case 1: return Complex(-1.0 / data_.params.rho, 0.0);
            default: return Complex(0.0, -1.0);
        }
    }

    static std::array<Complex, 3> to_w(const std::array<Complex, 3>& phi) {
        const Complex i(0.0, 1.0);
        return {0.5 * (phi[1] - phi[0]), 0.5 * i * (phi[1] + phi[0]), phi[2]};
    }

    void build_boundary_tables() {
        const double t = data_.params.t;
        // full finite edges as (phi1, phi2, dh)
        std::array<std::array<Complex, 3>, 6> edges{};
        for (int k = 0; k < 5; ++k)
            for (int c = 0; c < 3; ++c)
                edges[static_cast<size_t>(k)][static_cast<size_t>(c)] =
                    partial_edge(c, k, v_[static_cast<size_t>(k)], v_[static_cast<size_t>(k) + 1],
                                 true, true);
        for (int c = 0; c < 3; ++c)
            edges[5][static_cast<size_t>(c)] = edge6_partial(c, -1.0 / t, 1.0 / t, true, true);

        // cumulative vertex potentials, base z0 = 0 inside edge 3 (v3, v4)
        std::array<std::array<Complex, 3>, 6> phi_v{};
        std::array<Complex, 3> right{}, left{};
        for (int c = 0; c < 3; ++c) {
            right[static_cast<size_t>(c)] = partial_edge(c, 2, 0.0, 1.0, false, true);
            left[static_cast<size_t>(c)] = partial_edge(c, 2, -1.0, 0.0, true, false);
        }
        phi_v[3] = right;                                            // v4
        for (int c = 0; c < 3; ++c) phi_v[2][static_cast<size_t>(c)] = -left[static_cast<size_t>(c)]; // v3
        phi_v[4] = add(phi_v[3], edges[3]);                          // v5
        phi_v[5] = add(phi_v[4], edges[4]);                          // v6
        for (int c = 0; c < 3; ++c) {
            phi_v[1][static_cast<size_t>(c)] = phi_v[2][static_cast<size_t>(c)] - edges[1][static_cast<size_t>(c)]; // v2
            phi_v[0][static_cast<size_t>(c)] = phi_v[1][static_cast<size_t>(c)] - edges[0][static_cast<size_t>(c)]; // v1
        }

        for (int k = 0; k < 6; ++k) {
            edge_full_[static_cast<size_t>(k)] = to_w(edges[static_cast<size_t>(k)]);
            phi_vertex_[static_cast<size_t>(k)] = to_w(phi_v[static_cast<size_t>(k)]);
        }
        phi_vertex_raw_ = phi_v;
    }

    std::array<Complex, 3> boundary_potential(double x) const {
        const double t = data_.params.t;
        if (std::fabs(x) >= t) {
            if (x == t) return phi_vertex_[5];
            if (x == -t) return phi_vertex_[0];
            return edge6_potential(1.0 / x);
        }
        // locate the finite edge
        int k = 0;
        while (k < 4 && x >= v_[static_cast<size_t>(k) + 1]) ++k;
        for (int j = 0; j < 6; ++j)
            if (x == v_[static_cast<size_t>(j)]) return phi_vertex_[static_cast<size_t>(j)];
        const double lo = v_[static_cast<size_t>(k)], hi = v_[static_cast<size_t>(k) + 1];
        std::array<Complex, 3> phi{};
        if (x - lo <= hi - x) {
            for (int c = 0; c < 3; ++c)
                phi[static_cast<size_t>(c)] = phi_vertex_raw_[static_cast<size_t>(k)][static_cast<size_t>(c)] +
                                              partial_edge(c, k, lo, x, true, false);
        } else {
            for (int c = 0; c < 3; ++c)
                phi[static_cast<size_t>(c)] = phi_vertex_raw_[static_cast<size_t>(k) + 1][static_cast<size_t>(c)] -
                                              partial_edge(c, k, x, hi, false, true);
        }
        return to_w(phi);
    }

    std::array<Complex, 3> edge6_potential(double u) const {
        const double t = data_.params.t;
        if (!(std::fabs(u) < 1.0 / t))
            throw std::domain_error("edge6_potential: u outside (-1/t, 1/t)");
        std::array<Complex, 3> phi{};
        if (u >= 0.0) {
            for (int c = 0; c < 3; ++c)
                phi[static_cast<size_t>(c)] = phi_vertex_raw_[5][static_cast<size_t>(c)] +
                                              edge6_partial(c, u, 1.0 / t, false, true);
        } else {
            for (int c = 0; c < 3; ++c)
                phi[static_cast<size_t>(c)] = phi_vertex_raw_[0][static_cast<size_t>(c)] -
                                              edge6_partial(c, -1.0 / t, u, true, false);
        }
        return to_w(phi);
    }

    WeierstrassData data_;
    double theta_;
    double tol_;
    std::array<double, 6> v_;
    Complex anchor_;
    std::array<Complex, 3> phi_anchor_{};
    std::array<std::array<Complex, 3>, 6> edge_full_{};
    std::array<std::array<Complex, 3>, 6> phi_vertex_{};      // as (w1,w2,w3)
    std::array<std::array<Complex, 3>, 6> phi_vertex_raw_{};  // as (phi1,phi2,dh)
};

inline Vec3 weierstrass_point(const FamilyParams& params, Complex z, double theta,
                              double tol = 1e-10) {
    return WeierstrassIntegrator(params, theta, tol).point(z);
}

struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<int> boundary_tag; // -1 interior, 1..6 the edge v_k v_{k+1}
    // provenance
    double a = 0.0, b = 0.0, t = 0.0, rho = 1.0, theta = 0.0;
    // frame landmarks in mesh coordinates (filled by fundamental_hexagon)
    double plane_x_lo = 0.0, plane_x_hi = 0.0; // lateral x = const faces (edges 1, 5)
    double plane_y_lo = 0.0, plane_y_hi = 0.0; // lateral y = const faces (edges 2, 4)
    double z_bottom = 0.0, z_top = 1.0;        // straight-segment levels (edges 6, 3)
    double seg_bottom_y = 0.0;                 // y-position of the bottom segment line
    double seg_top_x = 0.0;                    // x-position of the top segment line
    double diameter = 1.0;
};

struct BoxReport {
    double A = 0.0;       // full x-width of the hexagon box
    double B = 0.0;       // full y-width
    double height = 1.0;  // hexagon height (normalized)
    bool centered_x = false;
    bool centered_y = false;
    std::array<Vec3, 3> lattice{};
    double weld_residual = 0.0;
    int euler_characteristic = 0;
    double off_centering = 0.0;
};

namespace surfdetail {

// cosine-clustered interior samples of (lo, hi), endpoints excluded
inline std::vector<double> clustered(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(n > 1 ? n - 1 : 0));
    const double pi = 3.14159265358979323846;
    for (int j = 1; j < n; ++j) {
        const double s = 0.5 * (1.0 - std::cos(pi * j / n));
        out.push_back(lo + (hi - lo) * s);
    }
    return out;
}

} // namespace surfdetail

// Mesh of the image of the (compactified) upper half-plane.  The domain is
// the unit disk in the Moebius chart w = (z - ic)/(z + ic), c = sqrt(t), whose
// boundary circle carries all six v_k; boundary samples are cosine-clustered
// toward the vertices, where the image curvature concentrates.
inline SurfaceMesh fundamental_hexagon(const FamilyParams& params, int resolution,
                                       double theta = 0.0, double tol = 1e-9) {
    if (resolution < 4) throw std::domain_error("fundamental_hexagon: resolution < 4");
    WeierstrassIntegrator wi(params, theta, tol);
    const double t = params.t;
    const double c = std::sqrt(t);
    const auto v = params.vertices();

    // boundary angles of the v_k in the w-chart; psi in (0, 2 pi), z = -c cot(psi/2)
    auto psi_of = [&](double x) {
        const Complex w = (Complex(x, 0.0) - Complex(0.0, c)) / (Complex(x, 0.0) + Complex(0.0, c));
        double p = std::arg(w);
        if (p <= 0.0) p += 2.0 * 3.14159265358979323846;
        return p;
    };
    auto z_of_w = [&](Complex w) { return Complex(0.0, c) * (1.0 + w) / (1.0 - w); };

    std::array<double, 6> psi_v{};
    for (int k = 0; k < 6; ++k) psi_v[static_cast<size_t>(k)] = psi_of(v[static_cast<size_t>(k)]);

    // angular samples: per edge arc, corner + clustered interior points.
    // kind/where record how the boundary image is computed: corners map to
    // vertex images, finite-edge samples to real-axis positions, edge-6
    // samples to the u = 1/z chart.
    struct BSample {
        double psi;
        int edge;    // 1..6
        int kind;    // 0 = corner (of edge start), 1 = finite edge interior, 2 = edge-6 interior
        double where; // x for kind 1, u for kind 2
    };
    std::vector<BSample> bs;
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (int k = 0; k < 6; ++k) {
        const double lo = psi_v[static_cast<size_t>(k)];
        const double hi = (k < 5) ? psi_v[static_cast<size_t>(k) + 1] : psi_v[0] + two_pi;
        bs.push_back({lo, k + 1, 0, 0.0});
        for (double p : surfdetail::clustered(lo, hi, resolution)) {
            if (k < 5) {
                double x = -c / std::tan(0.5 * p);
                x = std::min(std::max(x, std::nextafter(v[static_cast<size_t>(k)], t)),
                             std::nextafter(v[static_cast<size_t>(k) + 1], -t));
                bs.push_back({p, k + 1, 1, x});
            } else {
                double u = -std::tan(0.5 * p) / c;
                const double ub = 1.0 / t;
                u = std::min(std::max(u, std::nextafter(-ub, 0.0)), std::nextafter(ub, 0.0));
                bs.push_back({p, 6, 2, u});
            }
        }
    }
    const int N = static_cast<int>(bs.size());
    const int R = 2 * resolution; // rings (ring R = boundary)

    SurfaceMesh mesh;
    mesh.a = params.a;
    mesh.b = params.b;
    mesh.t = params.t;
    mesh.rho = params.rho;
    mesh.theta = theta;

    // center vertex (w = 0 -> z = ic)
    mesh.vertices.push_back(wi.point(Complex(0.0, c)));
    mesh.boundary_tag.push_back(-1);
    auto vid = [&](int ring, int i) {
        if (ring == 0) return 0;
        return 1 + (ring - 1) * N + ((i % N + N) % N);
    };
    for (int ring = 1; ring <= R; ++ring) {
        const double r = static_cast<double>(ring) / R;
        for (int i = 0; i < N; ++i) {
            const BSample& sample = bs[static_cast<size_t>(i)];
            if (ring < R) {
                const Complex w = std::polar(r, sample.psi);
                mesh.vertices.push_back(wi.point(z_of_w(w)));
                mesh.boundary_tag.push_back(-1);
            } else {
                switch (sample.kind) {
                    case 0: mesh.vertices.push_back(wi.vertex_image(sample.edge - 1)); break;
                    case 1: mesh.vertices.push_back(wi.boundary_point_on_edge(sample.edge - 1, sample.where)); break;
                    default: mesh.vertices.push_back(wi.boundary_point_edge6(sample.where)); break;
                }
                mesh.boundary_tag.push_back(sample.edge);
            }
        }
    }
    // faces: center fan + ring strips
    for (int i = 0; i < N; ++i)
        mesh.faces.push_back({vid(0, 0), vid(1, i), vid(1, i + 1)});
    for (int ring = 1; ring < R; ++ring) {
        for (int i = 0; i < N; ++i) {
            const int a0 = vid(ring, i), a1 = vid(ring, i + 1);
            const int b0 = vid(ring + 1, i), b1 = vid(ring + 1, i + 1);
            mesh.faces.push_back({a0, b0, b1});
            mesh.faces.push_back({a0, b1, a1});
        }
    }

    // frame landmarks from the vertex images
    const Vec3 V1 = wi.vertex_image(0), V2 = wi.vertex_image(1), V3 = wi.vertex_image(2);
    const Vec3 V4 = wi.vertex_image(3), V5 = wi.vertex_image(4), V6 = wi.vertex_image(5);

    const double x_lo = std::min(V1.x, V5.x), x_hi = std::max(V1.x, V5.x);
    const double y_lo = std::min(V2.y, V4.y), y_hi = std::max(V2.y, V4.y);
    const double z_bot = 0.5 * (V1.z + V6.z);
    const double z_top = 0.5 * (V3.z + V4.z);

    // normalize: height 1, bottom at z = 0, lateral planes symmetric about 0
    const double H = std::fabs(z_top - z_bot);
    const double s = 1.0 / H;
    const double zsign = (z_top > z_bot) ? 1.0 : -1.0;
    const Vec3 shift{0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi), z_bot};
    for (auto& p : mesh.vertices) {
        p = (p - shift) * s;
        p.z *= zsign;
        if (zsign < 0.0) p.y = -p.y; // keep the motion proper
    }
    auto N3 = [&](const Vec3& p) {
        Vec3 q = (p - shift) * s;
        q.z *= zsign;
        if (zsign < 0.0) q.y = -q.y;
        return q;
    };
    mesh.plane_x_lo = N3(Vec3{x_lo, 0, 0}).x;
    mesh.plane_x_hi = N3(Vec3{x_hi, 0, 0}).x;
    {
        const Vec3 a2 = N3(V2), a4 = N3(V4);
        mesh.plane_y_lo = std::min(a2.y, a4.y);
        mesh.plane_y_hi = std::max(a2.y, a4.y);
    }
    mesh.z_bottom = 0.0;
    mesh.z_top = 1.0;
    mesh.seg_bottom_y = N3(V1).y;
    mesh.seg_top_x = N3(V3).x;
    {
        double d = 0.0;
        for (const auto& p : mesh.vertices)
            d = std::max({d, std::fabs(p.x), std::fabs(p.y), std::fabs(p.z)});
        mesh.diameter = 2.0 * d;
    }
    return mesh;
}

namespace surfdetail {

struct Isometry {
    // p -> L p + o with L diagonal +-1 (all transforms used here are axis-aligned)
    Vec3 l{1, 1, 1};
    Vec3 o{0, 0, 0};
    Vec3 operator()(const Vec3& p) const {
        return {l.x * p.x + o.x, l.y * p.y + o.y, l.z * p.z + o.z};
    }
};

} // namespace surfdetail

// Reflect/rotate the fundamental hexagon into the 8-copy translational
// fundamental domain and weld coincident boundary vertices modulo the lattice
// (2A,0,0), (0,2B,0), (A,B,2) with A, B the full box widths.  Reports the
// weld residual and the Euler characteristic of the closed-up quotient.
inline SurfaceMesh extend_to_lattice_cell(const SurfaceMesh& hex, BoxReport* report = nullptr,
                                          double refuse_off_centering = 1e-4) {
    const double A = hex.plane_x_hi - hex.plane_x_lo; // full widths
    const double B = hex.plane_y_hi - hex.plane_y_lo;
    const double xc = 0.5 * (hex.plane_x_lo + hex.plane_x_hi);
    const double yc = 0.5 * (hex.plane_y_lo + hex.plane_y_hi);

    const double offc = std::max(std::fabs(hex.seg_top_x - xc), std::fabs(hex.seg_bottom_y - yc));
    if (offc > refuse_off_centering * hex.diameter)
        throw std::runtime_error(
            "extend_to_lattice_cell: straight segments off-center by " + std::to_string(offc) +
            " (period conditions not satisfied at these parameters)");

    using surfdetail::Isometry;
    const Isometry mirror_x{{-1, 1, 1}, {2.0 * hex.plane_x_hi, 0, 0}};
    const Isometry mirror_y{{1, -1, 1}, {0, 2.0 * hex.plane_y_hi, 0}};
    const Isometry rot_top{{-1, 1, -1}, {2.0 * hex.seg_top_x, 0, 2.0 * hex.z_top}};
    const Isometry ident{};

    // the eight transforms {e, Mx, My, MxMy} x {e, Rtop}
    std::vector<Isometry> copies;
    auto compose = [](const Isometry& f, const Isometry& g) {
        // f(g(p))
        Isometry h;
        h.l = {f.l.x * g.l.x, f.l.y * g.l.y, f.l.z * g.l.z};
        h.o = {f.l.x * g.o.x + f.o.x, f.l.y * g.o.y + f.o.y, f.l.z * g.o.z + f.o.z};
        return h;
    };
    const Isometry mxy = compose(mirror_x, mirror_y);
    for (const Isometry& g : {ident, mirror_x, mirror_y, mxy}) {
        copies.push_back(g);
        copies.push_back(compose(g, rot_top));
    }

    SurfaceMesh out;
    out.a = hex.a; out.b = hex.b; out.t = hex.t; out.rho = hex.rho; out.theta = hex.theta;
    const int nv = static_cast<int>(hex.vertices.size());
    std::vector<int> bnd_ids;
    for (size_t ci = 0; ci < copies.size(); ++ci) {
        for (int i = 0; i < nv; ++i) {
            out.vertices.push_back(copies[ci](hex.vertices[static_cast<size_t>(i)]));
            out.boundary_tag.push_back(hex.boundary_tag[static_cast<size_t>(i)]);
            if (hex.boundary_tag[static_cast<size_t>(i)] > 0)
                bnd_ids.push_back(static_cast<int>(ci) * nv + i);
        }
        const bool flip = (copies[ci].l.x * copies[ci].l.y * copies[ci].l.z) < 0.0;
        for (const auto& f : hex.faces) {
            std::array<int, 3> g = {f[0] + static_cast<int>(ci) * nv, f[1] + static_cast<int>(ci) * nv,
                                    f[2] + static_cast<int>(ci) * nv};
            if (flip) std::swap(g[1], g[2]);
            out.faces.push_back(g);
        }
    }

    // weld boundary vertices modulo the lattice
    const Vec3 L1{2.0 * A, 0, 0}, L2{0, 2.0 * B, 0}, L3{A, B, 2.0};
    auto reduce = [&](Vec3 d) {
        const double n3 = std::round(d.z / 2.0);
        d = d - L3 * n3;
        d = d - L1 * std::round(d.x / (2.0 * A));
        d = d - L2 * std::round(d.y / (2.0 * B));
        return d;
    };
    std::vector<int> parent(out.vertices.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    auto unite = [&](int x, int y) { parent[static_cast<size_t>(find(x))] = find(y); };

    const double match_tol = 1e-5 * std::max(1.0, hex.diameter);
    double weld_residual = 0.0;
    for (size_t ii = 0; ii < bnd_ids.size(); ++ii) {
        for (size_t jj = ii + 1; jj < bnd_ids.size(); ++jj) {
            const int p = bnd_ids[ii], q = bnd_ids[jj];
            const Vec3 d = reduce(out.vertices[static_cast<size_t>(p)] - out.vertices[static_cast<size_t>(q)]);
            const double r = d.norm();
            if (r < match_tol) {
                weld_residual = std::max(weld_residual, r);
                unite(p, q);
            }
        }
    }

    // Euler characteristic of the welded complex
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& f : out.faces) {
        for (int e = 0; e < 3; ++e) {
            int u = find(f[static_cast<size_t>(e)]);
            int w = find(f[static_cast<size_t>((e + 1) % 3)]);
            if (u > w) std::swap(u, w);
            ++edge_count[{u, w}];
        }
    }
    std::vector<int> roots;
    roots.reserve(out.vertices.size());
    for (int i = 0; i < static_cast<int>(out.vertices.size()); ++i) roots.push_back(find(i));
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    const long V = static_cast<long>(roots.size());
    const long E = static_cast<long>(edge_count.size());
    const long F = static_cast<long>(out.faces.size());
    const int euler = static_cast<int>(V - E + F);

    if (report) {
        report->A = A;
        report->B = B;
        report->height = hex.z_top - hex.z_bottom;
        report->centered_x = std::fabs(hex.seg_top_x - xc) <= 1e-6 * hex.diameter;
        report->centered_y = std::fabs(hex.seg_bottom_y - yc) <= 1e-6 * hex.diameter;
        report->lattice = {L1, L2, L3};
        report->weld_residual = weld_residual;
        report->euler_characteristic = euler;
        report->off_centering = offc;
    }
    return out;
}

// E/F of the tetragonal unit cell of the conjugate (theta = pi/2) surface of
// a tD member (a = b = sqrt t).  The conjugate piece has four straight
// horizontal segments of length L (conjugates of the lateral mirror arcs) and
// two planar arcs of vertical drop h (conjugates of the straight segments).
// Two parallel segment rotations compose to the vertical period F = 2h; the
// arc-plane glides compose to the diagonal horizontal period of length
// E = 2 sqrt(2) L, the conventional cell edge along the diagonal mirrors.
// The assembly is anchored by the cubic member of tD (branch values at cube
// vertices), whose conjugate is the cubic-cell P surface with E/F = 1.
inline double conjugate_cell_ratio(const FamilyParams& params, double tol = 1e-11) {
    if (!params.diagonal() || !params.tetragonal(1e-9))
        throw std::domain_error("conjugate_cell_ratio: requires the tD locus a = b = sqrt(t)");
    WeierstrassIntegrator wi(params, 1.5707963267948966, tol);
    const Vec3 d1 = wi.edge_displacement(0); // conjugate of the x-plane arc: || x
    const Vec3 d2 = wi.edge_displacement(1); // || y
    const Vec3 d3 = wi.edge_displacement(2); // conjugate of the top segment: pure z drop
    const double L = std::fabs(d1.x);
    const double h = std::fabs(d3.z);
    const double align = std::max({std::fabs(d1.y), std::fabs(d1.z), std::fabs(d2.x),
                                   std::fabs(d2.z), std::fabs(d3.x), std::fabs(d3.y)});
    if (align > 1e-7 * std::max(L, h))
        throw std::runtime_error("conjugate_cell_ratio: conjugate piece is not axis-aligned");
    if (std::fabs(std::fabs(d2.y) - L) > 1e-8 * L)
        throw std::runtime_error("conjugate_cell_ratio: conjugate base is not square");
    return std::sqrt(2.0) * L / h;
}

} // namespace tpms

#endif

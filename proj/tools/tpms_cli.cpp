// Command-line interface for the oD/oDelta/tD/tDelta period-problem toolkit:
// solves the period condition, sweeps the family, evaluates the boundary
// curve, classifies Gauss-map branch values, and exports meshes.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpms/gauss.hpp"
#include "tpms/mesh_io.hpp"
#include "tpms/periods.hpp"
#include "tpms/solver.hpp"
#include "tpms/specfun.hpp"
#include "tpms/surface.hpp"
#include "tpms/verify.hpp"

using nlohmann::json;

namespace {

constexpr const char* kSchemaVersion = "1";

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct GridSpec {
    double lo = 0.0, hi = 0.0;
    int n = 0;
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d", &g.lo, &g.hi, &g.n) != 3 || g.n < 2)
        throw CLI::ValidationError("grid must be lo:hi:n with n >= 2, got '" + s + "'");
    return g;
}

std::vector<double> grid_points(const GridSpec& g) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i)
        out.push_back(g.lo + (g.hi - g.lo) * i / (g.n - 1));
    return out;
}

int default_jobs() {
    if (const char* env = std::getenv("TPMS_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    return 1;
}

// optional flat JSON config; explicit flags win
void apply_config(CLI::App& app, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot open config file '" + path + "'");
    json cfg = json::parse(in);
    for (auto& [key, value] : cfg.items()) {
        for (auto* sub : app.get_subcommands({})) {
            if (auto* opt = sub->get_option_no_throw("--" + key)) {
                if (opt->count() == 0) opt->add_result(value.dump());
            }
        }
    }
}

json solve_report_json(const tpms::SolveReport& rep) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["a"] = rep.a;
    j["b"] = rep.b;
    j["t"] = rep.t;
    j["rho"] = rep.rho;
    j["residual_q"] = rep.residual_q;
    j["residual_period"] = rep.residual_period;
    j["iterations"] = rep.iterations;
    j["bracket"] = {rep.bracket_lo, rep.bracket_hi};
    j["found"] = rep.found;
    if (!rep.warnings.empty()) j["warnings"] = rep.warnings;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"triply periodic minimal surface period-problem toolkit (oD / oDelta / tD / tDelta families)"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "flat JSON config mirroring flags (flags win)");

    // ---- solve ----
    auto* cmd_solve = app.add_subcommand("solve", "solve the period problem Q = 0 for (a, b)");
    double sa = 0, sb = 0, st = -1.0, stol = 1e-10;
    bool sjson = false;
    cmd_solve->add_option("a", sa, "first branch parameter (> 1)")->required();
    cmd_solve->add_option("b", sb, "second branch parameter")->required();
    cmd_solve->add_option("--t", st, "evaluate the trivial a = b locus at this t");
    cmd_solve->add_option("--tol", stol, "residual tolerance for |Q|");
    cmd_solve->add_flag("--json", sjson, "emit JSON");

    // ---- sweep ----
    auto* cmd_sweep = app.add_subcommand("sweep", "solve over an (a, b) grid, write CSV");
    std::string sw_agrid, sw_bgrid, sw_out;
    double sw_tol = 1e-10;
    int sw_jobs = default_jobs();
    cmd_sweep->add_option("--a-grid", sw_agrid, "a grid as lo:hi:n")->required();
    cmd_sweep->add_option("--b-grid", sw_bgrid, "b grid as lo:hi:n")->required();
    cmd_sweep->add_option("--out", sw_out, "output CSV path")->required();
    cmd_sweep->add_option("--tol", sw_tol, "residual tolerance");
    cmd_sweep->add_option("--jobs", sw_jobs, "concurrent solves (default $TPMS_JOBS or 1)");

    // ---- boundary ----
    auto* cmd_boundary = app.add_subcommand("boundary", "oDelta-closure/oD intersection curve t(a)");
    std::string bd_agrid, bd_out;
    cmd_boundary->add_option("--a-grid", bd_agrid, "a grid as lo:hi:n")->required();
    cmd_boundary->add_option("--out", bd_out, "output CSV path (default stdout)");

    // ---- tstar ----
    auto* cmd_tstar = app.add_subcommand("tstar", "bifurcation constant a* (2E = K)");
    bool ts_json = false;
    cmd_tstar->add_flag("--json", ts_json, "emit JSON");

    // ---- gauss ----
    auto* cmd_gauss = app.add_subcommand("gauss", "branch values of the Gauss map + antipodality");
    double ga = 0, gb = 0, gt = 0, grho = 1.0;
    cmd_gauss->add_option("a", ga)->required();
    cmd_gauss->add_option("b", gb)->required();
    cmd_gauss->add_option("t", gt)->required();
    cmd_gauss->add_option("--rho", grho, "Lopez-Ros factor (default 1)");

    // ---- mesh ----
    auto* cmd_mesh = app.add_subcommand("mesh", "generate the fundamental hexagon or the 8-copy cell");
    double ma = 0, mb = 0, mt = 0, mrho = -1.0, mtheta = 0.0;
    int mcopies = 1, mres = 8;
    std::string mout, mformat = "obj";
    cmd_mesh->add_option("a", ma)->required();
    cmd_mesh->add_option("b", mb)->required();
    cmd_mesh->add_option("t", mt)->required();
    cmd_mesh->add_option("--rho", mrho, "Lopez-Ros factor (default: solve for it)");
    cmd_mesh->add_option("--theta", mtheta, "Bonnet angle (pi/2 = conjugate surface)");
    cmd_mesh->add_option("--copies", mcopies, "1 = hexagon, 8 = translational cell")
        ->check(CLI::IsMember({1, 8}));
    cmd_mesh->add_option("--resolution", mres, "boundary samples per edge (>= 4)");
    cmd_mesh->add_option("--out", mout, "output path")->required();
    cmd_mesh->add_option("--format", mformat, "obj or ply")->check(CLI::IsMember({"obj", "ply"}));

    // ---- verify ----
    auto* cmd_verify = app.add_subcommand("verify", "run the numerical invariant suites");
    std::string vsuite = "all";
    cmd_verify->add_option("--suite", vsuite, "specfun|periods|derivatives|gauss|surface|all")
        ->check(CLI::IsMember({"specfun", "periods", "derivatives", "gauss", "surface", "all"}));

    try {
        app.parse(argc, argv);
        apply_config(app, config_path);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*cmd_solve) {
            tpms::SolveReport rep{};
            if (sa == sb) {
                if (st <= sb)
                    throw std::domain_error("a = b is the trivial oD locus: pass --t with t > b");
                tpms::FamilyParams p(sa, sb, st);
                rep.a = p.a;
                rep.b = p.b;
                rep.t = st;
                rep.rho = tpms::solve_rho(p);
                rep.residual_q = std::fabs(tpms::q_value(sa, sb, st));
                rep.found = true;
            } else {
                if (sa > sb) {
                    std::swap(sa, sb);
                    std::cerr << "note: canonicalized to a <= b (the swap relabels the hexagons)\n";
                }
                try {
                    rep = tpms::solve_odelta(sa, sb, stol);
                } catch (const tpms::bracket_error& e) {
                    std::cerr << "bracket failure: " << e.what() << "\n";
                    for (const auto& [t, q] : e.samples)
                        std::cerr << "  t=" << fmt17(t) << " Q=" << fmt17(q) << "\n";
                    return 2;
                }
            }
            if (sjson) {
                std::cout << solve_report_json(rep).dump(2) << "\n";
            } else {
                std::cout << "a=" << fmt17(rep.a) << " b=" << fmt17(rep.b) << " t=" << fmt17(rep.t)
                          << " rho=" << fmt17(rep.rho) << " |Q|=" << fmt17(rep.residual_q) << "\n";
            }
            return rep.found ? 0 : 2;
        }

        if (*cmd_sweep) {
            const auto ag = grid_points(parse_grid(sw_agrid));
            const auto bg = grid_points(parse_grid(sw_bgrid));
            std::ofstream out(sw_out);
            if (!out) throw std::runtime_error("cannot open output '" + sw_out + "'");
            struct Row {
                double a, b;
                tpms::SolveReport rep;
                std::string error;
                bool skipped = false;
            };
            std::vector<Row> rows;
            for (double a : ag)
                for (double b : bg) rows.push_back({a, b, {}, "", false});
            std::atomic<size_t> next{0};
            auto work = [&]() {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= rows.size()) return;
                    Row& r = rows[i];
                    if (r.a >= r.b) {
                        r.skipped = true;
                        r.error = (r.a == r.b) ? "diagonal" : "canonical order requires a < b";
                        continue;
                    }
                    try {
                        r.rep = tpms::solve_odelta(r.a, r.b, sw_tol);
                    } catch (const std::exception& e) {
                        r.error = e.what();
                    }
                }
            };
            std::vector<std::thread> pool;
            const int jobs = std::max(1, sw_jobs);
            for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
            for (auto& th : pool) th.join();

            out << "a,b,t,rho,residual,iterations,status\n";
            for (const Row& r : rows) {
                if (r.skipped) {
                    out << fmt17(r.a) << ',' << fmt17(r.b) << ",,,,," << "skipped: " << r.error << "\n";
                } else if (!r.error.empty()) {
                    out << fmt17(r.a) << ',' << fmt17(r.b) << ",,,,," << "error: " << r.error << "\n";
                } else {
                    out << fmt17(r.a) << ',' << fmt17(r.b) << ',' << fmt17(r.rep.t) << ','
                        << fmt17(r.rep.rho) << ',' << fmt17(r.rep.residual_q) << ','
                        << r.rep.iterations << ",ok\n";
                }
            }
            return 0;
        }

        if (*cmd_boundary) {
            const auto ag = grid_points(parse_grid(bd_agrid));
            std::ostream* os = &std::cout;
            std::ofstream file;
            if (!bd_out.empty()) {
                file.open(bd_out);
                if (!file) throw std::runtime_error("cannot open output '" + bd_out + "'");
                os = &file;
            }
            *os << "a,t,residual\n";
            for (double a : ag) {
                const double t = tpms::boundary_curve(a);
                *os << fmt17(a) << ',' << fmt17(t) << ',' << fmt17(tpms::intersection_residual(a, t))
                    << "\n";
            }
            return 0;
        }

        if (*cmd_tstar) {
            const double astar = tpms::solve_tstar();
            if (ts_json) {
                json j;
                j["schema_version"] = kSchemaVersion;
                j["a_star"] = astar;
                j["m_star"] = astar * astar / (1.0 + astar * astar);
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << fmt17(astar) << "\n";
            }
            return 0;
        }

        if (*cmd_gauss) {
            const tpms::FamilyParams p(ga, gb, gt, grho);
            const auto bv = tpms::branch_values(p);
            const auto rep = tpms::antipodality_test(p);
            json j;
            j["schema_version"] = kSchemaVersion;
            j["a"] = p.a;
            j["b"] = p.b;
            j["t"] = p.t;
            j["rho"] = p.rho;
            j["classification"] =
                rep.classification == tpms::MeeksClass::meeks ? "meeks" : "non_meeks";
            j["matching_residual"] = rep.matching_residual;
            j["rho4_from_pm1"] = rep.rho4_from_pm1;
            j["rho4_from_pmt"] = rep.rho4_from_pmt;
            json pts = json::array();
            static const char* names[8] = {"+G(+1)", "-G(+1)", "+G(-1)", "-G(-1)",
                                           "+G(+t)", "-G(+t)", "+G(-t)", "-G(-t)"};
            for (int i = 0; i < 8; ++i) {
                json e;
                e["label"] = names[i];
                e["point"] = {bv.points[static_cast<size_t>(i)].x, bv.points[static_cast<size_t>(i)].y,
                              bv.points[static_cast<size_t>(i)].z};
                pts.push_back(e);
            }
            j["branch_values"] = pts;
            if (rep.classification == tpms::MeeksClass::meeks) {
                // list the four antipodal pairs (+G(z) with -G(-z) for the rectangles)
                json pairs = json::array();
                for (int i = 0; i < 8; ++i)
                    for (int k = i + 1; k < 8; ++k)
                        if ((bv.points[static_cast<size_t>(i)] + bv.points[static_cast<size_t>(k)]).norm() <
                            1e-9)
                            pairs.push_back({names[i], names[k]});
                j["antipodal_pairs"] = pairs;
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*cmd_mesh) {
            double rho = mrho;
            tpms::FamilyParams probe(ma, mb, mt, 1.0);
            if (rho <= 0.0) rho = probe.diagonal() ? 1.0 : tpms::solve_rho(probe);
            const tpms::FamilyParams p(ma, mb, mt, rho);
            const auto hex = tpms::fundamental_hexagon(p, mres, mtheta);
            const auto fmt = tpms::mesh_io::format_from_string(mformat);
            if (mcopies == 1) {
                tpms::mesh_io::export_mesh(hex, mout, fmt);
                std::cerr << "wrote " << hex.vertices.size() << " vertices, " << hex.faces.size()
                          << " faces to " << mout << "\n";
            } else {
                tpms::BoxReport box;
                const auto cell = tpms::extend_to_lattice_cell(hex, &box);
                tpms::mesh_io::export_mesh(cell, mout, fmt);
                std::cerr << "wrote 8-copy cell: " << cell.vertices.size() << " vertices, euler "
                          << box.euler_characteristic << ", weld residual "
                          << fmt17(box.weld_residual) << ", A=" << fmt17(box.A)
                          << " B=" << fmt17(box.B) << "\n";
            }
            return 0;
        }

        if (*cmd_verify) {
            const auto results = tpms::verify::run(vsuite);
            bool all_pass = true;
            for (const auto& r : results) {
                std::cout << r.name << ": " << (r.pass ? "PASS" : "FAIL")
                          << "  worst residual " << fmt17(r.worst_residual) << "  (" << r.note
                          << ")\n";
                all_pass = all_pass && r.pass;
            }
            return all_pass ? 0 : 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

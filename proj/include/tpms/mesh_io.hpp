#ifndef TPMS_MESH_IO_HPP
#define TPMS_MESH_IO_HPP

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpms/surface.hpp"

namespace tpms {
namespace mesh_io {

enum class Format { obj, ply };

inline Format format_from_string(const std::string& s) {
    if (s == "obj") return Format::obj;
    if (s == "ply") return Format::ply;
    throw std::invalid_argument("mesh format must be 'obj' or 'ply', got '" + s + "'");
}

// ASCII OBJ: "v x y z" with 17 significant digits, faces 1-based "f i j k".
inline void write_obj(const SurfaceMesh& mesh, const std::string& path) {
    if (mesh.vertices.empty() || mesh.faces.empty())
        throw std::invalid_argument("write_obj: refusing to write an empty mesh");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_obj: cannot open '" + path + "'");
    char buf[128];
    for (const auto& p : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x, p.y, p.z);
        out << buf;
    }
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!out) throw std::runtime_error("write_obj: write failed for '" + path + "'");
}

inline void write_ply(const SurfaceMesh& mesh, const std::string& path) {
    if (mesh.vertices.empty() || mesh.faces.empty())
        throw std::invalid_argument("write_ply: refusing to write an empty mesh");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_ply: cannot open '" + path + "'");
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "element face " << mesh.faces.size() << "\n";
    out << "property list uchar int vertex_indices\nend_header\n";
    char buf[128];
    for (const auto& p : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x, p.y, p.z);
        out << buf;
    }
    for (const auto& f : mesh.faces)
        out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    if (!out) throw std::runtime_error("write_ply: write failed for '" + path + "'");
}

inline void export_mesh(const SurfaceMesh& mesh, const std::string& path, Format format) {
    switch (format) {
        case Format::obj: write_obj(mesh, path); break;
        case Format::ply: write_ply(mesh, path); break;
    }
}

// Minimal readers, enough to round-trip our own files.
inline SurfaceMesh read_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_obj: cannot open '" + path + "'");
    SurfaceMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "v") {
            Vec3 p;
            ss >> p.x >> p.y >> p.z;
            mesh.vertices.push_back(p);
        } else if (tok == "f") {
            std::array<int, 3> f{};
            ss >> f[0] >> f[1] >> f[2];
            mesh.faces.push_back({f[0] - 1, f[1] - 1, f[2] - 1});
        }
    }
    return mesh;
}

inline SurfaceMesh read_ply(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_ply: cannot open '" + path + "'");
    std::string line;
    size_t nv = 0, nf = 0;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "element") {
            std::string what;
            size_t n;
            ss >> what >> n;
            if (what == "vertex") nv = n;
            if (what == "face") nf = n;
        } else if (tok == "end_header") {
            break;
        }
    }
    SurfaceMesh mesh;
    for (size_t i = 0; i < nv; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("read_ply: truncated vertices");
        std::istringstream ss(line);
        Vec3 p;
        ss >> p.x >> p.y >> p.z;
        mesh.vertices.push_back(p);
    }
    for (size_t i = 0; i < nf; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("read_ply: truncated faces");
        std::istringstream ss(line);
        int cnt;
        std::array<int, 3> f{};
        ss >> cnt >> f[0] >> f[1] >> f[2];
        if (cnt != 3) throw std::runtime_error("read_ply: non-triangular face");
        mesh.faces.push_back(f);
    }
    return mesh;
}

} // namespace mesh_io
} // namespace tpms

#endif

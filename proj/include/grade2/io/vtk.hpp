#pragma once

#include "grade2/error.hpp"
#include "grade2/fespace.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

namespace grade2::io {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v == 0.0 ? 0.0 : v);
    return buf;
}

/// Legacy ASCII VTK unstructured grid. Every triangle gets its own three
/// points so the discontinuous vorticity is shown without averaging.
/// Point data: velocity (vectors), pressure and vorticity (scalars), each only when given.
inline void write_vtk(std::ostream& os, const Mesh& m, const Field* u, const Field* p, const Field* z,
                      const std::string& title = "grade2 solution") {
    const int nt = static_cast<int>(m.num_triangles());
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << 3 * nt << " double\n";
    for (int t = 0; t < nt; ++t)
        for (int v : m.triangle(t)) os << fmt(m.vertex(v).x()) << ' ' << fmt(m.vertex(v).y()) << ' ' << fmt(0.0) << '\n';
    os << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (int t = 0; t < nt; ++t) os << "3 " << 3 * t << ' ' << 3 * t + 1 << ' ' << 3 * t + 2 << '\n';
    os << "CELL_TYPES " << nt << '\n';
    for (int t = 0; t < nt; ++t) os << "5\n";
    if (!u && !p && !z) return;
    os << "POINT_DATA " << 3 * nt << '\n';
    auto corner = [](int a) {
        std::array<double, 3> l{0, 0, 0};
        l[static_cast<std::size_t>(a)] = 1.0;
        return l;
    };
    if (u) {
        os << "VECTORS velocity double\n";
        for (int t = 0; t < nt; ++t)
            for (int a = 0; a < 3; ++a) {
                const Vec2 v = eval_vector(*u, t, corner(a));
                os << fmt(v.x()) << ' ' << fmt(v.y()) << ' ' << fmt(0.0) << '\n';
            }
    }
    auto scalars = [&](const char* name, const Field& f) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (int t = 0; t < nt; ++t)
            for (int a = 0; a < 3; ++a) os << fmt(eval_scalar(f, t, corner(a))) << '\n';
    };
    if (p) scalars("pressure", *p);
    if (z) scalars("vorticity", *z);
}

inline void write_vtk_file(const std::string& path, const Mesh& m, const Field* u, const Field* p, const Field* z) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write '" + path + "'");
    write_vtk(os, m, u, p, z);
}

} // namespace grade2::io

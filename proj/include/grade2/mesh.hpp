#pragma once

#include "grade2/error.hpp"
#include "grade2/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace grade2 {

/// A boundary edge oriented so that the domain lies on its left.
struct BoundaryEdge {
    std::array<int, 2> v;
    int marker = 0;
    int triangle = -1;  ///< the single adjacent triangle
    int edge = -1;      ///< index into Mesh::edges()
};

/// Conforming triangulation of a polygonal domain.
///
/// Immutable once built. Local edge k of a triangle is the edge opposite to
/// its local vertex k, i.e. (v1,v2), (v2,v0), (v0,v1).
class Mesh {
public:
    static Mesh build(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                      std::vector<std::pair<std::array<int, 2>, int>> boundary_edges);

    /// Builds a mesh whose boundary edges are deduced from the triangles.
    /// `marker` receives the edge midpoint.
    static Mesh from_triangles(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                               const std::function<int(const Vec2&)>& marker);

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    std::size_t num_boundary_edges() const { return boundary_.size(); }

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const Vec2& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    /// Triangles adjacent to each edge; second entry is -1 on the boundary.
    const std::vector<std::array<int, 2>>& edge_triangles() const { return edge_triangles_; }
    const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
    const BoundaryEdge& boundary_edge(int b) const { return boundary_[static_cast<std::size_t>(b)]; }
    /// Boundary-edge id of a mesh edge, or -1 for interior edges.
    int boundary_id_of_edge(int e) const { return edge_boundary_[static_cast<std::size_t>(e)]; }

    double area(int t) const {
        const auto& tri = triangle(t);
        return 0.5 * cross(vertex(tri[1]) - vertex(tri[0]), vertex(tri[2]) - vertex(tri[0]));
    }
    double total_area() const {
        double a = 0.0;
        for (int t = 0; t < static_cast<int>(num_triangles()); ++t) a += area(t);
        return a;
    }
    /// Unit exterior normal of a boundary edge.
    Vec2 normal(int b) const {
        const auto& be = boundary_edge(b);
        const Vec2 d = vertex(be.v[1]) - vertex(be.v[0]);
        return Vec2(d.y(), -d.x()).normalized();
    }
    double length(int b) const {
        const auto& be = boundary_edge(b);
        return (vertex(be.v[1]) - vertex(be.v[0])).norm();
    }
    double diameter() const;
    /// Longest edge.
    double h_max() const;

private:
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 2>> edge_triangles_;
    std::vector<std::array<int, 3>> triangle_edges_;
    std::vector<BoundaryEdge> boundary_;
    std::vector<int> edge_boundary_;
};

inline Mesh Mesh::build(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                        std::vector<std::pair<std::array<int, 2>, int>> boundary_edges) {
    Mesh m;
    m.vertices_ = std::move(vertices);
    m.triangles_ = std::move(triangles);
    const int nv = static_cast<int>(m.vertices_.size());

    for (std::size_t t = 0; t < m.triangles_.size(); ++t) {
        for (int v : m.triangles_[t])
            if (v < 0 || v >= nv)
                throw TopologyError("triangle " + std::to_string(t) + " references vertex " + std::to_string(v) +
                                    " out of range");
        if (!(m.area(static_cast<int>(t)) > 0.0))
            throw TopologyError("triangle " + std::to_string(t) + " is not positively oriented (signed area " +
                                std::to_string(m.area(static_cast<int>(t))) + ")");
    }

    std::map<std::pair<int, int>, int> edge_index;
    m.triangle_edges_.resize(m.triangles_.size());
    for (std::size_t t = 0; t < m.triangles_.size(); ++t) {
        const auto& tri = m.triangles_[t];
        for (int k = 0; k < 3; ++k) {
            int a = tri[static_cast<std::size_t>((k + 1) % 3)];
            int b = tri[static_cast<std::size_t>((k + 2) % 3)];
            if (a > b) std::swap(a, b);
            auto [it, inserted] = edge_index.try_emplace({a, b}, static_cast<int>(m.edges_.size()));
            if (inserted) {
                m.edges_.push_back({a, b});
                m.edge_triangles_.push_back({static_cast<int>(t), -1});
            } else {
                auto& adj = m.edge_triangles_[static_cast<std::size_t>(it->second)];
                if (adj[1] != -1)
                    throw TopologyError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                        ") is shared by more than two triangles (triangle " + std::to_string(t) + ")");
                adj[1] = static_cast<int>(t);
            }
            m.triangle_edges_[t][static_cast<std::size_t>(k)] = it->second;
        }
    }

    m.edge_boundary_.assign(m.edges_.size(), -1);
    for (std::size_t b = 0; b < boundary_edges.size(); ++b) {
        auto [v, marker] = boundary_edges[b];
        int a = std::min(v[0], v[1]), c = std::max(v[0], v[1]);
        auto it = edge_index.find({a, c});
        if (it == edge_index.end())
            throw TopologyError("boundary edge " + std::to_string(b) + " (" + std::to_string(v[0]) + "," +
                                std::to_string(v[1]) + ") is not an edge of any triangle");
        const int e = it->second;
        if (m.edge_triangles_[static_cast<std::size_t>(e)][1] != -1)
            throw TopologyError("boundary edge " + std::to_string(b) + " is shared by two triangles");
        if (m.edge_boundary_[static_cast<std::size_t>(e)] != -1)
            throw TopologyError("boundary edge " + std::to_string(b) + " is listed twice");
        m.edge_boundary_[static_cast<std::size_t>(e)] = static_cast<int>(b);
        const int t = m.edge_triangles_[static_cast<std::size_t>(e)][0];
        // Orient with the owning triangle's counter-clockwise order.
        const auto& tri = m.triangles_[static_cast<std::size_t>(t)];
        std::array<int, 2> oriented = v;
        for (int k = 0; k < 3; ++k)
            if (tri[static_cast<std::size_t>(k)] == v[1] && tri[static_cast<std::size_t>((k + 1) % 3)] == v[0])
                oriented = {v[1], v[0]};
        m.boundary_.push_back({oriented, marker, t, e});
    }
    for (std::size_t e = 0; e < m.edges_.size(); ++e)
        if (m.edge_triangles_[e][1] == -1 && m.edge_boundary_[e] == -1)
            throw TopologyError("edge (" + std::to_string(m.edges_[e][0]) + "," + std::to_string(m.edges_[e][1]) +
                                ") belongs to one triangle but is not a listed boundary edge");

    std::vector<int> in_count(static_cast<std::size_t>(nv), 0), out_count(static_cast<std::size_t>(nv), 0);
    for (const auto& be : m.boundary_) {
        ++out_count[static_cast<std::size_t>(be.v[0])];
        ++in_count[static_cast<std::size_t>(be.v[1])];
    }
    for (int v = 0; v < nv; ++v) {
        const int in = in_count[static_cast<std::size_t>(v)], out = out_count[static_cast<std::size_t>(v)];
        if (in + out != 0 && (in != 1 || out != 1))
            throw TopologyError("boundary edges do not close a loop at vertex " + std::to_string(v) + " (" +
                                std::to_string(in + out) + " incident boundary edges)");
    }
    return m;
}

inline Mesh Mesh::from_triangles(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                                 const std::function<int(const Vec2&)>& marker) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& tri : triangles)
        for (int k = 0; k < 3; ++k) {
            int a = tri[static_cast<std::size_t>(k)], b = tri[static_cast<std::size_t>((k + 1) % 3)];
            ++count[{std::min(a, b), std::max(a, b)}];
        }
    std::vector<std::pair<std::array<int, 2>, int>> bnd;
    for (const auto& [e, c] : count)
        if (c == 1) {
            const Vec2 mid = 0.5 * (vertices[static_cast<std::size_t>(e.first)] + vertices[static_cast<std::size_t>(e.second)]);
            bnd.push_back({{e.first, e.second}, marker(mid)});
        }
    return build(std::move(vertices), std::move(triangles), std::move(bnd));
}

inline double Mesh::diameter() const {
    Vec2 lo = vertices_.front(), hi = vertices_.front();
    for (const auto& p : vertices_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

inline double Mesh::h_max() const {
    double h = 0.0;
    for (const auto& e : edges_) h = std::max(h, (vertex(e[1]) - vertex(e[0])).norm());
    return h;
}

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

inline std::size_t read_section(std::istream& in, std::string& line, std::size_t& lineno, const std::string& name) {
    if (!next_content_line(in, line, lineno)) throw ParseError("expected section '" + name + "', got end of file", lineno);
    std::istringstream ss(line);
    std::string word;
    long long count = -1;
    std::string extra;
    if (!(ss >> word >> count) || word != name || count < 0 || (ss >> extra))
        throw ParseError("expected '" + name + " <count>'", lineno);
    return static_cast<std::size_t>(count);
}

template <std::size_t N>
std::array<double, N> read_record(std::istream& in, std::string& line, std::size_t& lineno, std::size_t expected_id,
                                  const char* what) {
    if (!next_content_line(in, line, lineno))
        throw ParseError(std::string("unexpected end of file in ") + what + " section", lineno);
    std::istringstream ss(line);
    long long id = -1;
    std::array<double, N> vals{};
    if (!(ss >> id)) throw ParseError(std::string("malformed ") + what + " record", lineno);
    for (auto& v : vals)
        if (!(ss >> v)) throw ParseError(std::string("malformed ") + what + " record", lineno);
    std::string extra;
    if (ss >> extra) throw ParseError(std::string("trailing data in ") + what + " record", lineno);
    if (id != static_cast<long long>(expected_id))
        throw ParseError(std::string(what) + " ids must be 0-based and contiguous: expected " +
                             std::to_string(expected_id) + ", got " + std::to_string(id),
                         lineno);
    return vals;
}

inline int as_index(double v, std::size_t bound, std::size_t lineno) {
    if (v != std::floor(v) || v < 0 || v >= static_cast<double>(bound))
        throw ParseError("vertex index " + std::to_string(static_cast<long long>(v)) + " out of range [0," +
                             std::to_string(bound) + ")",
                         lineno);
    return static_cast<int>(v);
}

} // namespace detail

/// Reads the native `mesh2d 1` ASCII format.
inline Mesh read_mesh(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!detail::next_content_line(in, line, lineno)) throw ParseError("empty mesh file", lineno);
    {
        std::istringstream ss(line);
        std::string tag;
        int version = 0;
        if (!(ss >> tag >> version) || tag != "mesh2d" || version != 1)
            throw ParseError("expected header 'mesh2d 1'", lineno);
    }
    const std::size_t nn = detail::read_section(in, line, lineno, "nodes");
    std::vector<Vec2> vertices;
    vertices.reserve(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        auto r = detail::read_record<2>(in, line, lineno, i, "nodes");
        if (!std::isfinite(r[0]) || !std::isfinite(r[1])) throw ParseError("non-finite coordinate", lineno);
        vertices.emplace_back(r[0], r[1]);
    }
    const std::size_t nt = detail::read_section(in, line, lineno, "triangles");
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        auto r = detail::read_record<3>(in, line, lineno, i, "triangles");
        triangles.push_back({detail::as_index(r[0], nn, lineno), detail::as_index(r[1], nn, lineno),
                             detail::as_index(r[2], nn, lineno)});
    }
    const std::size_t nb = detail::read_section(in, line, lineno, "boundary_edges");
    std::vector<std::pair<std::array<int, 2>, int>> bnd;
    bnd.reserve(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        auto r = detail::read_record<3>(in, line, lineno, i, "boundary_edges");
        if (r[2] != std::floor(r[2])) throw ParseError("boundary marker must be an integer", lineno);
        bnd.push_back({{detail::as_index(r[0], nn, lineno), detail::as_index(r[1], nn, lineno)}, static_cast<int>(r[2])});
    }
    if (detail::next_content_line(in, line, lineno)) throw ParseError("unexpected trailing content", lineno);
    return Mesh::build(std::move(vertices), std::move(triangles), std::move(bnd));
}

inline Mesh load_mesh(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open mesh file '" + path.string() + "'", 0);
    return read_mesh(in);
}

inline void write_mesh(std::ostream& out, const Mesh& m) {
    out << "mesh2d 1\n" << "nodes " << m.num_vertices() << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < m.num_vertices(); ++i)
        out << i << ' ' << m.vertices()[i].x() << ' ' << m.vertices()[i].y() << '\n';
    out << "triangles " << m.num_triangles() << '\n';
    for (std::size_t i = 0; i < m.num_triangles(); ++i) {
        const auto& t = m.triangles()[i];
        out << i << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    out << "boundary_edges " << m.num_boundary_edges() << '\n';
    for (std::size_t i = 0; i < m.num_boundary_edges(); ++i) {
        const auto& b = m.boundary_edges()[i];
        out << i << ' ' << b.v[0] << ' ' << b.v[1] << ' ' << b.marker << '\n';
    }
}

// Markers of the structured generators: bottom 1, right 2, top 3, left 4, holes 5.
namespace markers {
inline constexpr int bottom = 1, right = 2, top = 3, left = 4, hole = 5;
}

/// Structured triangulation of [x0,x1]x[y0,y1], each cell split along its
/// lower-left to upper-right diagonal.
inline Mesh rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny) {
    if (nx < 1 || ny < 1) throw InvalidArgument("rectangle_mesh needs at least one cell per direction");
    std::vector<Vec2> v;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            v.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::array<int, 3>> t;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    const double tol = 1e-12 * std::max(x1 - x0, y1 - y0);
    return Mesh::from_triangles(std::move(v), std::move(t), [=](const Vec2& p) {
        if (std::abs(p.y() - y0) < tol) return markers::bottom;
        if (std::abs(p.x() - x1) < tol) return markers::right;
        if (std::abs(p.y() - y1) < tol) return markers::top;
        return markers::left;
    });
}

inline Mesh unit_square_mesh(int n) { return rectangle_mesh(0.0, 1.0, 0.0, 1.0, n, n); }

/// Unit square with the square hole [1/4,3/4]^2 removed; n must be a multiple of 4.
inline Mesh square_with_hole_mesh(int n) {
    if (n < 4 || n % 4 != 0) throw InvalidArgument("square_with_hole_mesh needs n divisible by 4");
    Mesh full = unit_square_mesh(n);
    std::vector<std::array<int, 3>> t;
    for (int c = 0; c < static_cast<int>(full.num_triangles()); ++c) {
        const auto& tri = full.triangle(c);
        const Vec2 g = (full.vertex(tri[0]) + full.vertex(tri[1]) + full.vertex(tri[2])) / 3.0;
        if (!(g.x() > 0.25 && g.x() < 0.75 && g.y() > 0.25 && g.y() < 0.75)) t.push_back(tri);
    }
    std::vector<Vec2> v = full.vertices();
    // Drop vertices strictly inside the hole and renumber.
    std::vector<int> used(v.size(), -1);
    std::vector<Vec2> kept;
    for (auto& tri : t)
        for (int& i : tri) {
            if (used[static_cast<std::size_t>(i)] < 0) {
                used[static_cast<std::size_t>(i)] = static_cast<int>(kept.size());
                kept.push_back(v[static_cast<std::size_t>(i)]);
            }
            i = used[static_cast<std::size_t>(i)];
        }
    const double tol = 1e-12;
    return Mesh::from_triangles(std::move(kept), std::move(t), [=](const Vec2& p) {
        if (std::abs(p.y()) < tol) return markers::bottom;
        if (std::abs(p.x() - 1.0) < tol) return markers::right;
        if (std::abs(p.y() - 1.0) < tol) return markers::top;
        if (std::abs(p.x()) < tol) return markers::left;
        return markers::hole;
    });
}

/// Uniform refinement: every triangle is split into four through its edge midpoints.
inline Mesh refine(const Mesh& m) {
    std::vector<Vec2> v = m.vertices();
    const int nv = static_cast<int>(v.size());
    for (const auto& e : m.edges()) v.push_back(0.5 * (m.vertex(e[0]) + m.vertex(e[1])));
    std::vector<std::array<int, 3>> t;
    t.reserve(4 * m.num_triangles());
    for (std::size_t c = 0; c < m.num_triangles(); ++c) {
        const auto& tri = m.triangles()[c];
        const auto& te = m.triangle_edges()[c];
        const int m0 = nv + te[0], m1 = nv + te[1], m2 = nv + te[2];
        t.push_back({tri[0], m2, m1});
        t.push_back({m2, tri[1], m0});
        t.push_back({m1, m0, tri[2]});
        t.push_back({m0, m1, m2});
    }
    std::vector<std::pair<std::array<int, 2>, int>> bnd;
    for (const auto& be : m.boundary_edges()) {
        const int mid = nv + be.edge;
        bnd.push_back({{be.v[0], mid}, be.marker});
        bnd.push_back({{mid, be.v[1]}, be.marker});
    }
    return Mesh::build(std::move(v), std::move(t), std::move(bnd));
}

} // namespace grade2

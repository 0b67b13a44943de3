#pragma once

#include "grade2/error.hpp"
#include "grade2/geometry.hpp"
#include "grade2/mesh.hpp"
#include "grade2/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace grade2 {

/// Physical point of edge quadrature node q on boundary edge b.
inline Vec2 boundary_point(const Mesh& m, int b, double t) {
    const auto& be = m.boundary_edge(b);
    return (1.0 - t) * m.vertex(be.v[0]) + t * m.vertex(be.v[1]);
}

/// Connected component (closed loop) of every boundary edge. Ids are
/// contiguous and numbered in order of the lowest boundary-edge id.
inline std::vector<int> boundary_components(const Mesh& m) {
    const int nb = static_cast<int>(m.num_boundary_edges());
    std::vector<int> parent(static_cast<std::size_t>(nb));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    };
    std::vector<int> starting(m.num_vertices(), -1);
    for (int b = 0; b < nb; ++b) starting[static_cast<std::size_t>(m.boundary_edge(b).v[0])] = b;
    for (int b = 0; b < nb; ++b) {
        const int next = starting[static_cast<std::size_t>(m.boundary_edge(b).v[1])];
        const int ra = find(b), rb = find(next);
        if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
    }
    std::vector<int> label(static_cast<std::size_t>(nb), -1), comp(static_cast<std::size_t>(nb));
    int k = 0;
    for (int b = 0; b < nb; ++b) {
        const int r = find(b);
        if (label[static_cast<std::size_t>(r)] < 0) label[static_cast<std::size_t>(r)] = k++;
        comp[static_cast<std::size_t>(b)] = label[static_cast<std::size_t>(r)];
    }
    return comp;
}

inline int num_boundary_components(const Mesh& m) {
    const auto c = boundary_components(m);
    return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
}

/// Edge-quadrature approximation of the net flux of g through each boundary component.
inline std::vector<double> flux_per_component(const Mesh& m, const VectorFunction& g) {
    const auto comp = boundary_components(m);
    std::vector<double> flux(comp.empty() ? 0 : static_cast<std::size_t>(*std::max_element(comp.begin(), comp.end()) + 1), 0.0);
    for (int b = 0; b < static_cast<int>(m.num_boundary_edges()); ++b) {
        const Vec2 n = m.normal(b);
        const double len = m.length(b);
        for (const auto& q : quad::edge_rule()) {
            const Vec2 x = boundary_point(m, b, q.t);
            flux[static_cast<std::size_t>(comp[static_cast<std::size_t>(b)])] += q.weight * len * g(x.x(), x.y()).dot(n);
        }
    }
    return flux;
}

/// Largest |g| over boundary vertices and edge quadrature points.
inline double boundary_scale(const Mesh& m, const VectorFunction& g) {
    double s = 0.0;
    for (int b = 0; b < static_cast<int>(m.num_boundary_edges()); ++b) {
        for (double t : {0.0, 1.0}) {
            const Vec2 x = boundary_point(m, b, t);
            s = std::max(s, g(x.x(), x.y()).norm());
        }
        for (const auto& q : quad::edge_rule()) {
            const Vec2 x = boundary_point(m, b, q.t);
            s = std::max(s, g(x.x(), x.y()).norm());
        }
    }
    return s;
}

/// Default sign threshold: 1e-12 times the boundary magnitude of g.
inline double default_eps_n(const Mesh& m, const VectorFunction& g) { return 1e-12 * boundary_scale(m, g); }

/// A vertex of the closed inflow boundary where g.n vanishes numerically.
struct DegeneratePoint {
    int vertex;
    double gn;          ///< g.n evaluated with the adjacent inflow edge's normal
    bool at_junction;   ///< true when the vertex separates inflow and non-inflow edges
};

/// Partition of the boundary into the inflow part (alpha g.n < 0) and the rest.
struct BoundaryPartition {
    std::vector<int> gamma_minus;       ///< boundary-edge ids, ascending
    std::vector<int> gamma_zero_plus;   ///< boundary-edge ids, ascending
    std::vector<char> is_inflow;        ///< per boundary edge
    std::vector<int> junctions;         ///< vertex ids
    std::vector<DegeneratePoint> degenerate_points;
    std::optional<double> beta;         ///< 1 / min |g.n| over the closed inflow boundary
    double eps_n = 0.0;
    double alpha = 0.0;

    bool inflow(int b) const { return is_inflow[static_cast<std::size_t>(b)] != 0; }
    bool has_interior_degeneracy() const {
        return std::any_of(degenerate_points.begin(), degenerate_points.end(),
                           [](const DegeneratePoint& d) { return !d.at_junction; });
    }
};

/// Classifies boundary edges by the sign of alpha g.n at their quadrature points.
///
/// Ties (alpha g.n in [-eps_n, 0]) go to the non-inflow part. Throws
/// TopologyError when alpha g.n changes sign inside a single edge.
inline BoundaryPartition classify_boundary(const Mesh& m, const VectorFunction& g, double alpha, double eps_n) {
    if (!(eps_n >= 0.0)) throw InvalidArgument("eps_n must be non-negative");
    BoundaryPartition part;
    part.eps_n = eps_n;
    part.alpha = alpha;
    const int nb = static_cast<int>(m.num_boundary_edges());
    part.is_inflow.assign(static_cast<std::size_t>(nb), 0);
    double min_gn = std::numeric_limits<double>::infinity();

    for (int b = 0; b < nb; ++b) {
        const Vec2 n = m.normal(b);
        bool all_negative = true;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        auto sample = [&](double t, bool quadrature_point) {
            const Vec2 x = boundary_point(m, b, t);
            const double agn = alpha * g(x.x(), x.y()).dot(n);
            lo = std::min(lo, agn);
            hi = std::max(hi, agn);
            if (quadrature_point && !(agn < -eps_n)) all_negative = false;
        };
        sample(0.0, false);
        sample(1.0, false);
        for (const auto& q : quad::edge_rule()) sample(q.t, true);
        if (alpha != 0.0 && lo < -eps_n && hi > eps_n)
            throw TopologyError("alpha g.n changes sign inside boundary edge " + std::to_string(b) +
                                "; the mesh does not resolve the inflow boundary");
        if (alpha != 0.0 && all_negative) {
            part.is_inflow[static_cast<std::size_t>(b)] = 1;
            part.gamma_minus.push_back(b);
        } else {
            part.gamma_zero_plus.push_back(b);
        }
    }

    // Per vertex: the inflow edges touching it and whether it separates the two sets.
    std::vector<int> in_edge(m.num_vertices(), -1), out_edge(m.num_vertices(), -1);
    for (int b = 0; b < nb; ++b) {
        out_edge[static_cast<std::size_t>(m.boundary_edge(b).v[0])] = b;
        in_edge[static_cast<std::size_t>(m.boundary_edge(b).v[1])] = b;
    }
    for (int v = 0; v < static_cast<int>(m.num_vertices()); ++v) {
        const int a = in_edge[static_cast<std::size_t>(v)], c = out_edge[static_cast<std::size_t>(v)];
        if (a < 0) continue;
        const bool ia = part.inflow(a), ic = part.inflow(c);
        if (ia != ic) part.junctions.push_back(v);
        if (!ia && !ic) continue;
        const Vec2 x = m.vertex(v);
        const Vec2 gv = g(x.x(), x.y());
        double gn_min = std::numeric_limits<double>::infinity();
        double gn_at = 0.0;
        for (int e : {a, c}) {
            if (!part.inflow(e)) continue;
            const double gn = gv.dot(m.normal(e));
            if (std::abs(gn) < gn_min) {
                gn_min = std::abs(gn);
                gn_at = gn;
            }
        }
        min_gn = std::min(min_gn, gn_min);
        if (gn_min <= eps_n) part.degenerate_points.push_back({v, gn_at, ia != ic});
    }
    for (int b : part.gamma_minus) {
        const Vec2 n = m.normal(b);
        for (const auto& q : quad::edge_rule()) {
            const Vec2 x = boundary_point(m, b, q.t);
            min_gn = std::min(min_gn, std::abs(g(x.x(), x.y()).dot(n)));
        }
    }
    if (!part.gamma_minus.empty() && min_gn > eps_n) part.beta = 1.0 / min_gn;
    return part;
}

} // namespace grade2

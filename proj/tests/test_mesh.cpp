#include "grade2/boundary.hpp"
#include "grade2/mesh.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace grade2;

namespace {

const char* two_triangle_square = R"(mesh2d 1
# unit square split along the diagonal
nodes 4
0 0 0
1 1 0
2 1 1
3 0 1
triangles 2
0 0 1 2
1 0 2 3
boundary_edges 4
0 0 1 1
1 1 2 2
2 2 3 3
3 3 0 4
)";

Mesh parse(const std::string& s) {
    std::istringstream in(s);
    return read_mesh(in);
}

VectorFunction constant(double a, double b) {
    return [=](double, double) { return Vec2(a, b); };
}

} // namespace

TEST(MeshLoad, TwoTriangleSquare) {
    const Mesh m = parse(two_triangle_square);
    EXPECT_EQ(m.num_vertices(), 4u);
    EXPECT_EQ(m.num_triangles(), 2u);
    EXPECT_EQ(m.num_boundary_edges(), 4u);
    EXPECT_EQ(m.num_edges(), 5u);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-15);
}

TEST(MeshLoad, VertexIndexOutOfRangeIsParseError) {
    std::string s = two_triangle_square;
    s.replace(s.find("1 0 2 3"), 7, "1 0 2 7");
    try {
        parse(s);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 10u);
        EXPECT_NE(std::string(e.what()).find("out of range"), std::string::npos);
    }
}

TEST(MeshLoad, OpenBoundaryLoopIsTopologyError) {
    // The last boundary edge is missing, so the loop does not close.
    std::string s = two_triangle_square;
    s.replace(s.find("boundary_edges 4"), 16, "boundary_edges 3");
    s.erase(s.find("3 3 0 4\n"));
    EXPECT_THROW(parse(s), TopologyError);
}

TEST(MeshLoad, NegativeOrientationIsTopologyError) {
    std::string s = two_triangle_square;
    s.replace(s.find("0 0 1 2"), 7, "0 0 2 1");
    EXPECT_THROW(parse(s), TopologyError);
}

TEST(MeshLoad, MalformedInputsCarryLineNumbers) {
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("mesh2d 2\n"), ParseError);
    std::string s = two_triangle_square;
    s.replace(s.find("2 1 1"), 5, "5 1 1");
    try {
        parse(s);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 6u);
    }
    s = two_triangle_square;
    s += "garbage\n";
    EXPECT_THROW(parse(s), ParseError);
}

TEST(MeshLoad, WriteReadRoundTrip) {
    const Mesh m = square_with_hole_mesh(8);
    std::stringstream ss;
    write_mesh(ss, m);
    const Mesh r = read_mesh(ss);
    ASSERT_EQ(r.num_vertices(), m.num_vertices());
    ASSERT_EQ(r.num_triangles(), m.num_triangles());
    ASSERT_EQ(r.num_boundary_edges(), m.num_boundary_edges());
    for (std::size_t i = 0; i < m.num_vertices(); ++i) EXPECT_EQ(r.vertices()[i], m.vertices()[i]);
    EXPECT_EQ(r.triangles(), m.triangles());
}

TEST(MeshInvariants, EdgeAdjacencyAndLoops) {
    for (const Mesh& m : {unit_square_mesh(5), square_with_hole_mesh(8), refine(square_with_hole_mesh(4))}) {
        int boundary = 0;
        for (std::size_t e = 0; e < m.num_edges(); ++e) {
            const auto adj = m.edge_triangles()[e];
            EXPECT_GE(adj[0], 0);
            if (adj[1] < 0) {
                ++boundary;
                EXPECT_GE(m.boundary_id_of_edge(static_cast<int>(e)), 0);
            }
        }
        EXPECT_EQ(boundary, static_cast<int>(m.num_boundary_edges()));
        for (std::size_t t = 0; t < m.num_triangles(); ++t) EXPECT_GT(m.area(static_cast<int>(t)), 0.0);
        std::vector<int> deg(m.num_vertices(), 0);
        for (const auto& b : m.boundary_edges()) ++deg[static_cast<std::size_t>(b.v[0])], ++deg[static_cast<std::size_t>(b.v[1])];
        for (int d : deg) EXPECT_TRUE(d == 0 || d == 2);
    }
}

TEST(MeshGenerators, RefinementQuartersCells) {
    const Mesh m = unit_square_mesh(3);
    const Mesh r = refine(m);
    EXPECT_EQ(r.num_triangles(), 4 * m.num_triangles());
    EXPECT_EQ(r.num_boundary_edges(), 2 * m.num_boundary_edges());
    EXPECT_NEAR(r.total_area(), 1.0, 1e-14);
    EXPECT_NEAR(r.h_max(), 0.5 * m.h_max(), 1e-14);
}

TEST(BoundaryComponents, UnitSquareHasOne) {
    const Mesh m = unit_square_mesh(4);
    const auto c = boundary_components(m);
    EXPECT_TRUE(std::all_of(c.begin(), c.end(), [](int i) { return i == 0; }));
    EXPECT_EQ(num_boundary_components(m), 1);
}

TEST(BoundaryComponents, SquareWithHoleHasOuterAndInner) {
    const Mesh m = square_with_hole_mesh(8);
    const auto c = boundary_components(m);
    EXPECT_EQ(num_boundary_components(m), 2);
    for (std::size_t b = 0; b < c.size(); ++b)
        EXPECT_EQ(c[b], m.boundary_edges()[b].marker == markers::hole ? 1 : 0);
}

TEST(BoundaryComponents, RefinementKeepsCount) {
    Mesh m = square_with_hole_mesh(4);
    for (int i = 0; i < 2; ++i) {
        m = refine(m);
        EXPECT_EQ(num_boundary_components(m), 2);
    }
}

TEST(ClassifyBoundary, UniformFlowPositiveAlpha) {
    const Mesh m = unit_square_mesh(4);
    const auto part = classify_boundary(m, constant(1, 0), 1.0, 1e-12);
    for (int b : part.gamma_minus) EXPECT_EQ(m.boundary_edge(b).marker, markers::left);
    EXPECT_EQ(part.gamma_minus.size(), 4u);
    EXPECT_EQ(part.gamma_minus.size() + part.gamma_zero_plus.size(), m.num_boundary_edges());
    std::set<Vec2, bool (*)(const Vec2&, const Vec2&)> corners([](const Vec2& a, const Vec2& b) {
        return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });
    for (int v : part.junctions) corners.insert(m.vertex(v));
    ASSERT_EQ(corners.size(), 2u);
    EXPECT_EQ(*corners.begin(), Vec2(0, 0));
    EXPECT_EQ(*corners.rbegin(), Vec2(0, 1));
    ASSERT_TRUE(part.beta.has_value());
    EXPECT_DOUBLE_EQ(*part.beta, 1.0);
}

TEST(ClassifyBoundary, NegativeAlphaFlipsToRightEdge) {
    const Mesh m = unit_square_mesh(4);
    const auto part = classify_boundary(m, constant(1, 0), -1.0, 1e-12);
    ASSERT_EQ(part.gamma_minus.size(), 4u);
    for (int b : part.gamma_minus) EXPECT_EQ(m.boundary_edge(b).marker, markers::right);
}

TEST(ClassifyBoundary, ZeroAlphaHasNoInflow) {
    const Mesh m = unit_square_mesh(4);
    const auto part = classify_boundary(m, constant(1, 0), 0.0, 1e-12);
    EXPECT_TRUE(part.gamma_minus.empty());
    EXPECT_EQ(part.gamma_zero_plus.size(), m.num_boundary_edges());
    EXPECT_FALSE(part.beta.has_value());
}

TEST(ClassifyBoundary, SignFlipSwapsSetsForNonDegenerateData) {
    const Mesh m = square_with_hole_mesh(8);
    const VectorFunction g = [](double x, double y) { return Vec2(1.0 + 0.3 * y, 0.2 * x); };
    const auto p = classify_boundary(m, g, 0.7, 1e-12);
    const auto q = classify_boundary(m, g, -0.7, 1e-12);
    for (int b = 0; b < static_cast<int>(m.num_boundary_edges()); ++b) {
        bool tangential = true;
        for (double t : {0.0, 0.5, 1.0}) {
            const Vec2 x = boundary_point(m, b, t);
            if (std::abs(g(x.x(), x.y()).dot(m.normal(b))) > 1e-12) tangential = false;
        }
        if (tangential) continue;
        EXPECT_NE(p.inflow(b), q.inflow(b)) << "edge " << b;
    }
}

TEST(ClassifyBoundary, SignChangeInsideEdgeIsTopologyError) {
    // g.n on the left edge changes sign at y = 0.5, the midpoint of the single edge.
    const Mesh m = unit_square_mesh(1);
    const VectorFunction g = [](double, double y) { return Vec2(y - 0.5, 0.0); };
    EXPECT_THROW(classify_boundary(m, g, 1.0, 1e-12), TopologyError);
}

TEST(ClassifyBoundary, InteriorZeroIsDegeneratePoint) {
    // g.n = -(y - 1/2)^2 on the left edge vanishes at the mesh vertex y = 1/2.
    const Mesh m = unit_square_mesh(4);
    const VectorFunction g = [](double, double y) { return Vec2((y - 0.5) * (y - 0.5), 0.0); };
    const auto part = classify_boundary(m, g, 1.0, 1e-12);
    EXPECT_TRUE(part.has_interior_degeneracy());
    EXPECT_FALSE(part.beta.has_value());
}

TEST(Flux, UniformFlowHasZeroFlux) {
    const auto f = flux_per_component(unit_square_mesh(3), constant(1, 0));
    ASSERT_EQ(f.size(), 1u);
    EXPECT_NEAR(f[0], 0.0, 1e-15);
}

TEST(Flux, RadialFieldGivesTwiceTheArea) {
    const auto f = flux_per_component(unit_square_mesh(3), [](double x, double y) { return Vec2(x, y); });
    EXPECT_NEAR(f[0], 2.0, 1e-14);
}

TEST(Flux, QuinticDataExactOnEveryRefinement) {
    // Outer loop: int div g over the full square; hole loop: minus int div g over the hole.
    // g = (x^5, y^4 x): div g = 5 x^4 + 4 y^3 x.
    const VectorFunction g = [](double x, double y) { return Vec2(std::pow(x, 5), std::pow(y, 4) * x); };
    auto integral = [](double a, double b) {  // int_a^b int_a^b 5x^4 + 4y^3 x
        return (std::pow(b, 5) - std::pow(a, 5)) * (b - a) + (std::pow(b, 4) - std::pow(a, 4)) * 0.5 * (b * b - a * a);
    };
    const double hole = integral(0.25, 0.75);
    const double outer = integral(0.0, 1.0);
    Mesh m = square_with_hole_mesh(4);
    for (int k = 0; k < 3; ++k) {
        const auto f = flux_per_component(m, g);
        ASSERT_EQ(f.size(), 2u);
        EXPECT_NEAR(f[0], outer, 1e-14);
        EXPECT_NEAR(f[1], -hole, 1e-14);
        m = refine(m);
    }
}

#pragma once

#include "grade2/error.hpp"
#include "grade2/geometry.hpp"
#include "grade2/mesh.hpp"
#include "grade2/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>

namespace grade2 {

/// Finite-element spaces used by the solver:
///  - velocity:  continuous piecewise quadratic vectors (Taylor-Hood velocity)
///  - pressure:  continuous piecewise linear scalars, zero mean
///  - vorticity: discontinuous piecewise linear scalars
enum class SpaceKind { velocity, pressure, vorticity };

inline const char* to_string(SpaceKind k) {
    switch (k) {
    case SpaceKind::velocity: return "velocity";
    case SpaceKind::pressure: return "pressure";
    case SpaceKind::vorticity: return "vorticity";
    }
    return "?";
}

/// Affine map of one triangle.
struct ElementGeometry {
    std::array<Vec2, 3> x;
    double area;
    std::array<Vec2, 3> grad_lambda;

    ElementGeometry(const Mesh& m, int t) {
        const auto& tri = m.triangle(t);
        for (int a = 0; a < 3; ++a) x[static_cast<std::size_t>(a)] = m.vertex(tri[static_cast<std::size_t>(a)]);
        area = m.area(t);
        for (int a = 0; a < 3; ++a) {
            const Vec2& p = x[static_cast<std::size_t>((a + 1) % 3)];
            const Vec2& q = x[static_cast<std::size_t>((a + 2) % 3)];
            // Gradient of the barycentric coordinate that vanishes on edge (p,q).
            grad_lambda[static_cast<std::size_t>(a)] = Vec2(p.y() - q.y(), q.x() - p.x()) / (2.0 * area);
        }
    }
    Vec2 point(const std::array<double, 3>& l) const { return l[0] * x[0] + l[1] * x[1] + l[2] * x[2]; }
};

/// Barycentric coordinates of point p in triangle geometry g.
inline std::array<double, 3> barycentric(const ElementGeometry& g, const Vec2& p) {
    std::array<double, 3> l{};
    for (int a = 0; a < 3; ++a)
        l[static_cast<std::size_t>(a)] = 1.0 / 3.0 + g.grad_lambda[static_cast<std::size_t>(a)].dot(p - (g.x[0] + g.x[1] + g.x[2]) / 3.0);
    return l;
}

namespace p2 {

/// Local ordering: vertices 0..2, then edge midpoints 3+k for the edge opposite vertex k.
inline std::array<double, 6> values(const std::array<double, 3>& l) {
    return {l[0] * (2 * l[0] - 1), l[1] * (2 * l[1] - 1), l[2] * (2 * l[2] - 1),
            4 * l[1] * l[2], 4 * l[2] * l[0], 4 * l[0] * l[1]};
}

inline std::array<Vec2, 6> gradients(const ElementGeometry& g, const std::array<double, 3>& l) {
    const auto& G = g.grad_lambda;
    return {(4 * l[0] - 1) * G[0], (4 * l[1] - 1) * G[1], (4 * l[2] - 1) * G[2],
            4 * (l[1] * G[2] + l[2] * G[1]), 4 * (l[2] * G[0] + l[0] * G[2]), 4 * (l[0] * G[1] + l[1] * G[0])};
}

} // namespace p2

/// Describes one discrete space on a shared mesh.
class SpaceDescriptor {
public:
    SpaceDescriptor(std::shared_ptr<const Mesh> mesh, SpaceKind kind) : mesh_(std::move(mesh)), kind_(kind) {
        if (!mesh_) throw InvalidArgument("SpaceDescriptor needs a mesh");
    }

    SpaceKind kind() const { return kind_; }
    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

    /// Scalar P2 node count (vertices + edges).
    int p2_nodes() const { return static_cast<int>(mesh_->num_vertices() + mesh_->num_edges()); }

    int dof_count() const {
        switch (kind_) {
        case SpaceKind::velocity: return 2 * p2_nodes();
        case SpaceKind::pressure: return static_cast<int>(mesh_->num_vertices());
        case SpaceKind::vorticity: return 3 * static_cast<int>(mesh_->num_triangles());
        }
        return 0;
    }

    /// Global scalar P2 node of local node i (0..5) of triangle t.
    int p2_node(int t, int i) const {
        if (i < 3) return mesh_->triangle(t)[static_cast<std::size_t>(i)];
        return static_cast<int>(mesh_->num_vertices()) + mesh_->triangle_edges()[static_cast<std::size_t>(t)][static_cast<std::size_t>(i - 3)];
    }

    /// Location of a scalar P2 node.
    Vec2 p2_point(int node) const {
        const int nv = static_cast<int>(mesh_->num_vertices());
        if (node < nv) return mesh_->vertex(node);
        const auto& e = mesh_->edges()[static_cast<std::size_t>(node - nv)];
        return 0.5 * (mesh_->vertex(e[0]) + mesh_->vertex(e[1]));
    }

    /// Location of a degree of freedom; for velocity, dofs [0,n) are x-components and [n,2n) y-components.
    Vec2 dof_point(int dof) const {
        switch (kind_) {
        case SpaceKind::velocity: return p2_point(dof % p2_nodes());
        case SpaceKind::pressure: return mesh_->vertex(dof);
        case SpaceKind::vorticity: return mesh_->vertex(mesh_->triangle(dof / 3)[static_cast<std::size_t>(dof % 3)]);
        }
        return {};
    }

    bool same_mesh(const SpaceDescriptor& o) const { return mesh_ == o.mesh_; }

private:
    std::shared_ptr<const Mesh> mesh_;
    SpaceKind kind_;
};

struct Spaces {
    SpaceDescriptor velocity;
    SpaceDescriptor pressure;
    SpaceDescriptor vorticity;

    const Mesh& mesh() const { return velocity.mesh(); }
};

inline Spaces build_spaces(std::shared_ptr<const Mesh> mesh) {
    return {SpaceDescriptor(mesh, SpaceKind::velocity), SpaceDescriptor(mesh, SpaceKind::pressure),
            SpaceDescriptor(mesh, SpaceKind::vorticity)};
}

inline Spaces build_spaces(Mesh mesh) { return build_spaces(std::make_shared<const Mesh>(std::move(mesh))); }

/// Coefficient vector bound to a space.
struct Field {
    SpaceDescriptor space;
    Eigen::VectorXd coefficients;

    explicit Field(SpaceDescriptor s) : space(std::move(s)), coefficients(Eigen::VectorXd::Zero(space.dof_count())) {}
    Field(SpaceDescriptor s, Eigen::VectorXd c) : space(std::move(s)), coefficients(std::move(c)) {
        if (coefficients.size() != space.dof_count())
            throw InvalidArgument(std::string("coefficient length does not match the ") + to_string(space.kind()) +
                                  " space");
    }

    const Mesh& mesh() const { return space.mesh(); }
    SpaceKind kind() const { return space.kind(); }
};

// ---------------------------------------------------------------------------
// Pointwise evaluation inside a triangle

inline double eval_scalar(const Field& f, int t, const std::array<double, 3>& l) {
    const auto& c = f.coefficients;
    if (f.kind() == SpaceKind::vorticity) return l[0] * c[3 * t] + l[1] * c[3 * t + 1] + l[2] * c[3 * t + 2];
    if (f.kind() == SpaceKind::pressure) {
        const auto& tri = f.mesh().triangle(t);
        return l[0] * c[tri[0]] + l[1] * c[tri[1]] + l[2] * c[tri[2]];
    }
    throw InvalidArgument("eval_scalar on a vector field");
}

inline Vec2 grad_scalar(const Field& f, int t, const ElementGeometry& g) {
    const auto& c = f.coefficients;
    std::array<double, 3> v{};
    if (f.kind() == SpaceKind::vorticity) {
        v = {c[3 * t], c[3 * t + 1], c[3 * t + 2]};
    } else if (f.kind() == SpaceKind::pressure) {
        const auto& tri = f.mesh().triangle(t);
        v = {c[tri[0]], c[tri[1]], c[tri[2]]};
    } else {
        throw InvalidArgument("grad_scalar on a vector field");
    }
    return v[0] * g.grad_lambda[0] + v[1] * g.grad_lambda[1] + v[2] * g.grad_lambda[2];
}

inline Vec2 eval_vector(const Field& f, int t, const std::array<double, 3>& l) {
    if (f.kind() != SpaceKind::velocity) throw InvalidArgument("eval_vector on a scalar field");
    const int n = f.space.p2_nodes();
    const auto phi = p2::values(l);
    Vec2 u = Vec2::Zero();
    for (int i = 0; i < 6; ++i) {
        const int node = f.space.p2_node(t, i);
        u += phi[static_cast<std::size_t>(i)] * Vec2(f.coefficients[node], f.coefficients[n + node]);
    }
    return u;
}

/// Row i holds the gradient of velocity component i.
inline Mat2 grad_vector(const Field& f, int t, const ElementGeometry& g, const std::array<double, 3>& l) {
    if (f.kind() != SpaceKind::velocity) throw InvalidArgument("grad_vector on a scalar field");
    const int n = f.space.p2_nodes();
    const auto dphi = p2::gradients(g, l);
    Mat2 G = Mat2::Zero();
    for (int i = 0; i < 6; ++i) {
        const int node = f.space.p2_node(t, i);
        G.row(0) += f.coefficients[node] * dphi[static_cast<std::size_t>(i)].transpose();
        G.row(1) += f.coefficients[n + node] * dphi[static_cast<std::size_t>(i)].transpose();
    }
    return G;
}

// ---------------------------------------------------------------------------
// Interpolation and projection

namespace detail {
inline double checked(double v, const Vec2& p) {
    if (!std::isfinite(v))
        throw DomainError("non-finite value at dof point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")");
    return v;
}
} // namespace detail

inline double integral(const Field& f);

/// Shifts a pressure field to zero mean.
inline void finalize_pressure(Field& p) {
    if (p.kind() != SpaceKind::pressure) throw InvalidArgument("finalize_pressure expects a pressure field");
    p.coefficients.array() -= integral(p) / p.mesh().total_area();
}

/// Nodal interpolation of a scalar function; pressure results are shifted to zero mean.
inline Field interpolate(const ScalarFunction& fn, const SpaceDescriptor& space) {
    if (space.kind() == SpaceKind::velocity) throw InvalidArgument("scalar function given for the velocity space");
    Field f(space);
    for (int i = 0; i < space.dof_count(); ++i) {
        const Vec2 p = space.dof_point(i);
        f.coefficients[i] = detail::checked(fn(p.x(), p.y()), p);
    }
    if (space.kind() == SpaceKind::pressure) finalize_pressure(f);
    return f;
}

inline Field interpolate(const VectorFunction& fn, const SpaceDescriptor& space) {
    if (space.kind() != SpaceKind::velocity) throw InvalidArgument("vector function given for a scalar space");
    Field f(space);
    const int n = space.p2_nodes();
    for (int i = 0; i < n; ++i) {
        const Vec2 p = space.p2_point(i);
        const Vec2 v = fn(p.x(), p.y());
        f.coefficients[i] = detail::checked(v.x(), p);
        f.coefficients[n + i] = detail::checked(v.y(), p);
    }
    return f;
}

/// Local P1 mass matrix over a triangle of unit area.
inline Eigen::Matrix3d p1_unit_mass() {
    Eigen::Matrix3d M;
    M << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    return M / 12.0;
}

/// Cell-wise L2 projection of a function onto the vorticity space.
inline Field project_vorticity(const ScalarFunction& fn, const SpaceDescriptor& space) {
    if (space.kind() != SpaceKind::vorticity) throw InvalidArgument("project_vorticity expects the vorticity space");
    Field f(space);
    const Mesh& m = space.mesh();
    const Eigen::Matrix3d Minv = p1_unit_mass().inverse();
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        Eigen::Vector3d b = Eigen::Vector3d::Zero();
        for (const auto& q : quad::triangle_rule()) {
            const Vec2 x = g.point(q.bary);
            const double v = detail::checked(fn(x.x(), x.y()), x);
            for (int a = 0; a < 3; ++a) b[a] += q.weight * v * q.bary[static_cast<std::size_t>(a)];
        }
        f.coefficients.segment<3>(3 * t) = Minv * b;
    }
    return f;
}

/// curl u = d u2/dx - d u1/dy of a velocity field; exact in the vorticity space.
inline Field curl(const Field& u, const SpaceDescriptor& vorticity) {
    if (u.kind() != SpaceKind::velocity || vorticity.kind() != SpaceKind::vorticity || !u.space.same_mesh(vorticity))
        throw InvalidArgument("curl needs a velocity field and the vorticity space of the same mesh");
    Field z(vorticity);
    const Mesh& m = u.mesh();
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        for (int a = 0; a < 3; ++a) {
            std::array<double, 3> l{0, 0, 0};
            l[static_cast<std::size_t>(a)] = 1.0;
            const Mat2 G = grad_vector(u, t, g, l);
            z.coefficients[3 * t + a] = G(1, 0) - G(0, 1);
        }
    }
    return z;
}

// ---------------------------------------------------------------------------
// Integrals and norms

inline double integral(const Field& f) {
    const Mesh& m = f.mesh();
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const double a = m.area(t);
        for (const auto& q : quad::triangle_rule()) s += a * q.weight * eval_scalar(f, t, q.bary);
    }
    return s;
}

inline double mean(const Field& f) { return integral(f) / f.mesh().total_area(); }

struct Norms {
    double l2 = 0.0;
    double h1_semi = 0.0;  ///< broken (cell-wise) gradient for the vorticity space
    double linf_dof = 0.0;
};

inline Norms norms(const Field& f) {
    const Mesh& m = f.mesh();
    double l2 = 0.0, h1 = 0.0;
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        for (const auto& q : quad::triangle_rule()) {
            const double w = g.area * q.weight;
            if (f.kind() == SpaceKind::velocity) {
                l2 += w * eval_vector(f, t, q.bary).squaredNorm();
                h1 += w * grad_vector(f, t, g, q.bary).squaredNorm();
            } else {
                const double v = eval_scalar(f, t, q.bary);
                l2 += w * v * v;
                h1 += w * grad_scalar(f, t, g).squaredNorm();
            }
        }
    }
    return {std::sqrt(l2), std::sqrt(h1), f.coefficients.size() ? f.coefficients.cwiseAbs().maxCoeff() : 0.0};
}

/// L2 distance between a scalar field and a function.
inline double l2_error(const Field& f, const ScalarFunction& exact) {
    const Mesh& m = f.mesh();
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        for (const auto& q : quad::triangle_rule()) {
            const Vec2 x = g.point(q.bary);
            const double d = eval_scalar(f, t, q.bary) - exact(x.x(), x.y());
            s += g.area * q.weight * d * d;
        }
    }
    return std::sqrt(s);
}

inline double l2_error(const Field& f, const VectorFunction& exact) {
    const Mesh& m = f.mesh();
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        for (const auto& q : quad::triangle_rule()) {
            const Vec2 x = g.point(q.bary);
            s += g.area * q.weight * (eval_vector(f, t, q.bary) - exact(x.x(), x.y())).squaredNorm();
        }
    }
    return std::sqrt(s);
}

/// Broken H1 seminorm of (f - exact) for a scalar field.
inline double h1_semi_error(const Field& f, const VectorFunction& exact_grad) {
    const Mesh& m = f.mesh();
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        const Vec2 gf = grad_scalar(f, t, g);
        for (const auto& q : quad::triangle_rule()) {
            const Vec2 x = g.point(q.bary);
            s += g.area * q.weight * (gf - exact_grad(x.x(), x.y())).squaredNorm();
        }
    }
    return std::sqrt(s);
}

inline double h1_semi_error(const Field& f, const TensorFunction& exact_grad) {
    const Mesh& m = f.mesh();
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        for (const auto& q : quad::triangle_rule()) {
            const Vec2 x = g.point(q.bary);
            s += g.area * q.weight * (grad_vector(f, t, g, q.bary) - exact_grad(x.x(), x.y())).squaredNorm();
        }
    }
    return std::sqrt(s);
}

/// Difference of two fields on the same space.
inline Field operator-(const Field& a, const Field& b) {
    if (a.kind() != b.kind() || !a.space.same_mesh(b.space)) throw InvalidArgument("field spaces differ");
    return Field(a.space, a.coefficients - b.coefficients);
}

} // namespace grade2

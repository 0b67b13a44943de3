#pragma once

#include "grade2/boundary.hpp"
#include "grade2/error.hpp"
#include "grade2/fespace.hpp"
#include "grade2/geometry.hpp"
#include "grade2/quadrature.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace grade2 {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Blocks of the discrete generalized Stokes operator
///   a_z(u,v) = nu (grad u, grad v) + (z x u, v),   b(v,q) = -(q, div v),
/// with z x u = (-z u2, z u1). Velocity blocks act on all velocity dofs; the
/// Dirichlet dofs are listed separately and eliminated at solve time.
struct SaddleSystem {
    SparseMatrix A;                 ///< viscous block, symmetric
    SparseMatrix C;                 ///< skew block from (z x w, v)
    SparseMatrix B;                 ///< pressure x velocity, B(q,j) = -(psi_q, div phi_j)
    Eigen::VectorXd pressure_mass;  ///< integral of each pressure basis function (zero-mean row)
    std::vector<char> dirichlet;    ///< per velocity dof
    double nu = 0.0;
};

/// Velocity dofs lying on the boundary.
inline std::vector<char> velocity_boundary_dofs(const SpaceDescriptor& V) {
    const Mesh& m = V.mesh();
    const int n = V.p2_nodes();
    std::vector<char> fixed(static_cast<std::size_t>(2 * n), 0);
    for (const auto& be : m.boundary_edges()) {
        for (int node : {be.v[0], be.v[1], static_cast<int>(m.num_vertices()) + be.edge}) {
            fixed[static_cast<std::size_t>(node)] = 1;
            fixed[static_cast<std::size_t>(n + node)] = 1;
        }
    }
    return fixed;
}

inline SaddleSystem assemble_generalized_stokes(const Spaces& spaces, double nu, const Field& z) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("viscosity must be positive and finite");
    if (z.kind() != SpaceKind::vorticity || !z.space.same_mesh(spaces.velocity))
        throw InvalidArgument("coefficient z must live in the vorticity space of the same mesh");
    if (!z.coefficients.allFinite()) throw DomainError("non-finite entries in the coefficient field z");

    const Mesh& m = spaces.mesh();
    const SpaceDescriptor& V = spaces.velocity;
    const int n = V.p2_nodes();
    const int nv = 2 * n;
    const int np = spaces.pressure.dof_count();

    Triplets ta, tc, tb;
    ta.reserve(m.num_triangles() * 72);
    tc.reserve(m.num_triangles() * 72);
    tb.reserve(m.num_triangles() * 36);
    Eigen::VectorXd pmass = Eigen::VectorXd::Zero(np);

    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        std::array<int, 6> nodes{};
        for (int i = 0; i < 6; ++i) nodes[static_cast<std::size_t>(i)] = V.p2_node(t, i);
        const auto& tri = m.triangle(t);

        Eigen::Matrix<double, 6, 6> K = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 6> Mz = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 3, 6> Bx = Eigen::Matrix<double, 3, 6>::Zero(), By = Bx;
        for (const auto& q : quad::triangle_rule()) {
            const double w = g.area * q.weight;
            const auto phi = p2::values(q.bary);
            const auto dphi = p2::gradients(g, q.bary);
            const double zq = eval_scalar(z, t, q.bary);
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) {
                    K(i, j) += w * nu * dphi[static_cast<std::size_t>(i)].dot(dphi[static_cast<std::size_t>(j)]);
                    Mz(i, j) += w * zq * phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(j)];
                }
                for (int a = 0; a < 3; ++a) {
                    Bx(a, i) -= w * q.bary[static_cast<std::size_t>(a)] * dphi[static_cast<std::size_t>(i)].x();
                    By(a, i) -= w * q.bary[static_cast<std::size_t>(a)] * dphi[static_cast<std::size_t>(i)].y();
                }
            }
        }
        for (int i = 0; i < 6; ++i) {
            const int I = nodes[static_cast<std::size_t>(i)];
            for (int j = 0; j < 6; ++j) {
                const int J = nodes[static_cast<std::size_t>(j)];
                ta.emplace_back(I, J, K(i, j));
                ta.emplace_back(n + I, n + J, K(i, j));
                // (z x w, v) = int z (-w2 v1 + w1 v2)
                tc.emplace_back(I, n + J, -Mz(i, j));
                tc.emplace_back(n + I, J, Mz(i, j));
            }
            for (int a = 0; a < 3; ++a) {
                tb.emplace_back(tri[static_cast<std::size_t>(a)], I, Bx(a, i));
                tb.emplace_back(tri[static_cast<std::size_t>(a)], n + I, By(a, i));
            }
        }
        for (int a = 0; a < 3; ++a) pmass[tri[static_cast<std::size_t>(a)]] += g.area / 3.0;
    }

    SaddleSystem s;
    s.nu = nu;
    s.A.resize(nv, nv);
    s.A.setFromTriplets(ta.begin(), ta.end());
    s.C.resize(nv, nv);
    s.C.setFromTriplets(tc.begin(), tc.end());
    s.B.resize(np, nv);
    s.B.setFromTriplets(tb.begin(), tb.end());
    s.pressure_mass = pmass;
    s.dirichlet = velocity_boundary_dofs(V);
    return s;
}

/// Load vector (f, v) over all velocity dofs.
inline Eigen::VectorXd velocity_load(const SpaceDescriptor& V, const VectorFunction& f) {
    const Mesh& m = V.mesh();
    const int n = V.p2_nodes();
    Eigen::VectorXd F = Eigen::VectorXd::Zero(2 * n);
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        for (const auto& q : quad::triangle_rule()) {
            const Vec2 x = g.point(q.bary);
            const Vec2 fv = f(x.x(), x.y());
            if (!fv.allFinite()) throw DomainError("body force is not finite at (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) + ")");
            const auto phi = p2::values(q.bary);
            for (int i = 0; i < 6; ++i) {
                const int I = V.p2_node(t, i);
                F[I] += g.area * q.weight * fv.x() * phi[static_cast<std::size_t>(i)];
                F[n + I] += g.area * q.weight * fv.y() * phi[static_cast<std::size_t>(i)];
            }
        }
    }
    return F;
}

enum class LinearSolverKind { direct, iterative };

struct StokesOptions {
    /// Refuse data whose per-component flux exceeds this; negative means 1e-8 times the boundary scale of g.
    double flux_tol = -1.0;
    LinearSolverKind solver = LinearSolverKind::direct;
    double krylov_tol = 1e-12;
    int krylov_max_iter = 500;
    bool check_flux = true;
};

struct StokesSolution {
    Field u;
    Field p;
    double multiplier = 0.0;      ///< zero-mean Lagrange multiplier (discrete flux / area)
    double relative_residual = 0.0;
    int krylov_iterations = 0;
};

/// Throws FluxIncompatible when a boundary component has net flux above tol.
inline void check_flux_compatibility(const Mesh& m, const VectorFunction& g, double flux_tol) {
    if (flux_tol < 0.0) flux_tol = 1e-8 * std::max(boundary_scale(m, g), 1e-300);
    const auto fluxes = flux_per_component(m, g);
    for (std::size_t i = 0; i < fluxes.size(); ++i)
        if (std::abs(fluxes[i]) > flux_tol) throw FluxIncompatible(static_cast<int>(i), fluxes[i]);
}

namespace detail {

/// Block upper-triangular preconditioner for [[F, K12], [K21, K22]]:
/// exact solves with the velocity block F and a scaled pressure mass
/// matrix (bordered by the zero-mean row) for the Schur complement.
class BlockStokesPreconditioner {
public:
    void setup(int velocity_size, SparseMatrix schur) {
        nv_ = velocity_size;
        schur_ = std::move(schur);
    }
    template <typename M> BlockStokesPreconditioner& analyzePattern(const M&) { return *this; }
    template <typename M> BlockStokesPreconditioner& factorize(const M& K) { return compute(K); }
    template <typename M> BlockStokesPreconditioner& compute(const M& K) {
        const int n = static_cast<int>(K.rows());
        F_ = K.topLeftCorner(nv_, nv_);
        K12_ = K.topRightCorner(nv_, n - nv_);
        F_.makeCompressed();
        lu_f_.compute(F_);
        lu_s_.compute(schur_);
        ok_ = lu_f_.info() == Eigen::Success && lu_s_.info() == Eigen::Success;
        return *this;
    }
    template <typename Rhs> Eigen::VectorXd solve(const Rhs& b) const {
        const Eigen::VectorXd r = b;
        Eigen::VectorXd x(r.size());
        const int ns = static_cast<int>(r.size()) - nv_;
        x.tail(ns) = lu_s_.solve(r.tail(ns));
        x.head(nv_) = lu_f_.solve(r.head(nv_) - K12_ * x.tail(ns));
        return x;
    }
    Eigen::ComputationInfo info() const { return ok_ ? Eigen::Success : Eigen::NumericalIssue; }

private:
    int nv_ = 0;
    SparseMatrix schur_, F_, K12_;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_f_, lu_s_;
    bool ok_ = false;
};

inline SparseMatrix pressure_mass_matrix(const SpaceDescriptor& P) {
    const Mesh& m = P.mesh();
    Triplets t;
    const Eigen::Matrix3d M1 = p1_unit_mass();
    for (int c = 0; c < static_cast<int>(m.num_triangles()); ++c) {
        const auto& tri = m.triangle(c);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                t.emplace_back(tri[static_cast<std::size_t>(a)], tri[static_cast<std::size_t>(b)], m.area(c) * M1(a, b));
    }
    SparseMatrix M(P.dof_count(), P.dof_count());
    M.setFromTriplets(t.begin(), t.end());
    return M;
}

} // namespace detail

/// Solves the assembled system with body force f and Dirichlet data g.
inline StokesSolution solve_saddle_system(const Spaces& spaces, const SaddleSystem& s, const VectorFunction& f,
                                          const VectorFunction& g, const StokesOptions& opt = {}) {
    const Mesh& m = spaces.mesh();
    if (opt.check_flux) check_flux_compatibility(m, g, opt.flux_tol);

    const SpaceDescriptor& V = spaces.velocity;
    const int n = V.p2_nodes();
    const int nv = 2 * n;
    const int np = spaces.pressure.dof_count();
    const int N = nv + np + 1;

    Eigen::VectorXd gval = Eigen::VectorXd::Zero(nv);
    for (int i = 0; i < n; ++i) {
        if (!s.dirichlet[static_cast<std::size_t>(i)]) continue;
        const Vec2 x = V.p2_point(i);
        const Vec2 gv = g(x.x(), x.y());
        if (!gv.allFinite()) throw DomainError("boundary velocity is not finite at (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) + ")");
        gval[i] = gv.x();
        gval[n + i] = gv.y();
    }

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
    rhs.head(nv) = velocity_load(V, f);
    Triplets trip;
    trip.reserve(static_cast<std::size_t>(s.A.nonZeros() + s.C.nonZeros() + 2 * s.B.nonZeros() + 2 * np + nv));
    auto fixed = [&](int i) { return i < nv && s.dirichlet[static_cast<std::size_t>(i)]; };
    auto add = [&](int r, int c, double v) {
        if (fixed(r)) return;
        if (fixed(c)) {
            rhs[r] -= v * gval[c];
            return;
        }
        trip.emplace_back(r, c, v);
    };
    const SparseMatrix AC = s.A + s.C;
    for (int k = 0; k < AC.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(AC, k); it; ++it) add(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < s.B.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(s.B, k); it; ++it) {
            add(nv + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
            add(static_cast<int>(it.col()), nv + static_cast<int>(it.row()), it.value());
        }
    for (int q = 0; q < np; ++q) {
        add(nv + q, N - 1, s.pressure_mass[q]);
        add(N - 1, nv + q, s.pressure_mass[q]);
    }
    for (int i = 0; i < nv; ++i)
        if (fixed(i)) {
            trip.emplace_back(i, i, 1.0);
            rhs[i] = gval[i];
        }
    SparseMatrix K(N, N);
    K.setFromTriplets(trip.begin(), trip.end());
    K.makeCompressed();

    Eigen::VectorXd x;
    int iterations = 0;
    if (opt.solver == LinearSolverKind::direct) {
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(K);
        if (lu.info() != Eigen::Success) throw LinearSolveFailure("sparse LU factorization of the Stokes system failed: " + lu.lastErrorMessage());
        x = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw LinearSolveFailure("sparse LU solve of the Stokes system failed");
    } else {
        SparseMatrix S(np + 1, np + 1);
        {
            const SparseMatrix Mp = detail::pressure_mass_matrix(spaces.pressure);
            Triplets ts;
            for (int k = 0; k < Mp.outerSize(); ++k)
                for (SparseMatrix::InnerIterator it(Mp, k); it; ++it)
                    ts.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), -it.value() / s.nu);
            for (int q = 0; q < np; ++q) {
                ts.emplace_back(q, np, s.pressure_mass[q]);
                ts.emplace_back(np, q, s.pressure_mass[q]);
            }
            S.setFromTriplets(ts.begin(), ts.end());
            S.makeCompressed();
        }
        Eigen::GMRES<SparseMatrix, detail::BlockStokesPreconditioner> gmres;
        gmres.preconditioner().setup(nv, S);
        gmres.setTolerance(opt.krylov_tol);
        gmres.setMaxIterations(opt.krylov_max_iter);
        gmres.set_restart(std::min(opt.krylov_max_iter, 200));
        gmres.compute(K);
        if (gmres.info() != Eigen::Success) throw LinearSolveFailure("block preconditioner setup failed");
        x = gmres.solve(rhs);
        iterations = static_cast<int>(gmres.iterations());
        if (gmres.info() != Eigen::Success)
            throw LinearSolveFailure("GMRES did not converge in " + std::to_string(iterations) + " iterations");
    }
    if (!x.allFinite()) throw LinearSolveFailure("Stokes solution is not finite");
    const double res = (K * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
    const double res_tol = opt.solver == LinearSolverKind::direct ? 1e-8 : std::max(1e-8, 10 * opt.krylov_tol);
    if (rhs.norm() > 0 && res > res_tol)
        throw LinearSolveFailure("Stokes residual " + std::to_string(res) + " above tolerance");

    StokesSolution sol{Field(V, x.head(nv)), Field(spaces.pressure, x.segment(nv, np)), x[N - 1],
                       rhs.norm() > 0 ? res : 0.0, iterations};
    return sol;
}

/// Generalized Stokes solve for a given coefficient z.
inline StokesSolution solve_generalized_stokes(const Spaces& spaces, double nu, const Field& z, const VectorFunction& f,
                                               const VectorFunction& g, const StokesOptions& opt = {}) {
    if (opt.check_flux) check_flux_compatibility(spaces.mesh(), g, opt.flux_tol);
    const SaddleSystem s = assemble_generalized_stokes(spaces, nu, z);
    StokesOptions inner = opt;
    inner.check_flux = false;
    return solve_saddle_system(spaces, s, f, g, inner);
}

/// Both sides of the energy identity nu |u|^2 + (z x u, u) - (p, div u) = (f, u).
/// The identity holds for homogeneous boundary data.
struct EnergyReport {
    double viscous = 0.0;        ///< nu |u|_{H1}^2
    double skew = 0.0;           ///< (z x u, u), zero up to round-off
    double pressure_work = 0.0;  ///< (p, div u)
    double forcing = 0.0;        ///< (f, u)
    double div_l2 = 0.0;         ///< ||div u||_{L2}; Taylor-Hood only drives this to zero under refinement
    double div_discrete = 0.0;   ///< ||projection of div u onto the pressure space||_{L2}, the enforced constraint
    double u_h1_semi = 0.0;

    double imbalance() const { return viscous + skew - pressure_work - forcing; }
};

inline EnergyReport stokes_energy_report(const Field& u, const Field& p, const Field& z, const VectorFunction& f, double nu) {
    const Mesh& m = u.mesh();
    EnergyReport r;
    double h1 = 0.0, div2 = 0.0;
    Eigen::VectorXd bdiv = Eigen::VectorXd::Zero(p.space.dof_count());
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        for (const auto& q : quad::triangle_rule()) {
            const double w = g.area * q.weight;
            const Vec2 x = g.point(q.bary);
            const Vec2 uv = eval_vector(u, t, q.bary);
            const Mat2 G = grad_vector(u, t, g, q.bary);
            const double div = G.trace();
            const double zq = eval_scalar(z, t, q.bary);
            h1 += w * G.squaredNorm();
            div2 += w * div * div;
            for (int a = 0; a < 3; ++a) bdiv[m.triangle(t)[static_cast<std::size_t>(a)]] += w * div * q.bary[static_cast<std::size_t>(a)];
            r.skew += w * zq * (-uv.y() * uv.x() + uv.x() * uv.y());
            r.pressure_work += w * eval_scalar(p, t, q.bary) * div;
            r.forcing += w * f(x.x(), x.y()).dot(uv);
        }
    }
    r.viscous = nu * h1;
    r.u_h1_semi = std::sqrt(h1);
    r.div_l2 = std::sqrt(div2);
    const Eigen::SimplicialLDLT<SparseMatrix> mass(detail::pressure_mass_matrix(p.space));
    r.div_discrete = std::sqrt(std::max(0.0, bdiv.dot(mass.solve(bdiv))));
    return r;
}

} // namespace grade2

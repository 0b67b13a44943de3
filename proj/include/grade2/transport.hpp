#pragma once

#include "grade2/boundary.hpp"
#include "grade2/error.hpp"
#include "grade2/fespace.hpp"
#include "grade2/geometry.hpp"
#include "grade2/quadrature.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace grade2 {

/// Boundary-condition variant on the inflow boundary: prescribed normal
/// flux (z u).n = h, or prescribed trace z = h.
enum class Variant { flux_form, trace_form };

inline const char* to_string(Variant v) { return v == Variant::flux_form ? "P_I" : "P_II"; }

/// How the inflow datum enters the upwind flux.
enum class Imposition {
    trace,  ///< upwind value z_ext = q
    flux,   ///< upwind flux alpha (z u).n = alpha h directly (flux-form data only)
};

/// Per-boundary-edge quadrature values of the inflow trace q.
struct InflowDatum {
    Variant variant = Variant::trace_form;
    std::vector<std::array<double, 3>> q;   ///< trace value at edge quadrature points
    std::vector<std::array<double, 3>> h;   ///< raw datum at edge quadrature points
    std::vector<char> defined;              ///< per boundary edge, true on the inflow boundary
    std::vector<std::string> warnings;

    static InflowDatum zero(const Mesh& m) {
        InflowDatum d;
        d.q.assign(m.num_boundary_edges(), {0.0, 0.0, 0.0});
        d.h = d.q;
        d.defined.assign(m.num_boundary_edges(), 0);
        return d;
    }
    double max_abs_q() const {
        double s = 0.0;
        for (std::size_t b = 0; b < q.size(); ++b)
            if (defined[b])
                for (double v : q[b]) s = std::max(s, std::abs(v));
        return s;
    }
};

struct InflowOptions {
    /// Turn an interior zero of g.n on the inflow boundary into an error for the trace form too.
    bool strict = false;
};

/// Builds q = h/(g.n) (flux form) or q = h (trace form) on the inflow boundary.
inline InflowDatum build_inflow_datum(Variant variant, const ScalarFunction& h, const VectorFunction& g, const Mesh& m,
                                      const BoundaryPartition& part, const InflowOptions& opt = {}) {
    InflowDatum d = InflowDatum::zero(m);
    d.variant = variant;
    if (part.has_interior_degeneracy()) {
        std::string pts;
        for (const auto& p : part.degenerate_points)
            if (!p.at_junction) pts += " " + std::to_string(p.vertex);
        const std::string msg = "g.n vanishes inside the inflow boundary at vertices" + pts;
        if (variant == Variant::flux_form) throw DegenerateInflow("degenerate inflow: " + msg + "; h/(g.n) is unbounded");
        if (opt.strict) throw DegenerateInflow("degenerate inflow: " + msg);
        d.warnings.push_back(msg);
    }
    for (int b : part.gamma_minus) {
        const Vec2 n = m.normal(b);
        d.defined[static_cast<std::size_t>(b)] = 1;
        for (std::size_t k = 0; k < 3; ++k) {
            const Vec2 x = boundary_point(m, b, quad::edge_rule()[k].t);
            const double hv = h(x.x(), x.y());
            if (!std::isfinite(hv)) throw DomainError("inflow datum h is not finite on boundary edge " + std::to_string(b));
            d.h[static_cast<std::size_t>(b)][k] = hv;
            if (variant == Variant::flux_form) {
                const double gn = g(x.x(), x.y()).dot(n);
                if (!(std::abs(gn) > part.eps_n))
                    throw DegenerateInflow("degenerate inflow: |g.n| = " + std::to_string(std::abs(gn)) +
                                           " <= eps_n on boundary edge " + std::to_string(b));
                d.q[static_cast<std::size_t>(b)][k] = hv / gn;
            } else {
                d.q[static_cast<std::size_t>(b)][k] = hv;
            }
        }
    }
    return d;
}

/// A piecewise-linear discontinuous function that matches the inflow trace on
/// cells touching the inflow boundary and vanishes elsewhere.
inline Field inflow_lifting(const InflowDatum& d, const SpaceDescriptor& W) {
    const Mesh& m = W.mesh();
    Field z(W);
    Eigen::VectorXd count = Eigen::VectorXd::Zero(W.dof_count());
    const auto& rule = quad::edge_rule();
    for (int b = 0; b < static_cast<int>(m.num_boundary_edges()); ++b) {
        if (!d.defined[static_cast<std::size_t>(b)]) continue;
        // Least-squares line through the three quadrature values.
        double st = 0, sv = 0, stt = 0, stv = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            const double t = rule[k].t, v = d.q[static_cast<std::size_t>(b)][k];
            st += t; sv += v; stt += t * t; stv += t * v;
        }
        const double slope = (3 * stv - st * sv) / (3 * stt - st * st);
        const double icpt = (sv - slope * st) / 3.0;
        const auto& be = m.boundary_edge(b);
        const auto& tri = m.triangle(be.triangle);
        for (int a = 0; a < 3; ++a) {
            const int v = tri[static_cast<std::size_t>(a)];
            const int dof = 3 * be.triangle + a;
            if (v == be.v[0]) { z.coefficients[dof] += icpt; count[dof] += 1; }
            if (v == be.v[1]) { z.coefficients[dof] += icpt + slope; count[dof] += 1; }
        }
    }
    for (int i = 0; i < W.dof_count(); ++i)
        if (count[i] > 0) z.coefficients[i] /= count[i];
    return z;
}

struct TransportOptions {
    Imposition imposition = Imposition::trace;
    /// Sign threshold for |u.n| on boundary faces; negative means take the partition's eps_n.
    double eps_n = -1.0;
    /// Tolerance on the weak divergence of u relative to |u|_{H1}; exceeded values produce a warning.
    double div_tol = 1e-8;
};

/// Upwind discontinuous-Galerkin discretization of
///   nu z + alpha u.grad z = rhs,   z = q on the inflow boundary,
/// in skew-symmetrized form (the term alpha/2 (div u) z is added, which
/// vanishes for solenoidal u and makes the convective part non-negative).
/// The matrix is factorized once; solve() may be called with several
/// right-hand sides and data.
class TransportOperator {
public:
    using SparseMatrix = Eigen::SparseMatrix<double>;

    TransportOperator(const Field& u, double nu, double alpha, const BoundaryPartition& part,
                      const SpaceDescriptor& vorticity, TransportOptions opt = {})
        : W_(vorticity), nu_(nu), alpha_(alpha), opt_(opt), part_(part), u_(u) {
        if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("transport needs nu > 0");
        if (!std::isfinite(alpha)) throw InvalidArgument("alpha must be finite");
        if (u.kind() != SpaceKind::velocity || !u.space.same_mesh(vorticity))
            throw InvalidArgument("transport velocity must be a velocity field on the vorticity mesh");
        if (opt_.eps_n < 0.0) opt_.eps_n = part.eps_n;
        assemble();
    }

    /// Solves with right-hand side field rhs (vorticity space) and inflow datum.
    Field solve(const Field& rhs, const InflowDatum& datum) const {
        if (rhs.kind() != SpaceKind::vorticity || !rhs.space.same_mesh(W_))
            throw InvalidArgument("transport right-hand side must be a vorticity field on the same mesh");
        if (alpha_ == 0.0) return Field(W_, rhs.coefficients / nu_);
        return solve_vector(load(rhs) + boundary_load(datum));
    }

    /// Solves with a raw load vector (integrals against the basis functions).
    Field solve_vector(const Eigen::VectorXd& b) const {
        Eigen::VectorXd z = lu_->solve(b);
        if (lu_->info() != Eigen::Success || !z.allFinite()) throw LinearSolveFailure("transport solve failed");
        return Field(W_, std::move(z));
    }

    /// (rhs, psi_i) for a vorticity field.
    Eigen::VectorXd load(const Field& rhs) const {
        const Mesh& m = W_.mesh();
        Eigen::VectorXd b(W_.dof_count());
        const Eigen::Matrix3d M = p1_unit_mass();
        for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t)
            b.segment<3>(3 * t) = m.area(t) * (M * rhs.coefficients.segment<3>(3 * t));
        return b;
    }

    /// Contribution of the inflow datum through the upwind flux.
    Eigen::VectorXd boundary_load(const InflowDatum& d) const {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(W_.dof_count());
        if (alpha_ == 0.0) return b;
        const Mesh& m = W_.mesh();
        if (d.q.size() != m.num_boundary_edges()) throw InvalidArgument("inflow datum does not match the mesh");
        if (opt_.imposition == Imposition::flux && d.variant != Variant::flux_form)
            throw InvalidArgument("flux imposition needs flux-form data");
        for (int bid = 0; bid < static_cast<int>(m.num_boundary_edges()); ++bid) {
            if (!d.defined[static_cast<std::size_t>(bid)]) continue;
            const auto& be = m.boundary_edge(bid);
            const ElementGeometry g(m, be.triangle);
            const Vec2 n = m.normal(bid);
            const double len = m.length(bid);
            for (std::size_t k = 0; k < 3; ++k) {
                const auto& qp = quad::edge_rule()[k];
                const Vec2 x = boundary_point(m, bid, qp.t);
                const auto l = barycentric(g, x);
                const double un = eval_vector(u_, be.triangle, l).dot(n);
                if (!(alpha_ * un < -opt_.eps_n)) continue;
                const double flux = opt_.imposition == Imposition::flux ? alpha_ * d.h[static_cast<std::size_t>(bid)][k]
                                                                        : alpha_ * un * d.q[static_cast<std::size_t>(bid)][k];
                for (int a = 0; a < 3; ++a) b[3 * be.triangle + a] -= qp.weight * len * flux * l[static_cast<std::size_t>(a)];
            }
        }
        return b;
    }

    const SparseMatrix& matrix() const { return A_; }
    /// Boundary length where the sign of alpha u.n disagrees with the partition.
    double inflow_mismatch() const { return mismatch_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    double nu() const { return nu_; }
    double alpha() const { return alpha_; }
    const Field& velocity() const { return u_; }

private:
    void assemble() {
        const Mesh& m = W_.mesh();
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(m.num_triangles() * 9 * 4);
        // Weak divergence against continuous piecewise-linear functions, per vertex.
        Eigen::VectorXd vdiv = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_vertices()));
        Eigen::VectorXd vmass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_vertices()));
        double h1 = 0.0;
        for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
            const ElementGeometry g(m, t);
            Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
            for (const auto& q : quad::triangle_rule()) {
                const double w = g.area * q.weight;
                const Vec2 uq = eval_vector(u_, t, q.bary);
                const Mat2 G = grad_vector(u_, t, g, q.bary);
                const double div = G.trace();
                h1 += w * G.squaredNorm();
                for (int b = 0; b < 3; ++b) {
                    const double lb = q.bary[static_cast<std::size_t>(b)];
                    vdiv[m.triangle(t)[static_cast<std::size_t>(b)]] += w * div * lb;
                    vmass[m.triangle(t)[static_cast<std::size_t>(b)]] += w * lb;
                    for (int a = 0; a < 3; ++a) {
                        const double la = q.bary[static_cast<std::size_t>(a)];
                        K(b, a) += w * ((nu_ + 0.5 * alpha_ * div) * la * lb +
                                        alpha_ * uq.dot(g.grad_lambda[static_cast<std::size_t>(a)]) * lb);
                    }
                }
            }
            for (int b = 0; b < 3; ++b)
                for (int a = 0; a < 3; ++a) trip.emplace_back(3 * t + b, 3 * t + a, K(b, a));
        }
        if (alpha_ != 0.0) assemble_faces(trip);
        const double u_h1 = std::sqrt(h1);
        const double weak_div = (vdiv.array().abs() / vmass.array()).maxCoeff();
        if (alpha_ != 0.0 && weak_div > opt_.div_tol * std::max(u_h1, 1.0))
            warnings_.push_back("velocity is not discretely divergence-free (weak divergence " +
                                std::to_string(weak_div) + ")");

        A_.resize(W_.dof_count(), W_.dof_count());
        A_.setFromTriplets(trip.begin(), trip.end());
        A_.makeCompressed();
        lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
        lu_->compute(A_);
        if (lu_->info() != Eigen::Success) throw LinearSolveFailure("transport factorization failed: " + lu_->lastErrorMessage());
        if (mismatch_ > 1e-12 * std::max(m.diameter(), 1.0))
            warnings_.push_back("discrete inflow set (sign of alpha u.n) differs from the boundary partition on length " +
                                std::to_string(mismatch_));
    }

    void assemble_faces(std::vector<Eigen::Triplet<double>>& trip) {
        const Mesh& m = W_.mesh();
        for (int e = 0; e < static_cast<int>(m.num_edges()); ++e) {
            const auto adj = m.edge_triangles()[static_cast<std::size_t>(e)];
            const auto& ev = m.edges()[static_cast<std::size_t>(e)];
            const Vec2 p0 = m.vertex(ev[0]), p1 = m.vertex(ev[1]);
            const double len = (p1 - p0).norm();
            const ElementGeometry gk(m, adj[0]);
            // Outward normal of adj[0].
            Vec2 n(p1.y() - p0.y(), p0.x() - p1.x());
            n /= len;
            const Vec2 centre = (gk.x[0] + gk.x[1] + gk.x[2]) / 3.0;
            if (n.dot(0.5 * (p0 + p1) - centre) < 0) n = -n;

            if (adj[1] < 0) {
                const int bid = m.boundary_id_of_edge(e);
                const bool in_partition = part_.inflow(bid);
                for (const auto& qp : quad::edge_rule()) {
                    const Vec2 x = (1 - qp.t) * p0 + qp.t * p1;
                    const auto l = barycentric(gk, x);
                    const double un = eval_vector(u_, adj[0], l).dot(n);
                    const double s = alpha_ * un;
                    const bool discrete_inflow = alpha_ * un < -opt_.eps_n;
                    if (discrete_inflow != in_partition) mismatch_ += qp.weight * len;
                    if (s >= 0) continue;
                    for (int b = 0; b < 3; ++b)
                        for (int a = 0; a < 3; ++a)
                            trip.emplace_back(3 * adj[0] + b, 3 * adj[0] + a,
                                              -qp.weight * len * s * l[static_cast<std::size_t>(a)] * l[static_cast<std::size_t>(b)]);
                }
                continue;
            }
            const ElementGeometry gn(m, adj[1]);
            for (const auto& qp : quad::edge_rule()) {
                const Vec2 x = (1 - qp.t) * p0 + qp.t * p1;
                const auto lk = barycentric(gk, x);
                const auto ln = barycentric(gn, x);
                const double s = alpha_ * eval_vector(u_, adj[0], lk).dot(n);
                if (s == 0.0) continue;
                // Downstream cell receives -s_down (z_down - z_up) psi_down.
                const int down = s < 0 ? adj[0] : adj[1];
                const int up = s < 0 ? adj[1] : adj[0];
                const auto& ld = s < 0 ? lk : ln;
                const auto& lu = s < 0 ? ln : lk;
                const double sd = -std::abs(s);
                const double w = qp.weight * len;
                for (int b = 0; b < 3; ++b)
                    for (int a = 0; a < 3; ++a) {
                        trip.emplace_back(3 * down + b, 3 * down + a, -w * sd * ld[static_cast<std::size_t>(a)] * ld[static_cast<std::size_t>(b)]);
                        trip.emplace_back(3 * down + b, 3 * up + a, w * sd * lu[static_cast<std::size_t>(a)] * ld[static_cast<std::size_t>(b)]);
                    }
            }
        }
    }

    SpaceDescriptor W_;
    double nu_, alpha_;
    TransportOptions opt_;
    BoundaryPartition part_;
    Field u_;
    SparseMatrix A_;
    std::shared_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
    double mismatch_ = 0.0;
    std::vector<std::string> warnings_;
};

struct TransportSolution {
    Field z;
    double inflow_mismatch = 0.0;
    std::vector<std::string> warnings;
};

/// One-shot transport solve.
inline TransportSolution solve_transport(const Field& u, double nu, double alpha, const Field& rhs, const InflowDatum& datum,
                                         const BoundaryPartition& part, const TransportOptions& opt = {}) {
    TransportOperator op(u, nu, alpha, part, rhs.space, opt);
    TransportSolution s{op.solve(rhs, datum), op.inflow_mismatch(), op.warnings()};
    s.warnings.insert(s.warnings.end(), datum.warnings.begin(), datum.warnings.end());
    return s;
}

// ---------------------------------------------------------------------------
// Discrete analogues of the sign inequality and the Green formula

/// Split of the upwind-consistent value of int (alpha u.grad z) z for zero inflow data.
struct SignFunctional {
    double volume = 0.0;     ///< sum over cells of int (alpha u.grad z + alpha/2 div u z) z
    double interior = 0.0;   ///< upwind jump corrections on interior faces, 1/2 |alpha u.n| [z]^2 summed
    double boundary = 0.0;   ///< inflow-boundary correction with zero upwind value
    double total() const { return volume + interior + boundary; }
};

inline SignFunctional sign_functional_split(const Field& z, const Field& u, double alpha) {
    SignFunctional s;
    if (alpha == 0.0) return s;
    const Mesh& m = z.mesh();
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        const Vec2 gz = grad_scalar(z, t, g);
        for (const auto& q : quad::triangle_rule()) {
            const double zq = eval_scalar(z, t, q.bary);
            const double div = grad_vector(u, t, g, q.bary).trace();
            s.volume += g.area * q.weight * alpha * (eval_vector(u, t, q.bary).dot(gz) + 0.5 * div * zq) * zq;
        }
    }
    for (int e = 0; e < static_cast<int>(m.num_edges()); ++e) {
        const auto adj = m.edge_triangles()[static_cast<std::size_t>(e)];
        const auto& ev = m.edges()[static_cast<std::size_t>(e)];
        const Vec2 p0 = m.vertex(ev[0]), p1 = m.vertex(ev[1]);
        const double len = (p1 - p0).norm();
        const ElementGeometry gk(m, adj[0]);
        Vec2 n(p1.y() - p0.y(), p0.x() - p1.x());
        n /= len;
        if (n.dot(0.5 * (p0 + p1) - (gk.x[0] + gk.x[1] + gk.x[2]) / 3.0) < 0) n = -n;
        for (const auto& qp : quad::edge_rule()) {
            const Vec2 x = (1 - qp.t) * p0 + qp.t * p1;
            const auto lk = barycentric(gk, x);
            const double sk = alpha * eval_vector(u, adj[0], lk).dot(n);
            const double zk = eval_scalar(z, adj[0], lk);
            const double w = qp.weight * len;
            if (adj[1] < 0) {
                if (sk < 0) s.boundary += -w * sk * zk * zk;
                continue;
            }
            const double zn = eval_scalar(z, adj[1], barycentric(ElementGeometry(m, adj[1]), x));
            // Downstream side gets -s_down (z_down - z_up) z_down.
            if (sk < 0) s.interior += -w * sk * (zk - zn) * zk;
            else if (sk > 0) s.interior += -w * (-sk) * (zn - zk) * zn;
        }
    }
    return s;
}

/// Upwind-consistent evaluation of int (alpha u.grad z) z with zero inflow data.
inline double sign_functional(const Field& z, const Field& u, double alpha) { return sign_functional_split(z, u, alpha).total(); }

enum class GreenForm {
    full,         ///< boundary term over the whole boundary
    inflow_only,  ///< boundary term over the inflow boundary; phi must vanish on the rest
};

/// |(z u, grad phi) + (phi u, grad z) - int (z u.n) phi| with broken gradients of z.
inline double green_residual(const Field& z, const Field& u, const ScalarFunction& phi, const VectorFunction& grad_phi,
                             const BoundaryPartition& part, GreenForm form = GreenForm::full) {
    const Mesh& m = z.mesh();
    double vol = 0.0;
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        const Vec2 gz = grad_scalar(z, t, g);
        for (const auto& q : quad::triangle_rule()) {
            const Vec2 x = g.point(q.bary);
            const Vec2 uq = eval_vector(u, t, q.bary);
            vol += g.area * q.weight *
                   (eval_scalar(z, t, q.bary) * uq.dot(grad_phi(x.x(), x.y())) + phi(x.x(), x.y()) * uq.dot(gz));
        }
    }
    double bnd = 0.0;
    for (int b = 0; b < static_cast<int>(m.num_boundary_edges()); ++b) {
        if (form == GreenForm::inflow_only && !part.inflow(b)) continue;
        const auto& be = m.boundary_edge(b);
        const ElementGeometry g(m, be.triangle);
        const Vec2 n = m.normal(b);
        const double len = m.length(b);
        for (const auto& qp : quad::edge_rule()) {
            const Vec2 x = boundary_point(m, b, qp.t);
            const auto l = barycentric(g, x);
            bnd += qp.weight * len * eval_scalar(z, be.triangle, l) * eval_vector(u, be.triangle, l).dot(n) * phi(x.x(), x.y());
        }
    }
    return std::abs(vol - bnd);
}

// ---------------------------------------------------------------------------
// Transport of the gradient

struct GradientTransportOptions {
    double tol = 1e-10;
    int max_iter = 200;
    TransportOptions transport;
};

struct GradientTransportResult {
    Field F1, F2;                      ///< components of the transported gradient
    int iterations = 0;
    std::vector<double> increments;    ///< ||F_{n+1} - F_n||_{L2} per iteration
};

/// Largest Frobenius norm of grad u over cell vertices (the maximum of a linear function).
inline double max_velocity_gradient(const Field& u) {
    const Mesh& m = u.mesh();
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        for (int a = 0; a < 3; ++a) {
            std::array<double, 3> l{0, 0, 0};
            l[static_cast<std::size_t>(a)] = 1;
            s = std::max(s, grad_vector(u, t, g, l).norm());
        }
    }
    return s;
}

/// Fixed point of F + W (u.grad F + (grad u)^T F) = grad l with F = 0 on the
/// inflow boundary, iterating
///   F_{n+1} + W u.grad F_{n+1} = grad l - W (grad u)^T F_n.
/// Requires max |grad u| <= 1/(2|W|), under which the iteration halves the error.
inline GradientTransportResult solve_gradient_transport(const Field& u, double W, const VectorFunction& grad_l,
                                                        const BoundaryPartition& part, const SpaceDescriptor& vorticity,
                                                        const GradientTransportOptions& opt = {}) {
    if (W == 0.0 || !std::isfinite(W)) throw InvalidArgument("gradient transport needs a finite non-zero W");
    const double gmax = max_velocity_gradient(u);
    if (gmax > 1.0 / (2.0 * std::abs(W)))
        throw ContractionViolated("max |grad u| = " + std::to_string(gmax) + " exceeds 1/(2|W|) = " +
                                  std::to_string(1.0 / (2.0 * std::abs(W))));
    const TransportOperator op(u, 1.0, W, part, vorticity, opt.transport);
    const Mesh& m = vorticity.mesh();
    const InflowDatum zero = InflowDatum::zero(m);

    auto coupled_load = [&](const Field& G1, const Field& G2, int comp) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(vorticity.dof_count());
        for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
            const ElementGeometry g(m, t);
            for (const auto& q : quad::triangle_rule()) {
                const Vec2 x = g.point(q.bary);
                const Mat2 Gu = grad_vector(u, t, g, q.bary);
                const Vec2 F(eval_scalar(G1, t, q.bary), eval_scalar(G2, t, q.bary));
                // ((grad u)^T F)_i = sum_j d_i u_j F_j
                const double coupling = Gu.col(comp).dot(F);
                const double val = grad_l(x.x(), x.y())[comp] - W * coupling;
                for (int a = 0; a < 3; ++a) b[3 * t + a] += g.area * q.weight * val * q.bary[static_cast<std::size_t>(a)];
            }
        }
        return b;
    };

    GradientTransportResult r{Field(vorticity), Field(vorticity), 0, {}};
    for (int it = 0; it < opt.max_iter; ++it) {
        Field n1 = op.solve_vector(coupled_load(r.F1, r.F2, 0));
        Field n2 = op.solve_vector(coupled_load(r.F1, r.F2, 1));
        const double d = std::hypot(norms(n1 - r.F1).l2, norms(n2 - r.F2).l2);
        r.F1 = std::move(n1);
        r.F2 = std::move(n2);
        r.iterations = it + 1;
        r.increments.push_back(d);
        if (d <= opt.tol) return r;
    }
    throw MaxIterations("gradient transport did not converge in " + std::to_string(opt.max_iter) + " iterations");
}

} // namespace grade2

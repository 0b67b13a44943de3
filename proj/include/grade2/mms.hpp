#pragma once

#include "grade2/detail/mms_cases.hpp"
#include "grade2/detail/parallel.hpp"
#include "grade2/driver.hpp"
#include "grade2/error.hpp"
#include "grade2/fespace.hpp"
#include "grade2/mesh.hpp"
#include "grade2/stokes.hpp"
#include "grade2/transport.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <vector>

namespace grade2::mms {

/// Closed-form solution on the unit square with the matching forcing and boundary data.
///   "poly": stream function x^2(1-x)^2 y^2(1-y)^2, pressure x^2 - y^2; zero boundary velocity.
///   "trig": stream function y + sin(pi x + pi/4) sin(pi y)/10, pressure sin(pi x) cos(pi y);
///           the inflow boundary is the left edge.
struct ManufacturedCase {
    std::string name;
    double nu = 1.0;
    double alpha = 0.0;
    VectorFunction u;
    TensorFunction grad_u;
    ScalarFunction p;
    VectorFunction grad_p;
    ScalarFunction z;
    VectorFunction grad_z;
    VectorFunction f;
    ScalarFunction curl_f;

    const VectorFunction& g() const { return u; }

    /// Inflow datum for the given variant: z (trace form) or z g.n (flux form).
    ScalarFunction h(Variant v) const;

    ProblemSpec problem(std::shared_ptr<const Mesh> mesh, Variant v, SolverTolerances tol = {}) const {
        ProblemSpec s;
        s.nu = nu;
        s.alpha = alpha;
        s.f = f;
        s.g = u;
        s.h = h(v);
        s.curl_f = curl_f;
        s.variant = v;
        s.mesh = std::move(mesh);
        s.tol = tol;
        return s;
    }
};

inline const std::vector<std::string>& case_names() {
    static const std::vector<std::string> names{"poly", "trig"};
    return names;
}

/// Outward unit normal of the unit square at a boundary point (nearest side).
inline Vec2 unit_square_normal(double x, double y) {
    const double d[4] = {y, 1.0 - x, 1.0 - y, x};
    int k = 0;
    for (int i = 1; i < 4; ++i)
        if (d[i] < d[k]) k = i;
    static const Vec2 n[4] = {Vec2(0, -1), Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0)};
    return n[k];
}

inline ScalarFunction ManufacturedCase::h(Variant v) const {
    if (v == Variant::trace_form) return z;
    const ScalarFunction zz = z;
    const VectorFunction uu = u;
    return [zz, uu](double x, double y) { return zz(x, y) * uu(x, y).dot(unit_square_normal(x, y)); };
}

inline ManufacturedCase manufactured_case(const std::string& name, double nu, double alpha) {
    using Kernel = void (*)(double, double, double, double, detail::CaseValues&);
    Kernel k = nullptr;
    if (name == "poly") k = detail::poly_case;
    else if (name == "trig") k = detail::trig_case;
    else throw InvalidArgument("unknown manufactured case '" + name + "' (known: poly, trig)");
    if (!(nu > 0.0)) throw InvalidArgument("nu must be positive");

    auto at = [k, nu, alpha](double x, double y) {
        detail::CaseValues v{};
        k(x, y, nu, alpha, v);
        return v;
    };
    ManufacturedCase c;
    c.name = name;
    c.nu = nu;
    c.alpha = alpha;
    c.u = [at](double x, double y) { const auto v = at(x, y); return Vec2(v.u1, v.u2); };
    c.grad_u = [at](double x, double y) {
        const auto v = at(x, y);
        Mat2 G;
        G << v.du1dx, v.du1dy, v.du2dx, v.du2dy;
        return G;
    };
    c.p = [at](double x, double y) { return at(x, y).p; };
    c.grad_p = [at](double x, double y) { const auto v = at(x, y); return Vec2(v.dpdx, v.dpdy); };
    c.z = [at](double x, double y) { return at(x, y).z; };
    c.grad_z = [at](double x, double y) { const auto v = at(x, y); return Vec2(v.dzdx, v.dzdy); };
    c.f = [at](double x, double y) { const auto v = at(x, y); return Vec2(v.f1, v.f2); };
    c.curl_f = [at](double x, double y) { return at(x, y).curl_f; };
    return c;
}

enum class Study { stokes, transport, coupled };

inline const char* to_string(Study s) {
    switch (s) {
    case Study::stokes: return "stokes";
    case Study::transport: return "transport";
    case Study::coupled: return "coupled";
    }
    return "?";
}

inline Study parse_study(const std::string& s) {
    if (s == "stokes") return Study::stokes;
    if (s == "transport") return Study::transport;
    if (s == "coupled") return Study::coupled;
    throw InvalidArgument("unknown study '" + s + "' (known: stokes, transport, coupled)");
}

/// Errors on one mesh level; NaN marks a quantity the study does not compute.
struct LevelRow {
    int n = 0;            ///< cells per side
    double h = 0.0;
    bool ok = false;
    bool not_converged = false;   ///< failure was a fixed-point stop, not an input or solver error
    std::string error;
    int iterations = 0;
    double u_l2 = std::numeric_limits<double>::quiet_NaN();
    double u_h1 = std::numeric_limits<double>::quiet_NaN();
    double p_l2 = std::numeric_limits<double>::quiet_NaN();
    double z_l2 = std::numeric_limits<double>::quiet_NaN();
};

/// Observed orders log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
struct OrderRow {
    int n_coarse = 0, n_fine = 0;
    double u_l2 = std::numeric_limits<double>::quiet_NaN();
    double u_h1 = std::numeric_limits<double>::quiet_NaN();
    double p_l2 = std::numeric_limits<double>::quiet_NaN();
    double z_l2 = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceTable {
    std::string case_name;
    Study study = Study::coupled;
    Variant variant = Variant::trace_form;
    std::vector<LevelRow> levels;
    std::vector<OrderRow> orders;
};

inline LevelRow run_level(const ManufacturedCase& c, int n, Study study, Variant variant, const SolverTolerances& tol) {
    LevelRow row;
    row.n = n;
    row.h = 1.0 / n;
    try {
        auto mesh = std::make_shared<const Mesh>(unit_square_mesh(n));
        const Spaces sp = build_spaces(mesh);
        if (study == Study::stokes) {
            const Field z = project_vorticity(c.z, sp.vorticity);
            StokesOptions opt;
            opt.solver = tol.linear_solver;
            const StokesSolution s = solve_generalized_stokes(sp, c.nu, z, c.f, c.u, opt);
            row.u_l2 = l2_error(s.u, c.u);
            row.u_h1 = h1_semi_error(s.u, c.grad_u);
            row.p_l2 = l2_error(s.p, c.p);
            row.iterations = 1;
        } else if (study == Study::transport) {
            const double eps_n = tol.eps_n < 0 ? default_eps_n(*mesh, c.u) : tol.eps_n;
            const BoundaryPartition part = classify_boundary(*mesh, c.u, c.alpha, eps_n);
            const InflowDatum d = build_inflow_datum(variant, c.h(variant), c.u, *mesh, part, {tol.strict_inflow});
            const Field u = interpolate(c.u, sp.velocity);
            const double nu = c.nu, alpha = c.alpha;
            const auto gu = c.grad_u;
            const auto cf2 = c.curl_f;
            const Field rhs = project_vorticity(
                [&](double x, double y) {
                    const Mat2 G = gu(x, y);
                    return nu * (G(1, 0) - G(0, 1)) + alpha * cf2(x, y);
                },
                sp.vorticity);
            TransportOptions topt;
            topt.eps_n = eps_n;
            topt.imposition = tol.imposition;
            const TransportSolution s = solve_transport(u, nu, alpha, rhs, d, part, topt);
            row.z_l2 = l2_error(s.z, c.z);
            row.iterations = 1;
        } else {
            const FixedPointResult r = fixed_point_solve(c.problem(mesh, variant, tol));
            row.u_l2 = l2_error(r.u, c.u);
            row.u_h1 = h1_semi_error(r.u, c.grad_u);
            row.p_l2 = l2_error(r.p, c.p);
            row.z_l2 = l2_error(r.z, c.z);
            row.iterations = r.report.iterations();
        }
        row.ok = true;
    } catch (const NotConverged& e) {
        row.not_converged = true;
        row.iterations = e.report().iterations();
        row.error = e.what();
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

/// Errors against the manufactured solution on unit-square meshes with n cells
/// per side, for n in `levels` (at least three, each a multiple of the previous).
/// A failing level is recorded in its row and the others still run.
inline ConvergenceTable convergence_study(const ManufacturedCase& c, const std::vector<int>& levels, Study study,
                                          Variant variant = Variant::trace_form, const SolverTolerances& tol = {}) {
    if (levels.size() < 3) throw InvalidArgument("a convergence study needs at least three mesh levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1) throw InvalidArgument("mesh level must be positive");
        if (i > 0 && (levels[i] <= levels[i - 1] || levels[i] % levels[i - 1] != 0))
            throw InvalidArgument("mesh levels must be nested refinements (each a multiple of the previous)");
    }
    ConvergenceTable t;
    t.case_name = c.name;
    t.study = study;
    t.variant = variant;
    t.levels.resize(levels.size());
    grade2::detail::parallel_for(static_cast<int>(levels.size()), [&](int i) {
        t.levels[static_cast<std::size_t>(i)] = run_level(c, levels[static_cast<std::size_t>(i)], study, variant, tol);
    });
    auto order = [](double ec, double ef, double hc, double hf) {
        if (!(ec > 0.0) || !(ef > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return std::log(ec / ef) / std::log(hc / hf);
    };
    for (std::size_t i = 0; i + 1 < t.levels.size(); ++i) {
        const LevelRow& a = t.levels[i];
        const LevelRow& b = t.levels[i + 1];
        OrderRow o;
        o.n_coarse = a.n;
        o.n_fine = b.n;
        if (a.ok && b.ok) {
            o.u_l2 = order(a.u_l2, b.u_l2, a.h, b.h);
            o.u_h1 = order(a.u_h1, b.u_h1, a.h, b.h);
            o.p_l2 = order(a.p_l2, b.p_l2, a.h, b.h);
            o.z_l2 = order(a.z_l2, b.z_l2, a.h, b.h);
        }
        t.orders.push_back(o);
    }
    return t;
}

} // namespace grade2::mms

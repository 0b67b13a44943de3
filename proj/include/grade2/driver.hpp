#pragma once

#include "grade2/boundary.hpp"
#include "grade2/detail/parallel.hpp"
#include "grade2/error.hpp"
#include "grade2/fespace.hpp"
#include "grade2/stokes.hpp"
#include "grade2/transport.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace grade2 {

struct SolverTolerances {
    double fp_tol = 1e-8;
    int max_iter = 200;
    double relaxation = 1.0;      ///< z_{n+1} = w z_new + (1 - w) z_n, w in (0, 1]
    double flux_tol = -1.0;       ///< negative: 1e-8 times the boundary scale of g
    double eps_n = -1.0;          ///< negative: 1e-12 times the boundary scale of g
    double divergence_factor = 1e6;
    bool monotonicity_check = true;
    bool strict_inflow = false;   ///< trace-form data with degenerate g.n becomes an error
    Imposition imposition = Imposition::trace;
    LinearSolverKind linear_solver = LinearSolverKind::direct;
};

/// Data of one steady grade-two problem.
struct ProblemSpec {
    double nu = 1.0;
    double alpha = 0.0;
    VectorFunction f = [](double, double) { return Vec2(0, 0); };
    VectorFunction g = [](double, double) { return Vec2(0, 0); };
    ScalarFunction h = [](double, double) { return 0.0; };
    /// curl f; when empty it is approximated by central differences of f.
    ScalarFunction curl_f;
    Variant variant = Variant::trace_form;
    std::shared_ptr<const Mesh> mesh;
    SolverTolerances tol;

    void validate() const {
        if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("nu must be positive");
        if (!std::isfinite(alpha)) throw InvalidArgument("alpha must be finite");
        if (!(tol.relaxation > 0.0 && tol.relaxation <= 1.0)) throw InvalidArgument("relaxation must lie in (0, 1]");
        if (!(tol.fp_tol > 0.0)) throw InvalidArgument("fp_tol must be positive");
        if (tol.max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
        if (!mesh) throw InvalidArgument("problem has no mesh");
        if (!f || !g || !h) throw InvalidArgument("problem data f, g and h must be set");
    }
};

enum class StopReason { converged, max_iter, diverged };

inline const char* to_string(StopReason r) {
    switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iter: return "max_iter";
    case StopReason::diverged: return "diverged";
    }
    return "?";
}

struct IterationRecord {
    int iteration = 0;
    double dz_l2 = 0.0;        ///< ||z_{n+1} - z_n||
    double z_l2 = 0.0;         ///< ||z_{n+1}||
    double u_h1 = 0.0;         ///< |u_n|_{H1}
    double p_l2 = 0.0;         ///< ||p_n||
    double z_h1_broken = 0.0;  ///< cell-wise |z_{n+1}|_{H1}
};

struct IterationReport {
    std::vector<IterationRecord> rows;
    StopReason reason = StopReason::max_iter;
    std::string detail;
    double wall_time_s = 0.0;
    std::vector<std::string> warnings;

    bool converged() const { return reason == StopReason::converged; }
    int iterations() const { return static_cast<int>(rows.size()); }
    /// Geometric mean of dz_{n+1}/dz_n over the last few iterations; 0 when unavailable.
    double contraction_ratio() const {
        const int n = static_cast<int>(rows.size());
        if (n < 3) return 0.0;
        const int first = std::max(1, n - 5);
        double acc = 0.0;
        int cnt = 0;
        for (int i = first; i < n; ++i) {
            if (!(rows[static_cast<std::size_t>(i - 1)].dz_l2 > 0.0) || !(rows[static_cast<std::size_t>(i)].dz_l2 > 0.0)) continue;
            acc += std::log(rows[static_cast<std::size_t>(i)].dz_l2 / rows[static_cast<std::size_t>(i - 1)].dz_l2);
            ++cnt;
        }
        return cnt ? std::exp(acc / cnt) : 0.0;
    }
};

/// The fixed-point loop stopped without converging. Likely the data are
/// outside the small-data regime where the iteration is known to contract.
class NotConverged : public Error {
public:
    explicit NotConverged(IterationReport report)
        : Error("fixed-point iteration stopped (" + std::string(to_string(report.reason)) + ") after " +
                std::to_string(report.iterations()) + " iterations" + (report.detail.empty() ? "" : ": " + report.detail)),
          report_(std::move(report)) {}
    const IterationReport& report() const noexcept { return report_; }

private:
    IterationReport report_;
};

struct FixedPointResult {
    Spaces spaces;
    Field u, p, z;
    IterationReport report;
    BoundaryPartition part;
    InflowDatum datum;
};

namespace detail {

inline ScalarFunction curl_of(const ProblemSpec& s) {
    if (s.curl_f) return s.curl_f;
    const VectorFunction f = s.f;
    return [f](double x, double y) {
        const double hx = 1e-5 * (1.0 + std::abs(x)), hy = 1e-5 * (1.0 + std::abs(y));
        const double d2dx = (f(x + hx, y).y() - f(x - hx, y).y()) / (2 * hx);
        const double d1dy = (f(x, y + hy).x() - f(x, y - hy).x()) / (2 * hy);
        return d2dx - d1dy;
    };
}

inline double data_scale(const ProblemSpec& s, const Spaces& sp, const InflowDatum& d) {
    const Mesh& m = *s.mesh;
    double f2 = 0.0;
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const ElementGeometry g(m, t);
        for (const auto& q : quad::triangle_rule()) {
            const Vec2 x = g.point(q.bary);
            f2 += g.area * q.weight * s.f(x.x(), x.y()).squaredNorm();
        }
    }
    (void)sp;
    return 1.0 + std::sqrt(f2) + boundary_scale(m, s.g) + d.max_abs_q();
}

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace detail

/// Alternates generalized Stokes solves (given z) and transport solves (given u)
/// until the vorticity stops changing.
///
/// `initial` perturbs the starting vorticity (default zero); the inflow
/// lifting is always added so the first iterate already carries the data.
inline FixedPointResult fixed_point_solve(const ProblemSpec& spec, const Field* initial = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    spec.validate();
    const Mesh& m = *spec.mesh;
    Spaces spaces = build_spaces(spec.mesh);

    StokesOptions sopt;
    sopt.flux_tol = spec.tol.flux_tol;
    sopt.solver = spec.tol.linear_solver;
    check_flux_compatibility(m, spec.g, spec.tol.flux_tol);
    sopt.check_flux = false;

    const double eps_n = spec.tol.eps_n < 0.0 ? default_eps_n(m, spec.g) : spec.tol.eps_n;
    BoundaryPartition part = classify_boundary(m, spec.g, spec.alpha, eps_n);
    InflowDatum datum = build_inflow_datum(spec.variant, spec.h, spec.g, m, part, {spec.tol.strict_inflow});

    TransportOptions topt;
    topt.imposition = spec.tol.imposition;
    topt.eps_n = eps_n;

    const Field curl_f = spec.alpha != 0.0 ? project_vorticity(detail::curl_of(spec), spaces.vorticity) : Field(spaces.vorticity);
    const double scale = detail::data_scale(spec, spaces, datum);

    IterationReport report;
    report.warnings = datum.warnings;
    Field z(spaces.vorticity);
    if (initial) {
        if (initial->kind() != SpaceKind::vorticity || initial->coefficients.size() != z.coefficients.size())
            throw InvalidArgument("initial vorticity does not match the mesh");
        z.coefficients = initial->coefficients;
    }
    if (spec.alpha != 0.0) z.coefficients += inflow_lifting(datum, spaces.vorticity).coefficients;

    const double w = spec.tol.relaxation;
    std::optional<StokesSolution> last;
    for (int it = 1; it <= spec.tol.max_iter; ++it) {
        StokesSolution st = solve_generalized_stokes(spaces, spec.nu, z, spec.f, spec.g, sopt);
        Field rhs = curl(st.u, spaces.vorticity);
        rhs.coefficients = spec.nu * rhs.coefficients + spec.alpha * curl_f.coefficients;
        const TransportOperator op(st.u, spec.nu, spec.alpha, part, spaces.vorticity, topt);
        if (it == 1)
            for (const auto& msg : op.warnings()) report.warnings.push_back(msg);
        Field z_new = op.solve(rhs, datum);

        Field z_next(spaces.vorticity, w == 1.0 ? z_new.coefficients : Eigen::VectorXd(w * z_new.coefficients + (1 - w) * z.coefficients));
        const Norms zn = norms(z_next);
        IterationRecord rec;
        rec.iteration = it;
        rec.dz_l2 = norms(z_next - z).l2;
        rec.z_l2 = zn.l2;
        rec.z_h1_broken = zn.h1_semi;
        rec.u_h1 = norms(st.u).h1_semi;
        rec.p_l2 = norms(st.p).l2;
        report.rows.push_back(rec);
        z = std::move(z_next);
        last = std::move(st);

        const double target = spec.tol.fp_tol * (rec.z_l2 + 1.0);
        if (rec.dz_l2 <= target) {
            report.reason = StopReason::converged;
            break;
        }
        if (!std::isfinite(rec.z_l2) || rec.z_l2 > spec.tol.divergence_factor * scale) {
            report.reason = StopReason::diverged;
            report.detail = "||z|| = " + std::to_string(rec.z_l2) + " exceeds the divergence bound";
            break;
        }
        if (spec.tol.monotonicity_check && it > 4) {
            const double prev = report.rows[report.rows.size() - 2].dz_l2;
            if (rec.dz_l2 > prev && rec.dz_l2 > 1e3 * target) {
                report.reason = StopReason::diverged;
                report.detail = "iteration increments stopped decreasing at iteration " + std::to_string(it);
                break;
            }
        }
    }
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!report.converged()) {
        if (report.reason == StopReason::max_iter) report.detail = "no convergence within max_iter";
        throw NotConverged(std::move(report));
    }
    // Velocity and pressure consistent with the final vorticity.
    StokesSolution st = solve_generalized_stokes(spaces, spec.nu, z, spec.f, spec.g, sopt);
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return FixedPointResult{spaces, std::move(st.u), std::move(st.p), std::move(z), std::move(report), std::move(part),
                            std::move(datum)};
}

// ---------------------------------------------------------------------------

struct LimitRow {
    double alpha = 0.0;
    bool ok = false;
    std::string error;
    int iterations = 0;
    double u_h1_diff = 0.0;   ///< |u_alpha - u_0|_{H1}
    double z_curl_diff = 0.0; ///< ||z_alpha - curl u_0||_{L2}
};

/// Compares solutions for each alpha against the alpha = 0 (Navier-Stokes) solution.
/// A failing alpha is recorded in its row; the other rows still run.
inline std::vector<LimitRow> navier_stokes_limit_study(const ProblemSpec& spec, const std::vector<double>& alphas) {
    ProblemSpec ref_spec = spec;
    ref_spec.alpha = 0.0;
    const FixedPointResult ref = fixed_point_solve(ref_spec);
    const Field curl_ref = curl(ref.u, ref.spaces.vorticity);

    std::vector<LimitRow> rows(alphas.size());
    detail::parallel_for(static_cast<int>(alphas.size()), [&](int i) {
        LimitRow& row = rows[static_cast<std::size_t>(i)];
        row.alpha = alphas[static_cast<std::size_t>(i)];
        try {
            ProblemSpec s = spec;
            s.alpha = row.alpha;
            const FixedPointResult r = fixed_point_solve(s);
            row.iterations = r.report.iterations();
            row.u_h1_diff = norms(Field(ref.spaces.velocity, r.u.coefficients - ref.u.coefficients)).h1_semi;
            row.z_curl_diff = norms(Field(ref.spaces.vorticity, r.z.coefficients - curl_ref.coefficients)).l2;
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

struct UniquenessResult {
    double max_relative_distance = 0.0;
    std::vector<int> iterations;   ///< per start
};

/// Runs the fixed-point loop from n_starts random initial vorticities (uniform
/// in [-magnitude, magnitude] per coefficient) and measures how far apart the
/// limits are.
inline UniquenessResult uniqueness_probe(const ProblemSpec& spec, int n_starts, std::uint64_t seed, double magnitude = 1.0) {
    if (n_starts < 2) throw InvalidArgument("uniqueness probe needs at least two starts");
    spec.validate();
    const Spaces spaces = build_spaces(spec.mesh);
    std::vector<Field> starts;
    for (int s = 0; s < n_starts; ++s) {
        std::mt19937_64 rng(detail::splitmix(seed + static_cast<std::uint64_t>(s)));
        Field z(spaces.vorticity);
        for (Eigen::Index i = 0; i < z.coefficients.size(); ++i)
            z.coefficients[i] = magnitude * (2.0 * detail::unit_uniform(rng) - 1.0);
        starts.push_back(std::move(z));
    }
    std::vector<std::optional<FixedPointResult>> results(static_cast<std::size_t>(n_starts));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_starts));
    ProblemSpec s = spec;
    detail::parallel_for(n_starts, [&](int i) {
        try {
            results[static_cast<std::size_t>(i)].emplace(fixed_point_solve(s, &starts[static_cast<std::size_t>(i)]));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    UniquenessResult out;
    for (const auto& r : results) out.iterations.push_back(r->report.iterations());
    for (int i = 0; i < n_starts; ++i)
        for (int j = i + 1; j < n_starts; ++j) {
            const Field& a = results[static_cast<std::size_t>(i)]->z;
            const Field& b = results[static_cast<std::size_t>(j)]->z;
            const double denom = std::max({norms(a).l2, norms(b).l2, 1e-300});
            out.max_relative_distance = std::max(out.max_relative_distance, norms(a - b).l2 / denom);
        }
    return out;
}

// ---------------------------------------------------------------------------

struct Diagnostics {
    Norms u, p, z;
    EnergyReport energy;
    SignFunctional sign;
    double green_residual = 0.0;
    std::optional<double> beta;
    std::vector<DegeneratePoint> degenerate_points;
    int gamma_minus_edges = 0;
    double eps_n = 0.0;
};

/// Smooth test function used for the Green-formula residual.
inline double green_test_function(double x, double y) { return 1.0 + std::sin(x + 2.0 * y); }
inline Vec2 green_test_gradient(double x, double y) {
    const double c = std::cos(x + 2.0 * y);
    return Vec2(c, 2.0 * c);
}

inline Diagnostics diagnostics(const Field& u, const Field& p, const Field& z, const ProblemSpec& spec,
                               const BoundaryPartition& part) {
    Diagnostics d;
    d.u = norms(u);
    d.p = norms(p);
    d.z = norms(z);
    d.energy = stokes_energy_report(u, p, z, spec.f, spec.nu);
    d.sign = sign_functional_split(z, u, spec.alpha);
    d.green_residual = green_residual(z, u, green_test_function, green_test_gradient, part, GreenForm::full);
    d.beta = part.beta;
    d.degenerate_points = part.degenerate_points;
    d.gamma_minus_edges = static_cast<int>(part.gamma_minus.size());
    d.eps_n = part.eps_n;
    return d;
}

} // namespace grade2

#pragma once

#include "grade2/boundary.hpp"
#include "grade2/driver.hpp"
#include "grade2/io/config.hpp"
#include "grade2/io/csv.hpp"
#include "grade2/io/vtk.hpp"
#include "grade2/mms.hpp"
#include "grade2/transport.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace grade2::io {

/// Exit codes of the command-line tool.
enum ExitCode { exit_ok = 0, exit_input_error = 1, exit_not_converged = 2 };

struct CommandStreams {
    std::ostream& out = std::cout;
    std::ostream& err = std::cerr;
};

namespace detail {

inline std::filesystem::path prepare_out_dir(const RunConfig& c, const std::optional<std::string>& out_override) {
    std::filesystem::path dir = out_override ? std::filesystem::path(*out_override) : c.out_dir;
    if (!out_override && dir.is_relative() && !c.source.empty()) dir = c.source.parent_path() / dir;
    std::filesystem::create_directories(dir);
    return dir;
}

inline void print_warnings(std::ostream& err, const std::vector<std::string>& w) {
    for (const auto& s : w) err << "warning: " << s << '\n';
}

/// Runs body and maps library errors to exit codes with a message on err.
template <typename Body> int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const NotConverged& e) {
        err << "error: " << e.what() << " (data may be outside the small-data regime)\n";
        return exit_not_converged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    }
}

} // namespace detail

inline int cmd_solve(const std::string& config, const std::optional<std::string>& out_dir = {}, CommandStreams io = {}) {
    return detail::guarded(io.err, [&] {
        const RunConfig c = load_config(config);
        const ProblemSpec spec = problem_spec(c);
        const auto dir = detail::prepare_out_dir(c, out_dir);
        try {
            const FixedPointResult r = fixed_point_solve(spec);
            detail::print_warnings(io.err, r.report.warnings);
            const Diagnostics d = diagnostics(r.u, r.p, r.z, spec, r.part);
            if (c.write_vtk) write_vtk_file((dir / "solution.vtk").string(), *spec.mesh, &r.u, &r.p, &r.z);
            if (c.write_csv) {
                write_file((dir / "iterations.csv").string(), [&](std::ostream& os) { write_iterations_csv(os, r.report); });
                write_file((dir / "diagnostics.csv").string(),
                           [&](std::ostream& os) { write_key_values(os, "diagnostics", diagnostics_rows(d, r.report)); });
            }
            io.out << "converged in " << r.report.iterations() << " iterations; |u|_H1 = " << fmt(d.u.h1_semi)
                   << ", ||z||_L2 = " << fmt(d.z.l2) << '\n';
            return static_cast<int>(exit_ok);
        } catch (const NotConverged& e) {
            detail::print_warnings(io.err, e.report().warnings);
            if (c.write_csv)
                write_file((dir / "iterations.csv").string(), [&](std::ostream& os) { write_iterations_csv(os, e.report()); });
            throw;
        }
    });
}

inline int cmd_mms(const std::string& config, const std::optional<std::string>& out_dir = {}, CommandStreams io = {}) {
    return detail::guarded(io.err, [&] {
        const RunConfig c = load_config(config);
        const mms::ManufacturedCase mc = mms::manufactured_case(c.mms_case, c.nu, c.alpha);
        const mms::Study study = mms::parse_study(c.mms_study);
        const mms::ConvergenceTable t = mms::convergence_study(mc, c.mms_levels, study, c.variant, c.tol);
        const auto dir = detail::prepare_out_dir(c, out_dir);
        write_file((dir / "convergence.csv").string(), [&](std::ostream& os) { write_convergence_csv(os, t); });
        int code = exit_ok;
        for (const auto& r : t.levels) {
            if (r.ok) continue;
            io.err << "error: level n=" << r.n << ": " << r.error << '\n';
            code = std::max(code, static_cast<int>(r.not_converged ? exit_not_converged : exit_input_error));
        }
        if (code == exit_ok && !t.orders.empty()) {
            const auto& o = t.orders.back();
            io.out << "finest orders: u_l2 " << fmt_or_nan(o.u_l2) << ", u_h1 " << fmt_or_nan(o.u_h1) << ", p_l2 "
                   << fmt_or_nan(o.p_l2) << ", z_l2 " << fmt_or_nan(o.z_l2) << '\n';
        }
        return code;
    });
}

inline int cmd_check_boundary(const std::string& config, CommandStreams io = {}) {
    return detail::guarded(io.err, [&] {
        const RunConfig c = load_config(config);
        const auto mesh = make_mesh(c);
        const Mesh& m = *mesh;
        const VectorFunction g = as_function(c.g1, c.g2);
        const double eps_n = c.tol.eps_n < 0 ? default_eps_n(m, g) : c.tol.eps_n;
        const double flux_tol = c.tol.flux_tol < 0 ? 1e-8 * std::max(boundary_scale(m, g), 1e-300) : c.tol.flux_tol;

        const auto fluxes = flux_per_component(m, g);
        io.out << "boundary components: " << fluxes.size() << '\n';
        bool incompatible = false;
        for (std::size_t i = 0; i < fluxes.size(); ++i) {
            io.out << "  component " << i << ": flux " << fmt(fluxes[i]) << '\n';
            if (std::abs(fluxes[i]) > flux_tol) incompatible = true;
        }
        const BoundaryPartition part = classify_boundary(m, g, c.alpha, eps_n);
        if (c.alpha == 0.0) io.out << "alpha = 0: inflow boundary is empty\n";
        else if (part.gamma_minus.empty()) io.out << "inflow boundary is empty\n";
        std::map<int, int> per_marker_in, per_marker_rest;
        for (int b : part.gamma_minus) ++per_marker_in[m.boundary_edge(b).marker];
        for (int b : part.gamma_zero_plus) ++per_marker_rest[m.boundary_edge(b).marker];
        io.out << "inflow edges: " << part.gamma_minus.size() << '\n';
        for (const auto& [mk, n] : per_marker_in) io.out << "  marker " << mk << ": " << n << '\n';
        io.out << "other edges: " << part.gamma_zero_plus.size() << '\n';
        for (const auto& [mk, n] : per_marker_rest) io.out << "  marker " << mk << ": " << n << '\n';
        io.out << "junction vertices:";
        for (int v : part.junctions) io.out << ' ' << v;
        io.out << '\n';
        io.out << "degenerate points (zeros of g.n at junctions or inside the inflow boundary): " << part.degenerate_points.size() << '\n';
        for (const auto& d : part.degenerate_points) {
            const Vec2 x = m.vertex(d.vertex);
            io.out << "  vertex " << d.vertex << " (" << fmt(x.x()) << ", " << fmt(x.y()) << ") g.n = " << fmt(d.gn)
                   << (d.at_junction ? " [junction]" : " [interior]") << '\n';
            if (!d.at_junction)
                io.err << "warning: g.n vanishes inside the inflow boundary at vertex " << d.vertex << " (" << fmt(x.x())
                       << ", " << fmt(x.y()) << ")\n";
        }
        io.out << "beta: " << (part.beta ? fmt(*part.beta) : std::string("none")) << '\n';
        io.out << "eps_n: " << fmt(eps_n) << '\n';
        if (incompatible) {
            io.err << "error: flux incompatibility: some boundary component has non-zero net flux of g\n";
            return static_cast<int>(exit_input_error);
        }
        return static_cast<int>(exit_ok);
    });
}

inline int cmd_transport(const std::string& config, const std::optional<std::string>& out_dir = {}, CommandStreams io = {}) {
    return detail::guarded(io.err, [&] {
        const RunConfig c = load_config(config);
        const auto mesh = make_mesh(c);
        const Spaces sp = build_spaces(mesh);
        const VectorFunction uf = as_function(c.u1, c.u2);
        const double eps_n = c.tol.eps_n < 0 ? default_eps_n(*mesh, uf) : c.tol.eps_n;
        const BoundaryPartition part = classify_boundary(*mesh, uf, c.alpha, eps_n);
        const InflowDatum d = build_inflow_datum(c.variant, as_function(c.h), uf, *mesh, part, {c.tol.strict_inflow});
        const Field u = interpolate(uf, sp.velocity);
        const Field rhs = project_vorticity(as_function(c.rhs), sp.vorticity);
        TransportOptions topt;
        topt.eps_n = eps_n;
        topt.imposition = c.tol.imposition;
        const TransportSolution s = solve_transport(u, c.nu, c.alpha, rhs, d, part, topt);
        detail::print_warnings(io.err, s.warnings);

        const auto dir = detail::prepare_out_dir(c, out_dir);
        const Norms zn = norms(s.z);
        const SignFunctional sf = sign_functional_split(s.z, u, c.alpha);
        std::vector<KeyValue> rows{{"z_l2", fmt(zn.l2)},
                                   {"z_h1_broken", fmt(zn.h1_semi)},
                                   {"z_max_dof", fmt(zn.linf_dof)},
                                   {"inflow_edges", std::to_string(part.gamma_minus.size())},
                                   {"inflow_mismatch", fmt(s.inflow_mismatch)},
                                   {"sign_volume", fmt(sf.volume)},
                                   {"sign_interior", fmt(sf.interior)},
                                   {"sign_boundary", fmt(sf.boundary)},
                                   {"warnings", std::to_string(s.warnings.size())}};
        if (c.exact) rows.push_back({"z_l2_error", fmt(l2_error(s.z, as_function(*c.exact)))});
        if (c.write_vtk) write_vtk_file((dir / "solution.vtk").string(), *mesh, &u, nullptr, &s.z);
        if (c.write_csv) write_file((dir / "transport.csv").string(), [&](std::ostream& os) { write_key_values(os, "transport", rows); });
        io.out << "transport solved; ||z||_L2 = " << fmt(zn.l2);
        if (c.exact) io.out << ", L2 error = " << rows.back().value;
        io.out << '\n';
        return static_cast<int>(exit_ok);
    });
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, CommandStreams io = {}) {
    CLI::App app{"grade2: steady grade-two fluid solver (Stokes / transport fixed point)"};
    app.require_subcommand(1);
    std::string config;
    std::string out;
    auto add = [&](const char* name, const char* help, bool with_out) {
        CLI::App* s = app.add_subcommand(name, help);
        s->add_option("--config", config, "configuration file")->required();
        if (with_out) s->add_option("--out", out, "output directory (overrides [output] dir)");
        return s;
    };
    CLI::App* solve = add("solve", "coupled fixed-point solve", true);
    CLI::App* mms_cmd = add("mms", "manufactured-solution convergence study", true);
    CLI::App* check = add("check-boundary", "report inflow boundary, fluxes and degenerate points", false);
    CLI::App* transport = add("transport", "transport solve with a prescribed velocity", true);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        io.out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        io.out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        io.err << "error: " << e.what() << '\n';
        return exit_input_error;
    }
    const std::optional<std::string> out_opt = out.empty() ? std::nullopt : std::optional<std::string>(out);
    if (solve->parsed()) return cmd_solve(config, out_opt, io);
    if (mms_cmd->parsed()) return cmd_mms(config, out_opt, io);
    if (check->parsed()) return cmd_check_boundary(config, io);
    if (transport->parsed()) return cmd_transport(config, out_opt, io);
    return exit_input_error;
}

} // namespace grade2::io

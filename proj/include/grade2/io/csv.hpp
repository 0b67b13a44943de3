#pragma once

#include "grade2/driver.hpp"
#include "grade2/io/vtk.hpp"
#include "grade2/mms.hpp"

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace grade2::io {

/// Version of the CSV layouts below; bumped whenever a column changes.
inline constexpr int csv_version = 1;

inline std::string csv_header(const std::string& what) {
    return "# grade2 " + what + " csv v" + std::to_string(csv_version) + "\n";
}

inline void write_iterations_csv(std::ostream& os, const IterationReport& r) {
    os << csv_header("iterations");
    os << "iteration,dz_l2,z_l2,u_h1,p_l2,z_h1_broken\n";
    for (const auto& row : r.rows)
        os << row.iteration << ',' << fmt(row.dz_l2) << ',' << fmt(row.z_l2) << ',' << fmt(row.u_h1) << ',' << fmt(row.p_l2)
           << ',' << fmt(row.z_h1_broken) << '\n';
}

struct KeyValue {
    std::string key, value;
};

inline void write_key_values(std::ostream& os, const std::string& what, const std::vector<KeyValue>& rows) {
    os << csv_header(what);
    os << "quantity,value\n";
    for (const auto& kv : rows) os << kv.key << ',' << kv.value << '\n';
}

inline std::vector<KeyValue> diagnostics_rows(const Diagnostics& d, const IterationReport& r) {
    std::vector<KeyValue> v;
    v.push_back({"stop_reason", to_string(r.reason)});
    v.push_back({"iterations", std::to_string(r.iterations())});
    v.push_back({"contraction_ratio", fmt(r.contraction_ratio())});
    v.push_back({"warnings", std::to_string(r.warnings.size())});
    v.push_back({"u_l2", fmt(d.u.l2)});
    v.push_back({"u_h1_semi", fmt(d.u.h1_semi)});
    v.push_back({"p_l2", fmt(d.p.l2)});
    v.push_back({"z_l2", fmt(d.z.l2)});
    v.push_back({"z_h1_broken", fmt(d.z.h1_semi)});
    v.push_back({"energy_viscous", fmt(d.energy.viscous)});
    v.push_back({"energy_skew", fmt(d.energy.skew)});
    v.push_back({"energy_pressure_work", fmt(d.energy.pressure_work)});
    v.push_back({"energy_forcing", fmt(d.energy.forcing)});
    v.push_back({"div_u_l2", fmt(d.energy.div_l2)});
    v.push_back({"div_u_discrete", fmt(d.energy.div_discrete)});
    v.push_back({"sign_volume", fmt(d.sign.volume)});
    v.push_back({"sign_interior", fmt(d.sign.interior)});
    v.push_back({"sign_boundary", fmt(d.sign.boundary)});
    v.push_back({"sign_total", fmt(d.sign.total())});
    v.push_back({"green_residual", fmt(d.green_residual)});
    v.push_back({"beta", d.beta ? fmt(*d.beta) : std::string("none")});
    v.push_back({"inflow_edges", std::to_string(d.gamma_minus_edges)});
    v.push_back({"degenerate_points", std::to_string(d.degenerate_points.size())});
    v.push_back({"eps_n", fmt(d.eps_n)});
    return v;
}

inline std::string fmt_or_nan(double v) { return std::isnan(v) ? std::string("nan") : fmt(v); }

inline void write_convergence_csv(std::ostream& os, const mms::ConvergenceTable& t) {
    os << "# grade2 convergence csv v" << csv_version << " case=" << t.case_name << " study=" << mms::to_string(t.study)
       << " variant=" << to_string(t.variant) << '\n';
    os << "kind,n_coarse,n_fine,h,ok,iterations,u_l2,u_h1,p_l2,z_l2,error\n";
    for (const auto& r : t.levels) {
        std::string err = r.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        os << "level," << r.n << ",," << fmt(r.h) << ',' << (r.ok ? 1 : 0) << ',' << r.iterations << ',' << fmt_or_nan(r.u_l2)
           << ',' << fmt_or_nan(r.u_h1) << ',' << fmt_or_nan(r.p_l2) << ',' << fmt_or_nan(r.z_l2) << ',' << err << '\n';
    }
    for (const auto& o : t.orders)
        os << "order," << o.n_coarse << ',' << o.n_fine << ",,,," << fmt_or_nan(o.u_l2) << ',' << fmt_or_nan(o.u_h1) << ','
           << fmt_or_nan(o.p_l2) << ',' << fmt_or_nan(o.z_l2) << ",\n";
}

template <typename Writer> void write_file(const std::string& path, Writer&& w) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write '" + path + "'");
    w(os);
}

} // namespace grade2::io

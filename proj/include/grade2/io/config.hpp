#pragma once

// Run configuration: a sectioned key = value text file.
//
//   # comment
//   [problem]
//   nu = 1
//   alpha = 0.1
//   variant = P_II            # P_I (flux form) or P_II (trace form)
//   mesh = unit_square 16     # or square_with_hole N, or a mesh2d file path relative to this file
//   [data]
//   f1 = ...  f2 = ...  g1 = ...  g2 = ...  h = ...  curl_f = ...   (expressions in x, y)
//   [solver]
//   fp_tol, max_iter, relaxation, flux_tol, eps_n, strict_inflow, monotonicity_check,
//   imposition = trace|flux, linear_solver = direct|iterative
//   [output]
//   dir = out
//   formats = vtk csv
//   [mms]
//   case = trig   levels = 8 16 32   study = stokes|transport|coupled
//   [transport]
//   u1 = ...  u2 = ...  rhs = ...  exact = ...

#include "grade2/driver.hpp"
#include "grade2/error.hpp"
#include "grade2/expr.hpp"
#include "grade2/mesh.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace grade2::io {

/// An expression together with its source text.
struct ExprField {
    std::string text = "0";
    expr::Expr expr;
};

struct RunConfig {
    std::filesystem::path source;   ///< config file path, for resolving relative paths

    double nu = 1.0;
    double alpha = 0.0;
    Variant variant = Variant::trace_form;
    std::string mesh = "unit_square 8";

    ExprField f1, f2, g1, g2, h;
    std::optional<ExprField> curl_f;

    SolverTolerances tol;

    std::filesystem::path out_dir = "out";
    bool write_vtk = true;
    bool write_csv = true;

    std::string mms_case = "trig";
    std::vector<int> mms_levels{8, 16, 32};
    std::string mms_study = "coupled";

    ExprField u1, u2, rhs;
    std::optional<ExprField> exact;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& v, std::size_t line, const std::string& key) {
    double d = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), d);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(d))
        throw ParseError("'" + key + "' expects a number, got '" + v + "'", line);
    return d;
}

inline int to_int(const std::string& v, std::size_t line, const std::string& key) {
    int d = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), d);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ParseError("'" + key + "' expects an integer, got '" + v + "'", line);
    return d;
}

inline bool to_bool(const std::string& v, std::size_t line, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError("'" + key + "' expects true or false, got '" + v + "'", line);
}

inline ExprField to_expr(const std::string& v, std::size_t line, const std::string& key) {
    try {
        return {v, expr::parse(v)};
    } catch (const expr::SyntaxError& e) {
        throw ParseError("in expression '" + key + "': " + e.what(), line);
    }
}

} // namespace detail

inline RunConfig parse_config(std::istream& in, const std::filesystem::path& source = {}) {
    using namespace detail;
    RunConfig c;
    c.source = source;
    static const std::map<std::string, std::set<std::string>> known = {
        {"problem", {"nu", "alpha", "variant", "mesh"}},
        {"data", {"f1", "f2", "g1", "g2", "h", "curl_f"}},
        {"solver", {"fp_tol", "max_iter", "relaxation", "flux_tol", "eps_n", "strict_inflow", "monotonicity_check",
                    "imposition", "linear_solver"}},
        {"output", {"dir", "formats"}},
        {"mms", {"case", "levels", "study"}},
        {"transport", {"u1", "u2", "rhs", "exact"}},
    };
    std::string section;
    std::set<std::string> seen;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError("unterminated section header", line);
            section = trim(s.substr(1, s.size() - 2));
            if (!known.count(section)) throw ParseError("unknown section [" + section + "]", line);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (section.empty()) throw ParseError("key '" + key + "' appears before any section", line);
        if (!known.at(section).count(key)) throw ParseError("unknown key '" + key + "' in [" + section + "]", line);
        if (!seen.insert(section + "." + key).second) throw ParseError("duplicate key '" + key + "' in [" + section + "]", line);
        if (val.empty()) throw ParseError("key '" + key + "' has no value", line);

        if (section == "problem") {
            if (key == "nu") c.nu = to_double(val, line, key);
            else if (key == "alpha") c.alpha = to_double(val, line, key);
            else if (key == "variant") {
                if (val == "P_I") c.variant = Variant::flux_form;
                else if (val == "P_II") c.variant = Variant::trace_form;
                else throw ParseError("variant must be P_I or P_II", line);
            } else if (key == "mesh") c.mesh = val;
        } else if (section == "data") {
            ExprField e = to_expr(val, line, key);
            if (key == "f1") c.f1 = e;
            else if (key == "f2") c.f2 = e;
            else if (key == "g1") c.g1 = e;
            else if (key == "g2") c.g2 = e;
            else if (key == "h") c.h = e;
            else c.curl_f = e;
        } else if (section == "solver") {
            if (key == "fp_tol") c.tol.fp_tol = to_double(val, line, key);
            else if (key == "max_iter") c.tol.max_iter = to_int(val, line, key);
            else if (key == "relaxation") c.tol.relaxation = to_double(val, line, key);
            else if (key == "flux_tol") c.tol.flux_tol = to_double(val, line, key);
            else if (key == "eps_n") c.tol.eps_n = to_double(val, line, key);
            else if (key == "strict_inflow") c.tol.strict_inflow = to_bool(val, line, key);
            else if (key == "monotonicity_check") c.tol.monotonicity_check = to_bool(val, line, key);
            else if (key == "imposition") {
                if (val == "trace") c.tol.imposition = Imposition::trace;
                else if (val == "flux") c.tol.imposition = Imposition::flux;
                else throw ParseError("imposition must be trace or flux", line);
            } else if (key == "linear_solver") {
                if (val == "direct") c.tol.linear_solver = LinearSolverKind::direct;
                else if (val == "iterative") c.tol.linear_solver = LinearSolverKind::iterative;
                else throw ParseError("linear_solver must be direct or iterative", line);
            }
        } else if (section == "output") {
            if (key == "dir") c.out_dir = val;
            else {
                c.write_vtk = c.write_csv = false;
                std::istringstream ss(val);
                std::string fmt;
                while (ss >> fmt) {
                    if (fmt == "vtk") c.write_vtk = true;
                    else if (fmt == "csv") c.write_csv = true;
                    else throw ParseError("unknown output format '" + fmt + "'", line);
                }
            }
        } else if (section == "mms") {
            if (key == "case") c.mms_case = val;
            else if (key == "study") c.mms_study = val;
            else {
                c.mms_levels.clear();
                std::istringstream ss(val);
                std::string tok;
                while (ss >> tok) c.mms_levels.push_back(to_int(tok, line, key));
            }
        } else if (section == "transport") {
            ExprField e = to_expr(val, line, key);
            if (key == "u1") c.u1 = e;
            else if (key == "u2") c.u2 = e;
            else if (key == "rhs") c.rhs = e;
            else c.exact = e;
        }
    }
    if (!(c.nu > 0.0)) throw ParseError("nu must be positive", 0);
    if (!(c.tol.fp_tol > 0.0)) throw ParseError("fp_tol must be positive", 0);
    if (c.tol.max_iter < 1) throw ParseError("max_iter must be at least 1", 0);
    if (!(c.tol.relaxation > 0.0 && c.tol.relaxation <= 1.0)) throw ParseError("relaxation must lie in (0, 1]", 0);
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path.string() + "'", 0);
    return parse_config(in, path);
}

/// Builds the mesh named by the config: "unit_square N", "square_with_hole N" or a file path.
inline std::shared_ptr<const Mesh> make_mesh(const RunConfig& c) {
    std::istringstream ss(c.mesh);
    std::string kind;
    ss >> kind;
    if (kind == "unit_square" || kind == "square_with_hole") {
        int n = 0;
        std::string rest;
        if (!(ss >> n) || (ss >> rest) || n < 1) throw ParseError("mesh '" + c.mesh + "' expects one positive integer", 0);
        return std::make_shared<const Mesh>(kind == "unit_square" ? unit_square_mesh(n) : square_with_hole_mesh(n));
    }
    std::filesystem::path p = c.mesh;
    if (p.is_relative() && !c.source.empty()) p = c.source.parent_path() / p;
    return std::make_shared<const Mesh>(load_mesh(p.string()));
}

inline ScalarFunction as_function(const ExprField& e) {
    const expr::Expr ex = e.expr;
    return [ex](double x, double y) { return ex(x, y); };
}

inline VectorFunction as_function(const ExprField& a, const ExprField& b) {
    const expr::Expr ea = a.expr, eb = b.expr;
    return [ea, eb](double x, double y) { return Vec2(ea(x, y), eb(x, y)); };
}

inline ProblemSpec problem_spec(const RunConfig& c) {
    ProblemSpec s;
    s.nu = c.nu;
    s.alpha = c.alpha;
    s.variant = c.variant;
    s.f = as_function(c.f1, c.f2);
    s.g = as_function(c.g1, c.g2);
    s.h = as_function(c.h);
    if (c.curl_f) s.curl_f = as_function(*c.curl_f);
    s.mesh = make_mesh(c);
    s.tol = c.tol;
    return s;
}

} // namespace grade2::io

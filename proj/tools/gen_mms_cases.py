#!/usr/bin/env python3
"""Generate closed-form manufactured-solution kernels for grade2/mms.hpp.

Each case is defined by a stream function psi and a zero-mean pressure p.
The script derives u = (psi_y, -psi_x), z = curl(u - alpha*lap u), the body
force f = -nu*lap u + z x u + grad p and curl f, checks the transport
identity nu*z + alpha*u.grad z = nu*curl u + alpha*curl f symbolically, and
writes C++ expressions to include/grade2/detail/mms_cases.hpp.

Usage: python3 tools/gen_mms_cases.py > include/grade2/detail/mms_cases.hpp
"""
import sympy as sp

x, y, nu, alpha = sp.symbols("x y nu alpha", real=True)

CASES = {
    "poly": (x**2 * (1 - x)**2 * y**2 * (1 - y)**2, x**2 - y**2),
    "trig": (y + sp.Rational(1, 10) * sp.sin(sp.pi * x + sp.pi / 4) * sp.sin(sp.pi * y),
             sp.sin(sp.pi * x) * sp.cos(sp.pi * y)),
}


def lap(e):
    return sp.diff(e, x, 2) + sp.diff(e, y, 2)


def curl(a, b):
    return sp.diff(b, x) - sp.diff(a, y)


def derive(psi, p):
    u1, u2 = sp.diff(psi, y), -sp.diff(psi, x)
    assert sp.simplify(sp.diff(u1, x) + sp.diff(u2, y)) == 0
    z = curl(u1 - alpha * lap(u1), u2 - alpha * lap(u2))
    f1 = -nu * lap(u1) - z * u2 + sp.diff(p, x)
    f2 = -nu * lap(u2) + z * u1 + sp.diff(p, y)
    curl_f = curl(f1, f2)
    lhs = nu * z + alpha * (u1 * sp.diff(z, x) + u2 * sp.diff(z, y))
    rhs = nu * curl(u1, u2) + alpha * curl_f
    assert sp.simplify(sp.expand(lhs - rhs)) == 0
    assert sp.simplify(sp.integrate(p, (x, 0, 1), (y, 0, 1))) == 0
    return {
        "u1": u1, "u2": u2,
        "du1dx": sp.diff(u1, x), "du1dy": sp.diff(u1, y),
        "du2dx": sp.diff(u2, x), "du2dy": sp.diff(u2, y),
        "p": p, "dpdx": sp.diff(p, x), "dpdy": sp.diff(p, y),
        "z": z, "dzdx": sp.diff(z, x), "dzdy": sp.diff(z, y),
        "f1": f1, "f2": f2, "curl_f": curl_f,
    }


def cxx(e):
    return sp.ccode(e).replace("M_PI", "std::numbers::pi").replace("pow(", "std::pow(").replace("sin(", "std::sin(").replace("cos(", "std::cos(")


def emit(name, fields):
    out = [f"inline void {name}_case(double x, double y, double nu, double alpha, CaseValues& v) {{"]
    out.append("    (void)nu; (void)alpha;")
    keys = list(fields)
    reps, exprs = sp.cse([sp.simplify(fields[k]) for k in keys], optimizations="basic")
    for sym, e in reps:
        out.append(f"    const double {sym} = {cxx(e)};")
    for k, e in zip(keys, exprs):
        out.append(f"    v.{k} = {cxx(e)};")
    out.append("}")
    return "\n".join(out)


def main():
    print("// Generated by tools/gen_mms_cases.py. Do not edit by hand.")
    print("#pragma once\n\n#include <cmath>\n#include <numbers>\n\nnamespace grade2::mms::detail {\n")
    print("struct CaseValues {")
    print("    double u1, u2, du1dx, du1dy, du2dx, du2dy;")
    print("    double p, dpdx, dpdy, z, dzdx, dzdy, f1, f2, curl_f;")
    print("};\n")
    for name, (psi, p) in CASES.items():
        print(emit(name, derive(psi, p)))
        print()
    print("} // namespace grade2::mms::detail")


if __name__ == "__main__":
    main()

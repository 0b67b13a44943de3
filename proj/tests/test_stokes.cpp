#include "grade2/stokes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace grade2;
using std::numbers::pi;

namespace {

const VectorFunction zero_vec = [](double, double) { return Vec2(0, 0); };
const VectorFunction forcing = [](double x, double y) { return Vec2(std::sin(pi * y) + x, std::cos(pi * x) * y); };

Field random_vorticity(const Spaces& s, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    Field z(s.vorticity);
    for (Eigen::Index i = 0; i < z.coefficients.size(); ++i) z.coefficients[i] = d(rng);
    return z;
}

} // namespace

TEST(Assemble, ZeroVorticityGivesZeroSkewBlock) {
    const Spaces s = build_spaces(unit_square_mesh(3));
    const SaddleSystem sys = assemble_generalized_stokes(s, 1.0, Field(s.vorticity));
    EXPECT_EQ(sys.C.norm(), 0.0);
    EXPECT_LE((SparseMatrix(sys.A.transpose()) - sys.A).norm(), 1e-14 * sys.A.norm());
}

TEST(Assemble, SkewBlockIsSkewForRandomVectors) {
    const Spaces s = build_spaces(square_with_hole_mesh(4));
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 10; ++k) {
        const SaddleSystem sys = assemble_generalized_stokes(s, 1.0, random_vorticity(s, rng, 5.0));
        const double cn = sys.C.norm();
        for (int r = 0; r < 100; ++r) {
            Eigen::VectorXd v(sys.C.cols());
            for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = sys.dirichlet[static_cast<std::size_t>(i)] ? 0.0 : nd(rng);
            EXPECT_LE(std::abs(v.dot(sys.C * v)), 1e-12 * cn * v.squaredNorm());
        }
    }
}

TEST(Assemble, DoublingViscosityDoublesOnlyViscousBlock) {
    const Spaces s = build_spaces(unit_square_mesh(4));
    std::mt19937_64 rng(3);
    const Field z = random_vorticity(s, rng);
    const SaddleSystem a = assemble_generalized_stokes(s, 0.7, z);
    const SaddleSystem b = assemble_generalized_stokes(s, 1.4, z);
    EXPECT_LE((b.A - 2.0 * a.A).norm(), 1e-14 * b.A.norm());
    EXPECT_EQ((b.C - a.C).norm(), 0.0);
}

TEST(Assemble, RejectsBadInput) {
    const Spaces s = build_spaces(unit_square_mesh(2));
    Field z(s.vorticity);
    EXPECT_THROW(assemble_generalized_stokes(s, 0.0, z), InvalidArgument);
    z.coefficients[0] = std::nan("");
    EXPECT_THROW(assemble_generalized_stokes(s, 1.0, z), DomainError);
}

TEST(Solve, ZeroDataGivesZeroSolution) {
    const Spaces s = build_spaces(unit_square_mesh(4));
    const StokesSolution r = solve_generalized_stokes(s, 1.0, Field(s.vorticity), zero_vec, zero_vec);
    EXPECT_EQ(r.u.coefficients.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.p.coefficients.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Solve, PoiseuilleFlowIsRecoveredExactly) {
    // -Laplace u + grad p = 0 with u = (y(1-y), 0) gives p = -2 (x - 1/2).
    const VectorFunction g = [](double, double y) { return Vec2(y * (1 - y), 0); };
    for (int n : {2, 4, 8}) {
        const Spaces s = build_spaces(unit_square_mesh(n));
        const StokesSolution r = solve_generalized_stokes(s, 1.0, Field(s.vorticity), zero_vec, g);
        EXPECT_LE(l2_error(r.u, g), 1e-12);
        EXPECT_LE(l2_error(r.p, [](double x, double) { return -2 * (x - 0.5); }), 1e-11);
        EXPECT_LE(std::abs(mean(r.p)), 1e-10);
    }
}

TEST(Solve, EnergyIdentityWithHomogeneousData) {
    const Spaces s = build_spaces(square_with_hole_mesh(8));
    std::mt19937_64 rng(11);
    const Field z = random_vorticity(s, rng, 2.0);
    const StokesSolution r = solve_generalized_stokes(s, 0.5, z, forcing, zero_vec);
    const EnergyReport e = stokes_energy_report(r.u, r.p, z, forcing, 0.5);
    EXPECT_LE(std::abs(e.viscous - e.forcing), 1e-8 * e.forcing);
    EXPECT_LE(std::abs(e.skew), 1e-14 * e.viscous);
    EXPECT_LE(e.div_discrete, 1e-8 * e.u_h1_semi);
    EXPECT_LE(std::abs(e.imbalance()), 1e-8 * e.forcing);

    // The skew term does no work, so a ten times larger z still balances.
    Field z10(s.vorticity, 10.0 * z.coefficients);
    const StokesSolution r10 = solve_generalized_stokes(s, 0.5, z10, forcing, zero_vec);
    const EnergyReport e10 = stokes_energy_report(r10.u, r10.p, z10, forcing, 0.5);
    EXPECT_LE(std::abs(e10.viscous - e10.forcing), 1e-8 * e10.forcing);
}

TEST(Solve, StrongDivergenceShrinksUnderRefinement) {
    double prev = 0.0;
    for (int n : {4, 8, 16}) {
        const Spaces s = build_spaces(unit_square_mesh(n));
        const StokesSolution r = solve_generalized_stokes(s, 1.0, Field(s.vorticity), forcing, zero_vec);
        const double d = stokes_energy_report(r.u, r.p, Field(s.vorticity), forcing, 1.0).div_l2;
        if (prev > 0.0) {
            EXPECT_LT(d, 0.5 * prev);
        }
        prev = d;
    }
}

TEST(Solve, ScalingViscosityAndForceScalesPressure) {
    const Spaces s = build_spaces(unit_square_mesh(6));
    const double c = 3.0;
    const VectorFunction cf = [c](double x, double y) { return Vec2(c * forcing(x, y)); };
    // Without the skew term the problem is linear in (nu, f, p).
    const StokesSolution a = solve_generalized_stokes(s, 1.0, Field(s.vorticity), forcing, zero_vec);
    const StokesSolution b = solve_generalized_stokes(s, c, Field(s.vorticity), cf, zero_vec);
    EXPECT_LE((b.u.coefficients - a.u.coefficients).norm(), 1e-12 * a.u.coefficients.norm());
    EXPECT_LE((b.p.coefficients - c * a.p.coefficients).norm(), 1e-12 * c * a.p.coefficients.norm());

    // With a skew term, u is unchanged only when z scales with nu as well.
    std::mt19937_64 rng(5);
    const Field z = random_vorticity(s, rng);
    const StokesSolution u1 = solve_generalized_stokes(s, 1.0, z, forcing, zero_vec);
    const StokesSolution u2 = solve_generalized_stokes(s, c, Field(s.vorticity, c * z.coefficients), cf, zero_vec);
    EXPECT_LE((u2.u.coefficients - u1.u.coefficients).norm(), 1e-12 * u1.u.coefficients.norm());
    EXPECT_LE((u2.p.coefficients - c * u1.p.coefficients).norm(), 1e-12 * c * u1.p.coefficients.norm());
}

TEST(Solve, IdenticalInputsGiveIdenticalOutputs) {
    const Spaces s = build_spaces(unit_square_mesh(5));
    std::mt19937_64 rng(1);
    const Field z = random_vorticity(s, rng);
    const StokesSolution a = solve_generalized_stokes(s, 1.0, z, forcing, zero_vec);
    const StokesSolution b = solve_generalized_stokes(s, 1.0, z, forcing, zero_vec);
    EXPECT_EQ(a.u.coefficients, b.u.coefficients);
    EXPECT_EQ(a.p.coefficients, b.p.coefficients);
}

TEST(Solve, IterativeSolverMatchesDirect) {
    const Spaces s = build_spaces(unit_square_mesh(8));
    std::mt19937_64 rng(9);
    const Field z = random_vorticity(s, rng);
    const VectorFunction g = [](double, double y) { return Vec2(y * (1 - y), 0); };
    StokesOptions it;
    it.solver = LinearSolverKind::iterative;
    const StokesSolution a = solve_generalized_stokes(s, 1.0, z, forcing, g);
    const StokesSolution b = solve_generalized_stokes(s, 1.0, z, forcing, g, it);
    EXPECT_GT(b.krylov_iterations, 0);
    EXPECT_LE((a.u.coefficients - b.u.coefficients).norm(), 1e-8 * a.u.coefficients.norm());
    EXPECT_LE((a.p.coefficients - b.p.coefficients).norm(), 1e-8 * a.p.coefficients.norm());
}

TEST(Solve, FluxIncompatibleNamesComponent) {
    const Spaces s = build_spaces(square_with_hole_mesh(4));
    // g = (x, 0): flux 1 through the outer loop, -1/4 through the hole.
    const VectorFunction g = [](double x, double) { return Vec2(x, 0); };
    try {
        solve_generalized_stokes(s, 1.0, Field(s.vorticity), zero_vec, g);
        FAIL() << "expected FluxIncompatible";
    } catch (const FluxIncompatible& e) {
        EXPECT_EQ(e.component(), 0);
        EXPECT_NEAR(e.flux(), 1.0, 1e-12);
    }
}

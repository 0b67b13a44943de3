#include "grade2/mms.hpp"
#include "grade2/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <type_traits>

using namespace grade2;
using namespace grade2::mms;

namespace {

// Fourth-order central differences. Nesting them gives the higher derivatives
// without using any of the closed-form derivative fields.
constexpr double fd_h = 1e-2;
constexpr double pi_v = std::numbers::pi;

template <class F>
auto d_dx(const F& f, double x, double y) {
    const double h = fd_h;
    using R = std::decay_t<decltype(f(x, y))>;
    return R((f(x - 2 * h, y) - 8.0 * f(x - h, y) + 8.0 * f(x + h, y) - f(x + 2 * h, y)) / (12 * h));
}
template <class F>
auto d_dy(const F& f, double x, double y) {
    const double h = fd_h;
    using R = std::decay_t<decltype(f(x, y))>;
    return R((f(x, y - 2 * h) - 8.0 * f(x, y - h) + 8.0 * f(x, y + h) - f(x, y + 2 * h)) / (12 * h));
}
template <class F>
auto laplacian(const F& f, double x, double y) {
    const double h = fd_h;
    using R = std::decay_t<decltype(f(x, y))>;
    R c = -60.0 * f(x, y);
    c += 16.0 * (f(x - h, y) + f(x + h, y) + f(x, y - h) + f(x, y + h));
    c -= f(x - 2 * h, y) + f(x + 2 * h, y) + f(x, y - 2 * h) + f(x, y + 2 * h);
    return R(c / (12 * h * h));
}

struct Reference {
    const ManufacturedCase& c;
    Vec2 lap_u(double x, double y) const { return laplacian([&](double a, double b) { return Vec2(c.u(a, b)); }, x, y); }
    double z(double x, double y) const {
        auto w = [&](double a, double b) -> Vec2 { return c.u(a, b) - c.alpha * lap_u(a, b); };
        return d_dx([&](double a, double b) { return w(a, b).y(); }, x, y) -
               d_dy([&](double a, double b) { return w(a, b).x(); }, x, y);
    }
    Vec2 f(double x, double y) const {
        const Vec2 u = c.u(x, y);
        const double zz = z(x, y);
        const Vec2 grad_p(d_dx(c.p, x, y), d_dy(c.p, x, y));
        return -c.nu * lap_u(x, y) + Vec2(-zz * u.y(), zz * u.x()) + grad_p;
    }
    double curl_f(double x, double y) const {
        return d_dx([&](double a, double b) { return c.f(a, b).y(); }, x, y) -
               d_dy([&](double a, double b) { return c.f(a, b).x(); }, x, y);
    }
};

void expect_rel(double got, double want, double rel, const char* what, double x, double y) {
    EXPECT_LE(std::abs(got - want), rel * std::max(std::abs(want), 1.0)) << what << " at (" << x << ", " << y << ")";
}

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(unit_square_mesh(n)); }

} // namespace

TEST(Registry, KnownCasesAndUnknownName) {
    for (const auto& name : case_names()) EXPECT_EQ(manufactured_case(name, 1.0, 0.1).name, name);
    EXPECT_NE(std::find(case_names().begin(), case_names().end(), "poly"), case_names().end());
    EXPECT_NE(std::find(case_names().begin(), case_names().end(), "trig"), case_names().end());
    EXPECT_THROW(manufactured_case("nope", 1.0, 0.1), InvalidArgument);
    EXPECT_THROW(manufactured_case("trig", 0.0, 0.1), InvalidArgument);
}

TEST(Registry, StudyNames) {
    for (Study s : {Study::stokes, Study::transport, Study::coupled}) EXPECT_EQ(parse_study(to_string(s)), s);
    EXPECT_THROW(parse_study("both"), InvalidArgument);
}

class CaseFields : public ::testing::TestWithParam<std::string> {};

TEST_P(CaseFields, ForcingMatchesFiniteDifferencesAtRandomPoints) {
    for (double alpha : {0.0, 0.3}) {
        const ManufacturedCase c = manufactured_case(GetParam(), 0.7, alpha);
        const Reference ref{c};
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> d(0.05, 0.95);
        for (int k = 0; k < 100; ++k) {
            const double x = d(rng), y = d(rng);
            const Vec2 f = ref.f(x, y);
            expect_rel(c.f(x, y).x(), f.x(), 1e-6, "f1", x, y);
            expect_rel(c.f(x, y).y(), f.y(), 1e-6, "f2", x, y);
            expect_rel(c.z(x, y), ref.z(x, y), 1e-6, "z", x, y);
            expect_rel(c.curl_f(x, y), ref.curl_f(x, y), 1e-6, "curl f", x, y);
        }
    }
}

TEST_P(CaseFields, DerivativeFieldsMatchFiniteDifferences) {
    const ManufacturedCase c = manufactured_case(GetParam(), 1.0, 0.2);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(0.05, 0.95);
    for (int k = 0; k < 100; ++k) {
        const double x = d(rng), y = d(rng);
        const Mat2 G = c.grad_u(x, y);
        for (int i = 0; i < 2; ++i) {
            expect_rel(G(i, 0), d_dx([&](double a, double b) { return c.u(a, b)[i]; }, x, y), 1e-6, "du/dx", x, y);
            expect_rel(G(i, 1), d_dy([&](double a, double b) { return c.u(a, b)[i]; }, x, y), 1e-6, "du/dy", x, y);
        }
        expect_rel(c.grad_p(x, y).x(), d_dx(c.p, x, y), 1e-6, "dp/dx", x, y);
        expect_rel(c.grad_p(x, y).y(), d_dy(c.p, x, y), 1e-6, "dp/dy", x, y);
        expect_rel(c.grad_z(x, y).x(), d_dx(c.z, x, y), 1e-6, "dz/dx", x, y);
        expect_rel(c.grad_z(x, y).y(), d_dy(c.z, x, y), 1e-6, "dz/dy", x, y);
    }
}

TEST_P(CaseFields, VelocityIsDivergenceFree) {
    const ManufacturedCase c = manufactured_case(GetParam(), 1.0, 0.1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double x = d(rng), y = d(rng);
        const Mat2 G = c.grad_u(x, y);
        EXPECT_NEAR(G.trace(), 0.0, 1e-13 * (1.0 + G.norm()));
    }
}

TEST_P(CaseFields, AlphaZeroVorticityIsCurlOfVelocity) {
    const ManufacturedCase c = manufactured_case(GetParam(), 1.3, 0.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double x = d(rng), y = d(rng);
        const Mat2 G = c.grad_u(x, y);
        EXPECT_NEAR(c.z(x, y), G(1, 0) - G(0, 1), 1e-12 * (1.0 + G.norm()));
    }
}

TEST_P(CaseFields, PressureHasZeroMean) {
    const ManufacturedCase c = manufactured_case(GetParam(), 1.0, 0.1);
    const Spaces s = build_spaces(unit_square_mesh(16));
    double mean = 0.0, size = 0.0;
    const Mesh& m = s.mesh();
    for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
        const auto& tri = m.triangle(t);
        for (const auto& q : quad::triangle_rule()) {
            const Vec2 p = q.bary[0] * m.vertex(tri[0]) + q.bary[1] * m.vertex(tri[1]) + q.bary[2] * m.vertex(tri[2]);
            mean += q.weight * m.area(t) * c.p(p.x(), p.y());
            size += q.weight * m.area(t) * std::abs(c.p(p.x(), p.y()));
        }
    }
    EXPECT_LE(std::abs(mean), 1e-8 * size);
}

// Weak form of the momentum equation against smooth test fields vanishing on
// the boundary, integrated by quadrature: only the quadrature error remains.
TEST_P(CaseFields, SubstitutionResidualIsSmall) {
    const ManufacturedCase c = manufactured_case(GetParam(), 0.8, 0.15);
    const Mesh m = unit_square_mesh(32);
    const std::array<std::pair<int, int>, 3> modes{{{1, 1}, {2, 1}, {1, 3}}};
    for (auto [a, b] : modes) {
        for (int comp = 0; comp < 2; ++comp) {
            double residual = 0.0, scale = 0.0;
            for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
                const auto& tri = m.triangle(t);
                for (const auto& q : quad::triangle_rule()) {
                    const Vec2 p = q.bary[0] * m.vertex(tri[0]) + q.bary[1] * m.vertex(tri[1]) + q.bary[2] * m.vertex(tri[2]);
                    const double x = p.x(), y = p.y();
                    const double w = q.weight * m.area(t);
                    const double sx = std::sin(a * pi_v * x), sy = std::sin(b * pi_v * y);
                    const double phi = sx * sy;
                    const Vec2 dphi(a * pi_v * std::cos(a * pi_v * x) * sy, b * pi_v * sx * std::cos(b * pi_v * y));
                    const Mat2 G = c.grad_u(x, y);
                    const Vec2 u = c.u(x, y);
                    const double zz = c.z(x, y);
                    const Vec2 zxu(-zz * u.y(), zz * u.x());
                    const double terms[4] = {c.f(x, y)[comp] * phi, -c.nu * G.row(comp).dot(dphi), -zxu[comp] * phi,
                                             c.p(x, y) * dphi[comp]};
                    for (double v : terms) {
                        residual += w * v;
                        scale += w * std::abs(v);
                    }
                }
            }
            EXPECT_LE(std::abs(residual), 1e-8 * scale) << "mode " << a << "," << b << " component " << comp;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Cases, CaseFields, ::testing::Values("poly", "trig"));

TEST(PolyCase, VanishesOnBoundarySoInflowIsEmpty) {
    const ManufacturedCase c = manufactured_case("poly", 1.0, 0.5);
    for (int k = 0; k <= 20; ++k) {
        const double s = k / 20.0;
        for (const Vec2& p : {Vec2(s, 0), Vec2(s, 1), Vec2(0, s), Vec2(1, s)}) {
            EXPECT_EQ(c.u(p.x(), p.y()).norm(), 0.0);
        }
    }
    const Mesh m = unit_square_mesh(8);
    const BoundaryPartition part = classify_boundary(m, c.g(), c.alpha, 1e-12);
    EXPECT_TRUE(part.gamma_minus.empty());
}

TEST(TrigCase, ZeroFluxAndBothBoundaryParts) {
    const ManufacturedCase c = manufactured_case("trig", 1.0, 0.1);
    const Mesh m = unit_square_mesh(16);
    const auto flux = flux_per_component(m, c.g());
    ASSERT_EQ(flux.size(), 1u);
    EXPECT_NEAR(flux[0], 0.0, 1e-14);
    const BoundaryPartition part = classify_boundary(m, c.g(), c.alpha, default_eps_n(m, c.g()));
    EXPECT_FALSE(part.gamma_minus.empty());
    EXPECT_LT(part.gamma_minus.size(), m.num_boundary_edges());
}

TEST(TrigCase, InflowDataForBothVariants) {
    const ManufacturedCase c = manufactured_case("trig", 1.0, 0.1);
    const double x = 0.0, y = 0.37;
    EXPECT_EQ(c.h(Variant::trace_form)(x, y), c.z(x, y));
    EXPECT_NEAR(c.h(Variant::flux_form)(x, y), -c.z(x, y) * c.u(x, y).x(), 1e-15);
}

TEST(Study, RejectsBadLevels) {
    const ManufacturedCase c = manufactured_case("trig", 1.0, 0.1);
    EXPECT_THROW(convergence_study(c, {4, 8}, Study::stokes), InvalidArgument);
    EXPECT_THROW(convergence_study(c, {4, 6, 12}, Study::stokes), InvalidArgument);
    EXPECT_THROW(convergence_study(c, {8, 4, 16}, Study::stokes), InvalidArgument);
    EXPECT_THROW(convergence_study(c, {0, 4, 8}, Study::stokes), InvalidArgument);
}

TEST(Study, FailedLevelsAreMarkedNotThrown) {
    const ManufacturedCase c = manufactured_case("trig", 1.0, 0.1);
    SolverTolerances tol;
    tol.max_iter = 1;
    tol.fp_tol = 1e-14;
    const ConvergenceTable t = convergence_study(c, {2, 4, 8}, Study::coupled, Variant::trace_form, tol);
    ASSERT_EQ(t.levels.size(), 3u);
    ASSERT_EQ(t.orders.size(), 2u);
    for (const auto& row : t.levels) {
        EXPECT_FALSE(row.ok);
        EXPECT_TRUE(row.not_converged);
        EXPECT_FALSE(row.error.empty());
    }
    for (const auto& o : t.orders) EXPECT_TRUE(std::isnan(o.u_h1));
}

TEST(Study, StokesRatesForTaylorHood) {
    for (const char* name : {"trig", "poly"}) {
        const ConvergenceTable t = convergence_study(manufactured_case(name, 1.0, 0.1), {8, 16, 32}, Study::stokes);
        ASSERT_EQ(t.orders.size(), 2u);
        for (const auto& o : t.orders) {
            EXPECT_NEAR(o.u_h1, 2.0, 0.3) << name;
            EXPECT_NEAR(o.p_l2, 2.0, 0.3) << name;
            EXPECT_GE(o.u_l2, 2.7) << name;
        }
        EXPECT_GE(t.orders[1].u_h1, t.orders[0].u_h1 - 0.3) << name;
    }
}

TEST(Study, TransportRateWithExactVelocity) {
    for (Variant v : {Variant::trace_form, Variant::flux_form}) {
        const ConvergenceTable t = convergence_study(manufactured_case("trig", 1.0, 0.1), {8, 16, 32}, Study::transport, v);
        for (const auto& o : t.orders) EXPECT_GE(o.z_l2, 1.5);
        EXPECT_GE(t.orders[1].z_l2, t.orders[0].z_l2 - 0.3);
    }
}

TEST(Study, CoupledRatesTrackSubSolvers) {
    const ManufacturedCase c = manufactured_case("trig", 1.0, 0.1);
    const ConvergenceTable st = convergence_study(c, {8, 16, 32}, Study::stokes);
    const ConvergenceTable tr = convergence_study(c, {8, 16, 32}, Study::transport);
    SolverTolerances tol;
    tol.fp_tol = 1e-10;
    const ConvergenceTable co = convergence_study(c, {8, 16, 32}, Study::coupled, Variant::trace_form, tol);
    for (const auto& row : co.levels) EXPECT_TRUE(row.ok) << row.error;
    for (std::size_t i = 0; i < co.orders.size(); ++i) {
        EXPECT_NEAR(co.orders[i].u_h1, st.orders[i].u_h1, 0.3);
        EXPECT_NEAR(co.orders[i].p_l2, st.orders[i].p_l2, 0.3);
        EXPECT_NEAR(co.orders[i].z_l2, tr.orders[i].z_l2, 0.3);
    }
    EXPECT_GE(co.orders[1].u_h1, co.orders[0].u_h1 - 0.3);
    EXPECT_GE(co.orders[1].z_l2, co.orders[0].z_l2 - 0.3);
}

TEST(Study, PolyCaseCoupledWithEmptyInflow) {
    SolverTolerances tol;
    tol.fp_tol = 1e-10;
    const ConvergenceTable t = convergence_study(manufactured_case("poly", 1.0, 0.1), {8, 16, 32}, Study::coupled,
                                                 Variant::trace_form, tol);
    for (const auto& row : t.levels) EXPECT_TRUE(row.ok) << row.error;
    for (const auto& o : t.orders) {
        EXPECT_NEAR(o.u_h1, 2.0, 0.3);
        EXPECT_GE(o.z_l2, 1.5);
    }
}

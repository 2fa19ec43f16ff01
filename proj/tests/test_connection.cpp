#include "doctest.h"
#include "fsl/connection.hpp"

#include <cmath>

#include "fsl/tensors.hpp"

using namespace fsl;

TEST_SUITE_BEGIN("connection");

namespace {

LinearConnection zero_connection() {
    LinearConnection c;
    c.coeff = [](const Vec2&) { return Ten3{}; };
    c.analytic = true;
    return c;
}

std::vector<std::pair<ChartPoint, FiberVector>> circle_samples(const ChartPoint& p, int n) {
    std::vector<std::pair<ChartPoint, FiberVector>> out;
    for (int k = 0; k < n; ++k) {
        const double a = 2 * M_PI * k / n + 0.05;
        out.push_back({p, {std::cos(a), std::sin(a)}});
    }
    return out;
}

}  // namespace

TEST_CASE("compatibility residual") {
    const DiffEngine d = DiffEngine::dual_engine();
    const MetricField m = euclidean_metric();

    SUBCASE("zero connection is compatible with the euclidean metric") {
        CHECK(compatibility_residual(m, zero_connection(), circle_samples({0.3, 0.1}, 12), d) <
              1e-12);
    }
    SUBCASE("a single nonzero coefficient produces the closed-form residual") {
        LinearConnection c;
        c.coeff = [](const Vec2&) {
            Ten3 g{};
            g[0][0][0] = 1.0;  // Gamma^1_11
            return g;
        };
        const auto samples = circle_samples({0, 0}, 16);
        // cond1 residual for this connection: |y^1 * y^1 / |y||
        double expected = 0.0;
        for (const auto& [p, v] : samples)
            expected = std::max(expected, std::abs(v.y1 * v.y1 / v.norm()));
        CHECK(compatibility_residual(m, c, samples, d) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("torsion decomposition") {
    SUBCASE("symmetric coefficients have no torsion") {
        LinearConnection c;
        c.coeff = [](const Vec2&) {
            Ten3 g{};
            g[0][0][1] = g[0][1][0] = 0.7;
            g[1][1][1] = -0.3;
            return g;
        };
        const TorsionDecomposition td = torsion_decompose(c, {1, 1});
        CHECK(std::abs(td.rho[0]) < 1e-15);
        CHECK(std::abs(td.rho[1]) < 1e-15);
        CHECK(td.residual < 1e-15);
    }
    SUBCASE("the semi-symmetric closed form returns its 1-form") {
        const LinearConnection c = LinearConnection::semi_symmetric(
            [](const Vec2& p) { return Vec2{p[1], -p[0]}; });
        const TorsionDecomposition td = torsion_decompose(c, {1, 2});
        CHECK(td.rho[0] == doctest::Approx(2.0));
        CHECK(td.rho[1] == doctest::Approx(-1.0));
        CHECK(td.residual < 1e-15);  // every 2-D torsion has this form
    }
}

TEST_CASE("solve_constants classifies the euclidean metric as Riemannian") {
    const DiffEngine d = DiffEngine::dual_engine();
    const MetricField m = euclidean_metric();
    auto tr = std::make_shared<IndicatrixTrace>(
        trace_indicatrix(m, {0, 0}, seed_point(m, {0, 0}, {1, 0}), d));
    auto src = std::make_shared<SourceIntegrals>(source_integrals(*tr));
    const ConnectionSolve sol = solve_constants(tr, src);
    CHECK(sol.outcome == SolveOutcome::RiemannianCase);
    CHECK(sol.conic_residual < 1e-6);  // the unit circle is a quadratic curve
}

TEST_CASE("locally Minkowski metrics recover the canonical connection") {
    const DiffEngine d = DiffEngine::dual_engine();
    const MetricField m = randers_metric(0.3, 0.0);
    const ChartPoint p{0.7, -0.2};
    auto tr = std::make_shared<IndicatrixTrace>(trace_indicatrix(m, p, seed_point(m, p, {1, 0}), d));
    auto src = std::make_shared<SourceIntegrals>(source_integrals(*tr));
    const ConnectionSolve sol = solve_constants(tr, src);
    REQUIRE(sol.outcome == SolveOutcome::Solved);
    CHECK(std::abs(sol.k[0]) < 1e-9);
    CHECK(std::abs(sol.k[1]) < 1e-9);
    for (double th : {0.0, 1.0, 2.5})
        for (int i = 0; i < 2; ++i) CHECK(std::abs(sol.f_on_trace(i, th)) < 1e-9);

    const BuiltConnection built = build_connection(m, p, sol, d);
    CHECK(max_abs(built.gamma) < 1e-7);  // Gamma = G^l_ij = 0
    CHECK(built.fiber_spread < 1e-7);
}

TEST_CASE("x-dependent Randers drift fails the constants cross-validation") {
    const DiffEngine d = DiffEngine::dual_engine();
    const MetricField m = randers_x_metric(0.3);
    const ChartPoint p{0.25, 0.6};
    auto tr = std::make_shared<IndicatrixTrace>(trace_indicatrix(m, p, seed_point(m, p, {1, 0}), d));
    auto src = std::make_shared<SourceIntegrals>(source_integrals(*tr));
    const ConnectionSolve sol = solve_constants(tr, src);
    CHECK(sol.outcome == SolveOutcome::InconsistentConstants);
    CHECK(std::max(sol.k_spread[0], sol.k_spread[1]) > 10 * sol.k_threshold);
}

TEST_CASE("levi-civita comparison for constant averaged metrics") {
    // Euclidean averaged metric is 2 pi I; any rotational semi-symmetric
    // connection is metrical for it, and a constant conformal factor changes
    // neither the Christoffel symbols nor the comparison identity.
    const MatrixField gamma = [](const Vec2&) {
        return Mat2{{{2 * M_PI, 0.0}, {0.0, 2 * M_PI}}};
    };
    SUBCASE("zero connection") {
        const ComparisonReport rep = levi_civita_compare(gamma, zero_connection(), {0.4, -0.1});
        CHECK(rep.eq02_residual < 1e-10);
        CHECK(rep.metricality_residual < 1e-10);
    }
    SUBCASE("rotational semi-symmetric connection") {
        for (double sign : {1.0, -1.0}) {
            const LinearConnection c = LinearConnection::semi_symmetric(
                [sign](const Vec2& p) { return Vec2{sign * p[1], -sign * p[0]}; });
            const ComparisonReport rep = levi_civita_compare(gamma, c, {0.4, -0.1});
            CHECK(rep.eq02_residual < 1e-9);
            CHECK(rep.metricality_residual < 1e-9);
        }
    }
    SUBCASE("non-metrical connections are flagged") {
        LinearConnection c;
        c.coeff = [](const Vec2&) {
            Ten3 g{};
            g[0][0][0] = 0.5;
            return g;
        };
        const ComparisonReport rep = levi_civita_compare(gamma, c, {0, 0});
        CHECK(rep.metricality_residual > 1e-2);
        CHECK_THROWS_AS(levi_civita_compare(gamma, c, {0, 0}, 1e-3, 1e-3, true), NotMetrical);
    }
}

TEST_CASE("wagner test verdicts") {
    const DiffEngine d = DiffEngine::dual_engine();

    SUBCASE("euclidean is the Riemannian case") {
        const WagnerReport rep = wagner_test(euclidean_metric(), {{0, 0}, {0.4, 0.2}}, d);
        CHECK(rep.riemannian);
    }
    SUBCASE("constant Randers passes both sub-tests") {
        TraceOptions to;
        to.samples = 128;
        const WagnerReport rep =
            wagner_test(randers_metric(0.3, 0.0), {{0, 0}, {0.5, 0.5}, {-0.4, 0.8}}, d, to);
        CHECK_FALSE(rep.riemannian);
        CHECK(rep.scatter_residual < 1e-3);
        CHECK(rep.pde_residual < 1e-3);
    }
    SUBCASE("x-dependent Randers fails the scatter collapse") {
        TraceOptions to;
        to.samples = 128;
        const WagnerReport rep =
            wagner_test(randers_x_metric(0.3), {{0.0, 0.3}, {0.0, 0.7}, {0.0, 1.1}}, d, to);
        CHECK_FALSE(rep.riemannian);
        CHECK(rep.scatter_residual > 1e-2);
    }
}

TEST_CASE("landsberg-berwald check") {
    const DiffEngine d = DiffEngine::dual_engine();
    SUBCASE("euclidean: trivially Berwald") {
        const LandsbergReport rep = landsberg_berwald_check(euclidean_metric(), {0, 0}, d);
        CHECK(rep.verdict == LandsbergVerdict::BerwaldConfirmed);
    }
    SUBCASE("locally Minkowski: Landsberg and Berwald with vanishing f") {
        const LandsbergReport rep = landsberg_berwald_check(randers_metric(0.3, 0.0), {0.2, 0.4}, d);
        CHECK(rep.verdict == LandsbergVerdict::BerwaldConfirmed);
        CHECK(rep.max_alpha < 1e-8);
        CHECK(rep.max_f < 1e-6);
        CHECK(rep.gamma_vs_canonical < 1e-4);
    }
}

TEST_CASE("seed independence of the solved f") {
    const DiffEngine d = DiffEngine::dual_engine();
    const MetricField m = randers_metric(0.25, 0.1);
    const ChartPoint p{0.5, 0.5};
    auto solve_from = [&](const FiberVector& dir) {
        auto tr = std::make_shared<IndicatrixTrace>(
            trace_indicatrix(m, p, seed_point(m, p, dir), d));
        auto src = std::make_shared<SourceIntegrals>(source_integrals(*tr));
        return solve_constants(tr, src);
    };
    const ConnectionSolve s1 = solve_from({1, 0});
    const ConnectionSolve s2 = solve_from({0.3, 1.0});
    REQUIRE(s1.outcome == SolveOutcome::Solved);
    REQUIRE(s2.outcome == SolveOutcome::Solved);
    // f is a function on the indicatrix: compare through the extension
    for (double a : {0.3, 1.2, 2.8, 4.0}) {
        const Vec2 y{std::cos(a), std::sin(a)};
        for (int i = 0; i < 2; ++i)
            CHECK(std::abs(s1.f_extension(i, m, y) - s2.f_extension(i, m, y)) < 1e-5);
    }
}

TEST_SUITE_END();

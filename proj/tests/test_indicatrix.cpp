#include "doctest.h"
#include "fsl/indicatrix.hpp"

#include <cmath>

#include "fsl/tensors.hpp"

using namespace fsl;

TEST_SUITE_BEGIN("indicatrix");

TEST_CASE("seed_point lands on the indicatrix") {
    const DiffEngine d = DiffEngine::dual_engine();
    SUBCASE("euclidean") {
        const FiberVector s = seed_point(euclidean_metric(), {0, 0}, {3.0, 4.0});
        CHECK(s.y1 == doctest::Approx(0.6));
        CHECK(s.y2 == doctest::Approx(0.8));
    }
    SUBCASE("randers") {
        const FiberVector s = seed_point(randers_metric(0.3, 0.0), {0, 0}, {1.0, 0.0});
        CHECK(s.y1 == doctest::Approx(1.0 / 1.3));
        CHECK(s.y2 == doctest::Approx(0.0));
    }
    (void)d;
}

TEST_CASE("euclidean trace is the unit circle with period 2 pi") {
    const DiffEngine d = DiffEngine::dual_engine();
    const MetricField m = euclidean_metric();
    const IndicatrixTrace tr = trace_indicatrix(m, {0.2, -0.4}, seed_point(m, {0.2, -0.4}, {1, 0}), d);

    CHECK(tr.period == doctest::Approx(2 * M_PI).epsilon(1e-9));
    CHECK(tr.closure_error < 1e-9);
    for (int k = 0; k < tr.size(); k += 16) {
        CHECK(norm(tr.c[k]) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(tr.lam[k]) < 1e-9);
        CHECK(std::abs(tr.alpha[k][0]) < 1e-10);
        CHECK(std::abs(tr.omega[k][1]) < 1e-10);
        CHECK(tr.mu[k] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("conservation and period consistency on a Randers trace") {
    const DiffEngine d = DiffEngine::dual_engine();
    const MetricField m = randers_metric(0.3, 0.0);
    const ChartPoint p{0, 0};
    TraceOptions opts;
    opts.step = 1e-3;
    const IndicatrixTrace tr = trace_indicatrix(m, p, seed_point(m, p, {1, 0}), d, opts);

    SUBCASE("F = 1 along the trace") {
        double worst = 0.0;
        for (int k = 0; k < tr.size(); ++k)
            worst = std::max(worst, std::abs(m.value(p, {tr.c[k][0], tr.c[k][1]}) - 1.0));
        CHECK(worst < 1e-7);
    }
    SUBCASE("halving the step moves the period by < 1e-6") {
        TraceOptions fine = opts;
        fine.step = 5e-4;
        const IndicatrixTrace tr2 = trace_indicatrix(m, p, seed_point(m, p, {1, 0}), d, fine);
        CHECK(std::abs(tr.period - tr2.period) < 1e-6);
    }
    SUBCASE("lambda is periodic and genuinely nonconstant") {
        double lmin = tr.lam[0], lmax = tr.lam[0];
        for (double l : tr.lam) {
            lmin = std::min(lmin, l);
            lmax = std::max(lmax, l);
        }
        CHECK(lmax - lmin > 1e-4);  // far above engine noise
    }
    SUBCASE("mu weights are positive and total mass matches the polar oracle") {
        double mass = 0.0;
        for (int k = 0; k < tr.size(); ++k) {
            CHECK(tr.mu[k] > 0.0);
            mass += tr.mu[k] * tr.period / tr.size();
        }
        CHECK(mass == doctest::Approx(polar_mass(m, p, d)).epsilon(1e-6));
    }
}

TEST_CASE("lambda reconstructs the log of sqrt(g(V,V)) along the trace") {
    const DiffEngine d = DiffEngine::dual_engine();
    const MetricField m = randers_metric(0.25, -0.1);
    const ChartPoint p{0, 0};
    TraceOptions opts;
    opts.samples = 1024;
    const IndicatrixTrace tr = trace_indicatrix(m, p, seed_point(m, p, {1, 0}), d, opts);

    const double h = tr.period / tr.size();
    double integral = 0.0, worst = 0.0;
    for (int k = 1; k < tr.size(); ++k) {
        integral += 0.5 * h * (tr.lam[k - 1] + tr.lam[k]);
        worst = std::max(worst, std::abs(integral - (std::log(tr.w[k]) - std::log(tr.w[0]))));
    }
    CHECK(worst < 1e-5);
    integral += 0.5 * h * (tr.lam[tr.size() - 1] + tr.lam[0]);
    CHECK(std::abs(integral) < 1e-5);  // closed-curve closure of the integral
}

TEST_CASE("averaged metric") {
    const DiffEngine d = DiffEngine::dual_engine();

    SUBCASE("euclidean average is 2 pi times the identity") {
        const MetricField m = euclidean_metric();
        const IndicatrixTrace tr = trace_indicatrix(m, {0, 0}, seed_point(m, {0, 0}, {1, 0}), d);
        const AveragedMetric g = averaged_metric(tr);
        CHECK(std::abs(g.gamma[0][0] - 2 * M_PI) < 1e-7);
        CHECK(std::abs(g.gamma[1][1] - 2 * M_PI) < 1e-7);
        CHECK(std::abs(g.gamma[0][1]) < 1e-7);
    }
    SUBCASE("invariance under the choice of seed point") {
        const MetricField m = randers_metric(0.3, 0.0);
        const IndicatrixTrace t1 = trace_indicatrix(m, {0, 0}, seed_point(m, {0, 0}, {1, 0}), d);
        const IndicatrixTrace t2 = trace_indicatrix(m, {0, 0}, seed_point(m, {0, 0}, {-0.2, 1}), d);
        const Mat2 g1 = averaged_metric(t1).gamma, g2 = averaged_metric(t2).gamma;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(std::abs(g1[i][j] - g2[i][j]) < 1e-6 * std::abs(g1[0][0]));
    }
    SUBCASE("quadrature self-convergence") {
        const MetricField m = randers_metric(0.3, 0.0);
        TraceOptions opts;
        opts.samples = 512;
        const IndicatrixTrace tr = trace_indicatrix(m, {0, 0}, seed_point(m, {0, 0}, {1, 0}), d, opts);
        const Mat2 g1 = averaged_metric(tr).gamma;
        const Mat2 g2 = averaged_metric_subsampled(tr, 2).gamma;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(std::abs(g1[i][j] - g2[i][j]) < 1e-7);
    }
    SUBCASE("riemannian average is the period times the metric") {
        const MetricField m = axis_ellipse_metric(1.0, 2.0);
        const IndicatrixTrace tr = trace_indicatrix(m, {0, 0}, seed_point(m, {0, 0}, {1, 0}), d);
        const Mat2 g = averaged_metric(tr).gamma;
        CHECK(g[0][0] == doctest::Approx(tr.period * 1.0).epsilon(1e-8));
        CHECK(g[1][1] == doctest::Approx(tr.period * 4.0).epsilon(1e-8));
    }
}

TEST_CASE("source integrals") {
    const DiffEngine d = DiffEngine::dual_engine();

    SUBCASE("position-independent metrics have vanishing sources") {
        const MetricField m = randers_metric(0.3, 0.0);
        const IndicatrixTrace tr = trace_indicatrix(m, {0, 0}, seed_point(m, {0, 0}, {1, 0}), d);
        const SourceIntegrals s = source_integrals(tr);
        CHECK(std::abs(s.beta_at(0, tr.period / 3)) < 1e-10);
        CHECK(std::abs(s.gamma_at(1, tr.period / 2)) < 1e-10);
    }
    SUBCASE("cumulative integrals self-converge under halved sampling") {
        const MetricField m = randers_x_metric(0.3);
        const ChartPoint p{0.3, 0.4};
        TraceOptions o1;
        o1.samples = 512;
        const IndicatrixTrace t1 = trace_indicatrix(m, p, seed_point(m, p, {1, 0}), d, o1);
        const SourceIntegrals s1 = source_integrals(t1);
        IndicatrixTrace t2;  // half-resolution view of the same data
        t2.period = t1.period;
        t2.theta.resize(256);
        t2.alpha.resize(256);
        t2.omega.resize(256);
        for (int k = 0; k < 256; ++k) {
            t2.theta[k] = t1.theta[2 * k];
            t2.alpha[k] = t1.alpha[2 * k];
            t2.omega[k] = t1.omega[2 * k];
        }
        const SourceIntegrals s2 = source_integrals(t2);
        for (double t : {0.9, 2.1, t1.period}) {
            CHECK(std::abs(s1.beta_at(0, t) - s2.beta_at(0, t)) < 1e-6);
            CHECK(std::abs(s1.gamma_at(0, t) - s2.gamma_at(0, t)) < 1e-6);
        }
        CHECK(std::isfinite(s1.beta_at(0, t1.period)));
    }
}

TEST_CASE("parameter lookup inverts the trace") {
    const DiffEngine d = DiffEngine::dual_engine();
    const MetricField m = randers_metric(0.2, 0.15);
    const IndicatrixTrace tr = trace_indicatrix(m, {0, 0}, seed_point(m, {0, 0}, {1, 0}), d);
    for (int k = 0; k < tr.size(); k += 13) {
        const double th = tr.theta_of(tr.c[k]);
        CHECK(std::abs(th - tr.theta[k]) < 1e-8);
    }
    // scale invariance of the lookup direction
    const double th = tr.theta_of(scale(tr.c[40], 3.7));
    CHECK(std::abs(th - tr.theta[40]) < 1e-8);
}

TEST_SUITE_END();

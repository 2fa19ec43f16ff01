#include "doctest.h"
#include "fsl/diff_engine.hpp"

#include <cmath>

using namespace fsl;

TEST_SUITE_BEGIN("diff-engine");

namespace {

// non-homogeneous polynomial probe (the engines do not care about axioms here)
MetricField poly_field() {
    return MetricField::closed_form("poly", [](const auto& x, const auto& y) {
        return y[0] * y[0] * y[0] * y[0] * y[0] + 2.0 * y[0] * y[0] * y[1] * y[1] * y[1] +
               x[0] * x[0] * y[1] * y[1] + x[1] * y[0] * y[1] + 7.0;
    });
}

}  // namespace

TEST_CASE("polynomial partials are exact") {
    const MetricField m = poly_field();
    const ChartPoint p{0.4, -0.3};
    const FiberVector v{0.8, 1.1};

    struct Probe {
        PartialIndex idx;
        double expected;
    };
    const Probe probes[] = {
        {{0, 0, 5, 0}, 120.0},                      // d^5/dy1^5 of y1^5
        {{0, 0, 2, 3}, 24.0},                       // d^5/dy1^2 dy2^3 of 2 y1^2 y2^3
        {{2, 0, 0, 2}, 4.0},                        // d^4/dx1^2 dy2^2 of x1^2 y2^2
        {{0, 1, 1, 1}, 1.0},                        // d^3/dx2 dy1 dy2 of x2 y1 y2
        {{0, 0, 1, 0}, 5 * 0.8 * 0.8 * 0.8 * 0.8 + 4 * 0.8 * 1.1 * 1.1 * 1.1 + (-0.3) * 1.1},
    };

    const DiffEngine dual = DiffEngine::dual_engine();
    const DiffEngine fd = DiffEngine::fd_engine();
    for (const auto& pr : probes) {
        CHECK(dual.f_partial(m, p, v, pr.idx) == doctest::Approx(pr.expected).epsilon(1e-9));
        CHECK(fd.f_partial(m, p, v, pr.idx) == doctest::Approx(pr.expected).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("fd engine tracks the dual engine on a Randers metric") {
    const MetricField m = randers_x_metric(0.3);  // x-dependent drift
    const ChartPoint p{0.2, 0.7};
    const FiberVector v{0.9, -0.5};
    const DiffEngine dual = DiffEngine::dual_engine();
    const DiffEngine fd = DiffEngine::fd_engine();

    const PartialIndex probes[] = {
        {0, 0, 1, 0}, {0, 0, 1, 1}, {0, 0, 2, 1}, {1, 0, 0, 1},
        {0, 1, 2, 0}, {0, 0, 2, 2}, {0, 1, 2, 2}, {0, 0, 3, 2},
    };
    for (const auto& idx : probes) {
        const double a = dual.e_partial(m, p, v, idx);
        const double b = fd.e_partial(m, p, v, idx);
        const double tol = idx.total() >= 5 ? 2e-5 : 1e-6;
        CHECK(std::abs(a - b) < tol);
    }
}

TEST_CASE("series table matches individual partials") {
    const MetricField m = randers_metric(0.2, -0.1);
    const ChartPoint p{0.0, 0.0};
    const FiberVector v{1.0, 0.4};
    const DiffEngine dual = DiffEngine::dual_engine();
    const Series2 s = dual.e_series_y(m, p, v, 3);
    CHECK(s.partial(2, 0) == doctest::Approx(dual.e_partial(m, p, v, y_index(2, 0))));
    CHECK(s.partial(1, 2) == doctest::Approx(dual.e_partial(m, p, v, y_index(1, 2))));
}

TEST_CASE("near-zero fiber vectors are rejected") {
    const MetricField m = euclidean_metric();
    const DiffEngine dual = DiffEngine::dual_engine();
    CHECK_THROWS_AS(dual.f_partial(m, {0, 0}, {0.0, 1e-13}, y_index(1, 0)), SingularMetric);
}

TEST_CASE("dual engine refuses black-box metrics") {
    const MetricField m = MetricField::black_box(
        "bb", [](const Vec2&, const Vec2& y) { return norm(y); });
    const DiffEngine dual = DiffEngine::dual_engine();
    CHECK_THROWS_AS(dual.f_partial(m, {0, 0}, {1.0, 0.0}, y_index(1, 0)), NonSmoothEvaluation);
    CHECK(DiffEngine::for_metric(m).kind() == DiffEngine::Kind::fd);
}

TEST_SUITE_END();

#include "doctest.h"
#include "fsl/series2.hpp"

using namespace fsl;

TEST_SUITE_BEGIN("series2");

namespace {

// series of (a + x)(b + y) around (0,0) at degree deg
Series2 product_series(double a, double b, int deg) {
    return Series2::coordinate(0, a, deg) * Series2::coordinate(1, b, deg);
}

}  // namespace

TEST_CASE("multiplication truncates correctly") {
    const Series2 s = product_series(2.0, 3.0, 3);
    CHECK(s.at(0, 0) == doctest::Approx(6.0));
    CHECK(s.at(1, 0) == doctest::Approx(3.0));
    CHECK(s.at(0, 1) == doctest::Approx(2.0));
    CHECK(s.at(1, 1) == doctest::Approx(1.0));
    CHECK(s.at(2, 0) == doctest::Approx(0.0));
}

TEST_CASE("reciprocal inverts a series") {
    const Series2 s = product_series(2.0, 3.0, 4);
    const Series2 r = s.reciprocal();
    const Series2 one = s * r;
    CHECK(one.at(0, 0) == doctest::Approx(1.0));
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; a + b <= 4; ++b)
            if (a + b > 0) CHECK(one.at(a, b) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("diff shifts coefficients") {
    // f = x^2 y: df/dx = 2xy
    Series2 s(3);
    s.at(2, 1) = 1.0;
    const Series2 d = s.diff(0);
    CHECK(d.at(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("partial recovers mixed partial derivatives with factorials") {
    Series2 s(5);
    s.at(3, 2) = 0.5;  // f = x^3 y^2 / 2 -> d^5 f / dx^3 dy^2 = 6 * 2 * 0.5
    CHECK(s.partial(3, 2) == doctest::Approx(6.0));
}

TEST_SUITE_END();

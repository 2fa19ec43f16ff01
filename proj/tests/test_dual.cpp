#include "doctest.h"
#include "fsl/dual.hpp"

#include <cmath>

using namespace fsl;

TEST_SUITE_BEGIN("dual");

TEST_CASE("first derivatives of elementary functions") {
    const Jet<double> x{2.0, 1.0};

    SUBCASE("polynomial") {
        const auto f = x * x * x - 2.0 * x + 1.0;
        CHECK(primal(f) == doctest::Approx(5.0));
        CHECK(derivative(f) == doctest::Approx(10.0));
    }
    SUBCASE("quotient") {
        const auto f = 1.0 / x;
        CHECK(derivative(f) == doctest::Approx(-0.25));
    }
    SUBCASE("sqrt") {
        const auto f = sqrt(x);
        CHECK(derivative(f) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))));
    }
    SUBCASE("trig") {
        CHECK(derivative(sin(x)) == doctest::Approx(std::cos(2.0)));
        CHECK(derivative(cos(x)) == doctest::Approx(-std::sin(2.0)));
    }
    SUBCASE("pow") {
        CHECK(derivative(pow(x, 2.5)) == doctest::Approx(2.5 * std::pow(2.0, 1.5)));
    }
}

TEST_CASE("nested jets carry second derivatives") {
    using J2 = Jet<Jet<double>>;
    const J2 x{{3.0, 1.0}, {1.0, 0.0}};

    const auto f = x * x * x;  // f'' = 6x = 18
    CHECK(primal(primal(f)) == doctest::Approx(27.0));
    CHECK(derivative(primal(f)) == doctest::Approx(27.0 / 3 * 3.0).epsilon(1e-12));
    CHECK(derivative(derivative(f)) == doctest::Approx(18.0));

    // mixed-partial symmetry
    CHECK(derivative(primal(f)) == doctest::Approx(primal(derivative(f))));
}

TEST_CASE("seed masks address individual nesting levels") {
    // d^3/dx^2 dy of x^2 y at (x,y) = (2, 5): 2
    const auto x = jet_seed<3>(2.0, 0b011);  // levels 0,1 differentiate x
    const auto y = jet_seed<3>(5.0, 0b100);  // level 2 differentiates y
    const auto f = x * x * y;
    CHECK(jet_extract<3>(f) == doctest::Approx(2.0));

    // fifth derivative of x^5: 120
    const auto z = jet_seed<5>(1.3, 0b11111);
    const auto g = z * z * z * z * z;
    CHECK(jet_extract<5>(g) == doctest::Approx(120.0));
}

TEST_CASE("derivatives on polynomials of degree 5 are exact to 1e-9") {
    auto poly = [](auto t) { return t * t * t * t * t - 3.0 * t * t * t + t; };
    const auto x = jet_seed<4>(0.7, 0b1111);
    // p'''' (t) = 120 t
    CHECK(jet_extract<4>(poly(x)) == doctest::Approx(120.0 * 0.7).epsilon(1e-9));
}

TEST_SUITE_END();

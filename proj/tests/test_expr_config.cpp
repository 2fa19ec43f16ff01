#include "doctest.h"
#include "fsl/config.hpp"
#include "fsl/expr.hpp"
#include "fsl/metric_field.hpp"

#include <cmath>

using namespace fsl;

TEST_SUITE_BEGIN("expr-config");

TEST_CASE("expression grammar") {
    SUBCASE("arithmetic and precedence") {
        CHECK(Expr::parse("1 + 2*3 - 4/2").eval({0, 0}, {0, 0}) == doctest::Approx(5.0));
        CHECK(Expr::parse("2^3^1").eval({0, 0}, {0, 0}) == doctest::Approx(8.0));
        CHECK(Expr::parse("-(2 + 1)*4").eval({0, 0}, {0, 0}) == doctest::Approx(-12.0));
    }
    SUBCASE("variables and functions") {
        CHECK(Expr::parse("u2").eval({0.3, -0.8}, {0, 0}) == doctest::Approx(-0.8));
        CHECK(Expr::parse("sqrt(y1^2 + y2^2)").eval({0, 0}, {3, 4}) == doctest::Approx(5.0));
        CHECK(Expr::parse("sin(u1)*cos(u2)").eval({0.5, 0.2}, {0, 0}) ==
              doctest::Approx(std::sin(0.5) * std::cos(0.2)));
    }
    SUBCASE("the trifocal seed expression") {
        const Expr e = Expr::parse(
            "sqrt((y1+1)^2 + y2^2) + sqrt(y1^2 + y2^2) + sqrt((y1-1)^2 + y2^2) - 4");
        CHECK(e.eval({0, 0}, {4.0 / 3.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("parse errors carry positions") {
        CHECK_THROWS_AS(Expr::parse("2 +"), ConfigError);
        CHECK_THROWS_AS(Expr::parse("foo(1)"), ConfigError);
        CHECK_THROWS_AS(Expr::parse("(1 + 2"), ConfigError);
        CHECK_THROWS_AS(Expr::parse("1 2"), ConfigError);
    }
}

TEST_CASE("config parsing") {
    const RunConfig cfg = RunConfig::parse_string(
        "# comment\n"
        "[metric]\n"
        "preset = randers:0.3,0\n"
        "[grid]\n"
        "u1 = -1:1:3\n"
        "u2 = 0:0:1\n"
        "[trace]\n"
        "samples = 128\n");

    CHECK(cfg.get_string("metric", "preset") == "randers:0.3,0");
    CHECK(cfg.get_int_or("trace", "samples", 256) == 128);
    CHECK(cfg.get_double_or("trace", "step", 1e-3) == doctest::Approx(1e-3));

    const GridAxis ax = cfg.get_axis("grid", "u1");
    CHECK(ax.min == -1.0);
    CHECK(ax.max == 1.0);
    CHECK(ax.count == 3);

    const auto grid = cfg.base_grid();
    CHECK(grid.size() == 3);
    CHECK(grid[0].u1 == doctest::Approx(-1.0));
    CHECK(grid[2].u1 == doctest::Approx(1.0));
}

TEST_CASE("config errors name the offending key") {
    const RunConfig cfg = RunConfig::parse_string("[grid]\nu1 = 0:1:bad\n");
    CHECK_THROWS_WITH_AS(cfg.get_axis("grid", "u1"),
                         doctest::Contains("u1"), ConfigError);
    CHECK_THROWS_WITH_AS(cfg.get_string("metric", "preset"),
                         doctest::Contains("preset"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_string("novalue\n"), ConfigError);
}

TEST_CASE("preset parsing") {
    CHECK(make_preset("euclidean").name() == "euclidean");
    CHECK_THROWS_AS(make_preset("randers:0.9,0.9"), ConfigError);  // |b| >= 1
    CHECK_THROWS_AS(make_preset("unknown"), ConfigError);
    CHECK_THROWS_AS(make_preset("plane:nope"), ConfigError);
}

TEST_SUITE_END();

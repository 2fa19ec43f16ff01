#pragma once

// A Finsler fundamental function on a planar chart. Closed-form metrics are
// stored as a tower of evaluators instantiated over nested dual numbers, one
// per differentiation depth, so forward-mode derivatives of any mixed order
// up to kTower are available. Black-box metrics (e.g. gauges of implicitly
// defined indicatrices) carry only the double evaluator and require the
// finite-difference engine.

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <tuple>
#include <utility>

#include "fsl/dual.hpp"
#include "fsl/geometry.hpp"

namespace fsl {

inline constexpr int kTower = 6;  // max nesting depth of the dual evaluators

namespace detail {

template <int N>
using MetricEvaluator =
    std::function<JetN<N>(const std::array<JetN<N>, 2>&, const std::array<JetN<N>, 2>&)>;

template <class Seq>
struct TowerTuple;
template <int... Ns>
struct TowerTuple<std::integer_sequence<int, Ns...>> {
    using type = std::tuple<MetricEvaluator<Ns>...>;
};

}  // namespace detail

class MetricField {
    using Tower = detail::TowerTuple<std::make_integer_sequence<int, kTower + 1>>::type;

  public:
    MetricField() = default;

    // fn must be callable as fn(std::array<T,2> x, std::array<T,2> y) -> T for
    // any scalar type T in the jet tower.
    template <class Fn>
    static MetricField closed_form(std::string name, Fn fn, int max_x_order = 2, int max_y_order = 5) {
        MetricField m;
        m.name_ = std::move(name);
        m.closed_form_ = true;
        m.max_x_order_ = max_x_order;
        m.max_y_order_ = max_y_order;
        m.install<0>(fn);
        return m;
    }

    static MetricField black_box(std::string name,
                                 std::function<double(const Vec2&, const Vec2&)> fn) {
        MetricField m;
        m.name_ = std::move(name);
        m.closed_form_ = false;
        std::get<0>(m.tower_) = [fn = std::move(fn)](const std::array<double, 2>& x,
                                                     const std::array<double, 2>& y) {
            return fn(Vec2{x[0], x[1]}, Vec2{y[0], y[1]});
        };
        return m;
    }

    const std::string& name() const { return name_; }
    bool has_closed_form() const { return closed_form_; }

    double value(const ChartPoint& p, const FiberVector& v) const {
        return std::get<0>(tower_)({p.u1, p.u2}, {v.y1, v.y2});
    }
    double value(const Vec2& x, const Vec2& y) const {
        return std::get<0>(tower_)({x[0], x[1]}, {y[0], y[1]});
    }

    template <int N>
    JetN<N> eval(const std::array<JetN<N>, 2>& x, const std::array<JetN<N>, 2>& y) const {
        return std::get<N>(tower_)(x, y);
    }

  private:
    template <int N, class Fn>
    void install(Fn fn) {
        std::get<N>(tower_) = [fn](const std::array<JetN<N>, 2>& x, const std::array<JetN<N>, 2>& y) {
            return fn(x, y);
        };
        if constexpr (N < kTower) install<N + 1>(fn);
    }

    std::string name_ = "unnamed";
    Tower tower_;
    bool closed_form_ = false;
    int max_x_order_ = 2;
    int max_y_order_ = 5;
};

// ---------------------------------------------------------------------------
// built-in metric presets
// ---------------------------------------------------------------------------

inline MetricField euclidean_metric() {
    return MetricField::closed_form("euclidean", [](const auto& /*x*/, const auto& y) {
        return sqrt(y[0] * y[0] + y[1] * y[1]);
    });
}

// F = |y| + b.y with constant b, |b| < 1
inline MetricField randers_metric(double b1, double b2) {
    return MetricField::closed_form(
        "randers:" + std::to_string(b1) + "," + std::to_string(b2),
        [b1, b2](const auto& /*x*/, const auto& y) {
            return sqrt(y[0] * y[0] + y[1] * y[1]) + b1 * y[0] + b2 * y[1];
        });
}

// F = |y| + c*u2*y1, a position-dependent drift that is generically not
// compatible with any linear connection
inline MetricField randers_x_metric(double c) {
    return MetricField::closed_form(
        "randers-x:" + std::to_string(c), [c](const auto& x, const auto& y) {
            return sqrt(y[0] * y[0] + y[1] * y[1]) + (c * x[1]) * y[0];
        });
}

// Riemannian metric with constant anisotropic coefficients (test helper)
inline MetricField axis_ellipse_metric(double a, double b) {
    return MetricField::closed_form(
        "ellipse:" + std::to_string(a) + "," + std::to_string(b),
        [a, b](const auto& /*x*/, const auto& y) {
            return sqrt(a * a * y[0] * y[0] + b * b * y[1] * y[1]);
        });
}

// parses "euclidean", "randers:b1,b2", "randers-x:c", "ellipse:a,b";
// plane:* construction ids are resolved in plane.hpp
MetricField make_preset(const std::string& spec);

}  // namespace fsl

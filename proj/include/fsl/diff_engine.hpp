#pragma once

// Mixed partial derivatives of F and E = F^2/2 at a chart point and fiber
// vector, through one of two interchangeable engines:
//   dual — nested forward-mode dual numbers (closed-form metrics only)
//   fd   — nested central differences with one Richardson extrapolation

#include <array>
#include <functional>

#include "fsl/geometry.hpp"
#include "fsl/metric_field.hpp"
#include "fsl/series2.hpp"

namespace fsl {

// multi-index: orders in (u1, u2, y1, y2)
struct PartialIndex {
    int x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    int total() const { return x1 + x2 + y1 + y2; }
};

inline PartialIndex y_index(int a, int b) { return {0, 0, a, b}; }

class DiffEngine {
  public:
    enum class Kind { dual, fd };

    static DiffEngine dual_engine();
    static DiffEngine fd_engine();
    static DiffEngine for_metric(const MetricField& m);  // dual if closed-form else fd

    Kind kind() const { return kind_; }
    const char* kind_name() const { return kind_ == Kind::dual ? "dual" : "fd"; }

    // absolute tolerance scale the engine is expected to reach on smooth data
    double tol() const { return kind_ == Kind::dual ? 1e-8 : 1e-5; }

    double f_partial(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                     const PartialIndex& idx) const;
    double e_partial(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                     const PartialIndex& idx) const;

    // Taylor data of E in the fiber variables: all pure-y partials to degree deg,
    // and optionally the same table for dE/dx^m (xm = 0 or 1; xm = -1 for none)
    Series2 e_series_y(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                       int deg, int xm = -1) const;

    // FD step for a given total derivative order (fd engine)
    double step(int order) const { return steps_[std::min(order, 5)]; }
    void set_step(int order, double h) { steps_[std::min(order, 5)] = h; }

  private:
    explicit DiffEngine(Kind k) : kind_(k) {}

    Kind kind_;
    std::array<double, 6> steps_ = {0.0, 1e-3, 4e-3, 8e-3, 1.4e-2, 2.0e-2};
};

// ---------------------------------------------------------------------------
// generic directional finite differences on scalar fields (used for bracket
// tests, Wagner's equations and curvature stencils)
// ---------------------------------------------------------------------------

namespace fd {

// first derivative of field(t) at t=0 along dir, central + Richardson
template <class Field>
double directional(Field&& field, double h = 1e-3) {
    auto d = [&](double hh) { return (field(hh) - field(-hh)) / (2.0 * hh); };
    return (4.0 * d(h / 2) - d(h)) / 3.0;
}

}  // namespace fd

}  // namespace fsl

#pragma once

// Generalized Berwald structures on the Euclidean plane: a divergence-free
// 1-form with its potential, the rotation-valued parallel transport it
// induces, a convex seed indicatrix spread over the plane by transport, the
// resulting Finsler metric, and figure output for the trifocal family.
//
// Orientation convention: the transport phase is the negative of the
// potential along the curve, X(t) = r0 (cos(psi + psi0), -sin(psi + psi0))
// with psi = -f(c(t)); the parallel ODE below carries the matching signs and
// the translated indicatrix at p is the seed rotated by f(p) - f(origin).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fsl/geometry.hpp"
#include "fsl/metric_field.hpp"

namespace fsl {

struct ParametricCurve {
    std::function<Vec2(double)> pos;
    std::function<Vec2(double)> vel;
    std::vector<double> breaks;  // interior parameters where vel jumps (piecewise paths)

    static ParametricCurve radial();                        // (t, t)
    static ParametricCurve circle();                        // (cos t, sin t + 1)
    static ParametricCurve segment(const Vec2& a, const Vec2& b);  // t in [0,1]
    static ParametricCurve loop_circle(const Vec2& center, double r);  // t in [0,1], closed
    static ParametricCurve loop_square(const Vec2& center, double half_side);  // t in [0,1]
};

class OneFormField {
  public:
    OneFormField() = default;
    OneFormField(std::function<double(const Vec2&)> r1, std::function<double(const Vec2&)> r2,
                 std::optional<std::function<double(const Vec2&)>> pot = std::nullopt)
        : rho1_(std::move(r1)), rho2_(std::move(r2)), potential_(std::move(pot)) {}

    Vec2 operator()(const Vec2& p) const { return {rho1_(p), rho2_(p)}; }
    bool has_potential() const { return potential_.has_value(); }
    double potential_value(const Vec2& p) const { return (*potential_)(p); }

    static OneFormField rotational();  // u2 du1 - u1 du2 with f = -(u1^2 + u2^2)/2
    static OneFormField zero();

  private:
    std::function<double(const Vec2&)> rho1_, rho2_;
    std::optional<std::function<double(const Vec2&)>> potential_;
};

// scalar potential with rho_2 = df/du1 and rho_1 = -df/du2, f(origin) = 0;
// verifies the divergence-free precondition and two-path independence
std::function<double(const Vec2&)> potential(const OneFormField& rho, const Vec2& origin = {0, 0});

struct TransportResult {
    std::vector<double> t;
    std::vector<Vec2> ode;      // RK4 solution of the parallel equation
    std::vector<Vec2> closed;   // rotation closed form via the potential
    double max_mismatch = 0.0;  // max |ode - closed| over the grid
    double ode_norm_drift = 0.0;
    double closed_norm_drift = 0.0;
};

TransportResult transport(const OneFormField& rho, const ParametricCurve& c, const Vec2& X0,
                          const std::vector<double>& t_grid, double step = 1e-3);

// |X(1) - X(0)| after transporting around a closed loop
double holonomy_check(const OneFormField& rho, const ParametricCurve& loop, const Vec2& X0,
                      double step = 1e-3);

struct TranslatedIndicatrix;

class SeedIndicatrix {
  public:
    double phi(const Vec2& y) const { return phi_(y); }
    double gauge(const Vec2& y) const;  // F0(y): the unique s > 0 with phi(y/s) = 0
    double r_in() const { return r_in_; }
    double r_out() const { return r_out_; }

    struct ConvexityCertificate {
        bool convex = false;
        double total_turning = 0.0;   // should be 2 pi
        double min_cross = 0.0;       // min consecutive tangent cross product
    };
    ConvexityCertificate convexity_certificate(int n = 720) const;

    // boundary point along a direction (unit direction recommended)
    Vec2 boundary_point(const Vec2& dir) const { return scale(dir, 1.0 / gauge(dir)); }

    static SeedIndicatrix trifocal();
    static SeedIndicatrix circle(double r = 1.0);
    static SeedIndicatrix from_function(std::function<double(const Vec2&)> phi);

  private:
    std::function<double(const Vec2&)> phi_;
    double r_in_ = 0.0, r_out_ = 0.0;
    bool trifocal_ = false;
    friend struct TranslatedIndicatrix;
    friend TranslatedIndicatrix translated_indicatrix(const SeedIndicatrix&, const OneFormField&,
                                                      const Vec2&);
};

inline SeedIndicatrix trifocal_seed() { return SeedIndicatrix::trifocal(); }

struct TranslatedIndicatrix {
    double angle = 0.0;                       // rotation of the seed at p
    std::function<double(const Vec2&)> phi;   // implicit function in the fiber of p
    std::vector<Vec2> foci;                   // transported focal set (trifocal seeds)
};

TranslatedIndicatrix translated_indicatrix(const SeedIndicatrix& seed, const OneFormField& rho,
                                           const Vec2& p);

// the induced Finsler metric; black-box (FD differentiation engine required)
MetricField metric_from_field(const SeedIndicatrix& seed, const OneFormField& rho,
                              std::string name = "plane:custom");

struct FigureSpec {
    std::string out_dir = "figures";
    std::vector<double> radial_t = {0.0, 0.75, 1.5};
    std::vector<double> circle_t = {0.0, 0.6981317007977318, 1.3962634015954636,
                                    2.0943951023931953, 2.792526803190927, 3.490658503988659,
                                    4.1887902047863905, 4.886921905584122, 5.585053606381854};
    int boundary_samples = 720;
};

// one SVG per frame plus a combined CSV; returns the written paths
std::vector<std::string> render_figures(const SeedIndicatrix& seed, const OneFormField& rho,
                                        const FigureSpec& spec);

}  // namespace fsl

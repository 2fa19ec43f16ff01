#pragma once

// The indicatrix curve of a base point in its central affine arcwise
// parametrization: the integral curve of V0, with the main scalar and the
// source terms of the compatible-connection equations sampled along it, the
// induced measure, and the averaged Riemannian metric.

#include <string>
#include <vector>

#include "fsl/diff_engine.hpp"
#include "fsl/geometry.hpp"
#include "fsl/interp.hpp"
#include "fsl/metric_field.hpp"

namespace fsl {

struct TraceOptions {
    double step = 1e-3;        // RK4 step in the central affine parameter
    int samples = 256;         // uniform sample count over one period (even)
    double theta_max = 40.0;
    double closure_tol = 1e-6;
    bool want_spray = true;    // sample alpha_i, omega_i (needs spray jets)
};

struct IndicatrixTrace {
    ChartPoint base{};
    double period = 0.0;
    double closure_error = 0.0;

    std::vector<double> theta;   // N uniform samples in [0, period)
    std::vector<Vec2> c;         // curve points, F(p, c) = 1
    std::vector<Vec2> v0;        // V0 along the curve = c'
    std::vector<double> lam;     // main scalar samples (Wagner's A)
    std::vector<double> w;       // sqrt(g(V,V))
    std::vector<Mat2> g;         // Riemann-Finsler metric along the curve
    std::vector<Vec2> alpha;     // V0^j V0^k P_ijk
    std::vector<Vec2> omega;     // V0^j V0^k G^l_ijk g(V0, d/dy^l)
    std::vector<double> mu;      // induced measure density w.r.t. dtheta
    std::vector<double> phase;   // unwrapped polar angle of c (monotone)

    int size() const { return static_cast<int>(theta.size()); }

    Vec2 curve_at(double th) const;
    Vec2 tangent_at(double th) const;
    double lambda_at(double th) const;
    double w_at(double th) const;

    // central affine parameter of a fiber direction (v need not be normalized)
    double theta_of(const Vec2& v) const;

    void write_csv(const std::string& path) const;

  private:
    mutable bool interp_ready_ = false;
    mutable PeriodicCubic cx_, cy_, lam_i_, w_i_;
    void ensure_interp() const;
};

struct AveragedMetric {
    Mat2 gamma{};
};

struct SourceIntegrals {
    double period = 0.0;
    std::vector<double> theta;                    // N+1 nodes including the period end
    std::array<std::vector<double>, 2> beta;      // cumulative integrals of alpha_i
    std::array<std::vector<double>, 2> gamma_int; // cumulative integrals of omega_i

    double beta_at(int i, double t) const;
    double gamma_at(int i, double t) const;

  private:
    friend SourceIntegrals source_integrals(const IndicatrixTrace&);
    std::array<std::vector<double>, 2> alpha_nodes_, omega_nodes_;  // Hermite slopes
    double eval(const std::vector<double>& vals, const std::vector<double>& slopes, double t) const;
};

// direction / F(p, direction): the indicatrix point along `direction`
FiberVector seed_point(const MetricField& m, const ChartPoint& p, const FiberVector& direction);

IndicatrixTrace trace_indicatrix(const MetricField& m, const ChartPoint& p, const FiberVector& seed,
                                 const DiffEngine& d, const TraceOptions& opts = {});

// closed-curve Simpson quadrature of g against the induced measure
AveragedMetric averaged_metric(const IndicatrixTrace& trace);

// same quadrature on every stride-th sample (self-convergence checks)
AveragedMetric averaged_metric_subsampled(const IndicatrixTrace& trace, int stride);

SourceIntegrals source_integrals(const IndicatrixTrace& trace);

// independent polar-coordinate quadrature of the total induced mass
double polar_mass(const MetricField& m, const ChartPoint& p, const DiffEngine& d, int n = 720);

}  // namespace fsl

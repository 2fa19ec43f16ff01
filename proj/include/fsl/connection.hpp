#pragma once

// Compatible linear connections on the base: compatibility residuals, the
// intrinsic construction of the unique compatible connection from indicatrix
// data, semi-symmetric torsion decomposition, the Levi-Civita comparison of
// the averaged metric, Wagner's criterion, and the Landsberg/Berwald check.

#include <functional>
#include <memory>
#include <vector>

#include "fsl/diff_engine.hpp"
#include "fsl/geometry.hpp"
#include "fsl/indicatrix.hpp"
#include "fsl/metric_field.hpp"

namespace fsl {

using MatrixField = std::function<Mat2(const Vec2&)>;

struct LinearConnection {
    std::function<Ten3(const Vec2&)> coeff;  // Gamma[k][i][j](p), k upper index
    bool analytic = false;

    Ten3 operator()(const Vec2& p) const { return coeff(p); }

    // Gamma^k_ij = -rho_j d^k_i + d_ij rho^k with Euclidean index raising
    static LinearConnection semi_symmetric(std::function<Vec2(const Vec2&)> rho);
};

struct TorsionDecomposition {
    Ten3 torsion{};   // T^k_ij = Gamma^k_ij - Gamma^k_ji
    Vec2 rho{};       // rho_1 = T^2_12, rho_2 = -T^1_12
    double residual = 0.0;  // deviation of T from rho(X)Y - rho(Y)X (identically 0 in 2D)
};

enum class SolveOutcome { Solved, RiemannianCase, InconsistentConstants };

struct ConnectionSolve {
    SolveOutcome outcome = SolveOutcome::Solved;
    ChartPoint base{};
    Vec2 k{};                    // integration constants k_i(p)
    Vec2 k_spread{};             // spread of the 9 cross-validation estimates
    double k_threshold = 0.0;    // spread threshold used for the verdict
    double lambda_range = 0.0;
    double conic_residual = 0.0; // quadratic-curve fit residual (Riemannian case)
    std::shared_ptr<const IndicatrixTrace> trace;
    std::shared_ptr<const SourceIntegrals> src;
    PeriodicCubic f_interp[2];   // f_i along the trace

    // 1-homogeneous extension of f_i off the indicatrix
    double f_extension(int i, const MetricField& m, const Vec2& y) const;
    double f_on_trace(int i, double theta) const { return f_interp[i](theta); }
};

struct SolveOptions {
    double riemannian_tol = 1e-6;  // lambda-range below this declares constancy
    double spread_floor = 2e-4;    // the cross-validation agreement scale
};

struct BuiltConnection {
    Ten3 gamma{};
    double fiber_spread = 0.0;   // max component spread across reference fibers
    int fibers = 0;
};

struct BuildOptions {
    int fibers = 8;
    double fiber_tol = 5e-2;     // above this the metric is not generalized Berwald
    double fd_step = 2e-3;       // fiber step for the f_i derivatives
};

struct ComparisonReport {
    double eq02_residual = 0.0;         // nabla = nabla* - rho(Y)X + gamma(X,Y) rho#
    double metricality_residual = 0.0;  // |nabla gamma|
    Vec2 rho{};
};

struct WagnerOptions {
    int pde_fibers = 4;
    double riemannian_tol = 1e-6;
    double dir_step = 0.0;  // 0 = engine default
};

struct WagnerReport {
    bool riemannian = false;
    double lambda_range = 0.0;
    double scatter_residual = 0.0;
    double pde_residual = 0.0;
    int branches = 0;
};

enum class LandsbergVerdict { NotLandsberg, BerwaldConfirmed, Violation };

struct LandsbergReport {
    LandsbergVerdict verdict = LandsbergVerdict::NotLandsberg;
    double max_alpha = 0.0;
    double max_f = 0.0;
    double gamma_vs_canonical = 0.0;  // built Gamma against G^l_ij
};

// max over samples of |dF/dx^i - y^j Gamma^k_ij dF/dy^k|
double compatibility_residual(const MetricField& m, const LinearConnection& conn,
                              const std::vector<std::pair<ChartPoint, FiberVector>>& samples,
                              const DiffEngine& d);

ConnectionSolve solve_constants(std::shared_ptr<const IndicatrixTrace> trace,
                                std::shared_ptr<const SourceIntegrals> src,
                                const SolveOptions& opts = {});

BuiltConnection build_connection(const MetricField& m, const ChartPoint& p,
                                 const ConnectionSolve& solve, const DiffEngine& d,
                                 const BuildOptions& opts = {});

// full pipeline at one base point: trace -> sources -> constants -> coefficients
BuiltConnection construct_connection(const MetricField& m, const ChartPoint& p,
                                     const DiffEngine& d, const TraceOptions& topts = {},
                                     const BuildOptions& bopts = {});

// coefficient field on a grid with bicubic interpolation between nodes
LinearConnection connection_field_from_grid(const MetricField& m, const DiffEngine& d, double x0,
                                            double y0, double dx, double dy, int nx, int ny,
                                            const TraceOptions& topts = {},
                                            const BuildOptions& bopts = {});

TorsionDecomposition torsion_decompose(const LinearConnection& conn, const Vec2& p);

// averaged Riemannian metric as a field (one trace per evaluation)
MatrixField averaged_gamma_field(const MetricField& m, const DiffEngine& d,
                                 const TraceOptions& opts = {});

ComparisonReport levi_civita_compare(const MatrixField& gamma, const LinearConnection& conn,
                                     const Vec2& p, double fd_step = 1e-3,
                                     double metrical_tol = 1e-3, bool strict = false);

WagnerReport wagner_test(const MetricField& m, const std::vector<ChartPoint>& base_points,
                         const DiffEngine& d, const TraceOptions& topts = {},
                         const WagnerOptions& wopts = {});

// scatter pairs (A, dA/dtheta) pooled over base points, for CSV export
std::vector<std::array<double, 2>> wagner_scatter(const MetricField& m,
                                                  const std::vector<ChartPoint>& base_points,
                                                  const DiffEngine& d,
                                                  const TraceOptions& topts = {});

LandsbergReport landsberg_berwald_check(const MetricField& m, const ChartPoint& p,
                                        const DiffEngine& d, const TraceOptions& topts = {});

// least-squares conic fit residual of a point set (smallest singular direction)
double conic_fit_residual(const std::vector<Vec2>& pts);

}  // namespace fsl

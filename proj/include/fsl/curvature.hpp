#pragma once

// Gauss curvature of the averaged metric, the divergence of the torsion
// 1-form's dual, the curvature of a linear connection, and the divergence
// representation check kappa* = -div* rho#.

#include <functional>
#include <string>
#include <vector>

#include "fsl/connection.hpp"
#include "fsl/geometry.hpp"

namespace fsl {

using OneForm = std::function<Vec2(const Vec2&)>;

struct CurvatureReport {
    Vec2 p{};
    double kappa_star = 0.0;
    double div_rho_sharp = 0.0;
    double sum_residual = 0.0;        // |kappa* + div* rho#|
    double conn_curvature_norm = 0.0; // max component of R(X,Y)Z of the connection
};

struct RegionGrid {
    double x0 = -0.16, y0 = -0.16;
    double dx = 0.04, dy = 0.04;
    int nx = 9, ny = 9;
};

// Gauss curvature of a matrix field by Richardson-extrapolated central FD
double gauss_curvature(const MatrixField& gamma, const Vec2& p, double h = 2e-3);

// div* rho# in a Gram-Schmidt orthonormal frame built from the coordinate
// frame rotated by frame_angle (frame independence checked by varying it)
double divergence(const MatrixField& gamma, const OneForm& rho, const Vec2& p, double h = 1e-3,
                  double frame_angle = 0.0);

// R[l][k][i][j] = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
Ten4 connection_curvature(const LinearConnection& conn, const Vec2& p, double h = 1e-3);

// exterior derivative coefficient d(rho) = d_1 rho_2 - d_2 rho_1
double one_form_d(const OneForm& rho, const Vec2& p, double h = 1e-3);

// kappa* and div* rho# on an evaluation grid, with the gamma field sampled
// once on a shared half-pitch grid; rho is extracted from the connection's
// torsion at each point
std::vector<CurvatureReport> divergence_representation_check(const MatrixField& gamma,
                                                             const LinearConnection& conn,
                                                             const RegionGrid& grid);

std::vector<CurvatureReport> divergence_representation_check(const MetricField& m,
                                                             const LinearConnection& conn,
                                                             const DiffEngine& d,
                                                             const RegionGrid& grid,
                                                             const TraceOptions& topts = {});

void write_reports_csv(const std::vector<CurvatureReport>& reports, const std::string& path);

}  // namespace fsl

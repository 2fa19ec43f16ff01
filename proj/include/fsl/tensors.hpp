#pragma once

// Pointwise tensor apparatus of a Finsler surface at (p, v): the
// Riemann-Finsler metric, Cartan tensors, main scalar, geodesic spray jets
// and the Landsberg tensor.

#include <vector>

#include "fsl/diff_engine.hpp"
#include "fsl/geometry.hpp"
#include "fsl/metric_field.hpp"

namespace fsl {

struct MetricJet {
    double F = 0.0;
    double E = 0.0;
    Mat2 g{};              // g_ij = d^2 E / dy^i dy^j
    Mat2 g_inv{};
    double detg = 0.0;
    Ten3 cartan{};         // C_ijk = (1/2) d g_ij / dy^k, totally symmetric
    Vec2 cartan_trace{};   // C_i = g^jk C_ijk
    Vec2 l{};              // l_i = dF/dy^i
    Vec2 V{};              // (-dF/dy^2, dF/dy^1), tangent to the indicatrix
    Vec2 V0{};             // V normalized by sqrt(g(V,V))
    Vec2 C0{};             // y / F
    double main_scalar = 0.0;  // V0^j V0^k V0^l C_jkl
    double gVV = 0.0;          // g(V,V), equals det g
};

struct SprayJets {
    double F = 0.0;
    Mat2 g{}, g_inv{};
    Vec2 l{};
    Vec2 G{};      // geodesic spray coefficients G^l
    Mat2 Gi{};     // Gi[l][i]     = dG^l/dy^i
    Ten3 Gij{};    // Gij[l][i][j]
    Ten4 Gijk{};   // Gijk[l][i][j][k]; the mixed curvature is P^l_ijk = -G^l_ijk
    Ten3 landsberg_lowered{};  // P_ijk = (F/2) l_m G^m_ijk, totally symmetric
    Ten3 landsberg_mixed{};    // P^l_ij from (1/2) g^lm (X_i^h(g_jm) - G^k_ij g_km - G^k_im g_jk)

    // fiber coefficient of the horizontal section X_i^h on d/dy^l
    double horizontal_coeff(int i, int l) const { return -Gi[l][i]; }

    // the alternative Landsberg route -(F/2) l_m g^{kl} P^m_ijk
    Ten3 landsberg_from_jets() const;
};

struct ValidationReport {
    int samples = 0;
    double max_homogeneity_residual = 0.0;  // |F(p,tv) - t F(p,v)| over t in {1/2, 2}
    double min_value = 0.0;                 // min F over samples
    double min_hessian_eigenvalue = 0.0;    // min eig of d^2E/dy^2 over samples
    bool positive_definite() const { return min_hessian_eigenvalue > 0.0; }
    bool positive() const { return min_value > 0.0; }
};

struct CartanPermutationReport {
    double second_formula_residual = 0.0;   // [S0, V0] = -(1/F) V0^h on coordinate scalars
    double first_formula_contracted = 0.0;  // <[V0,V0^h] + S0/F + lam V0^h + S(lam) V0, dF>
    double v0F_residual = 0.0;              // |V0 F|
};

ValidationReport validate_metric(const MetricField& m,
                                 const std::vector<std::pair<ChartPoint, FiberVector>>& samples,
                                 const DiffEngine& d);

MetricJet metric_jet(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                     const DiffEngine& d);

SprayJets spray_jets(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                     const DiffEngine& d);

// spray data only up to first fiber derivatives (cheap path for frame fields)
struct SprayLinear {
    Vec2 G{};
    Mat2 Gi{};
};
SprayLinear spray_linear(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                         const DiffEngine& d);

// main scalar alone (cheap path)
double main_scalar(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                   const DiffEngine& d);

CartanPermutationReport bracket_check(const MetricField& m, const ChartPoint& p,
                                      const FiberVector& v, const DiffEngine& d);

}  // namespace fsl

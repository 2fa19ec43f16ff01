#include "fsl/tensors.hpp"

#include <cmath>

namespace fsl {

namespace {

void require_fiber(const FiberVector& v) {
    if (v.norm() < 1e-12) throw SingularMetric("fiber vector too close to the zero section");
}

}  // namespace

ValidationReport validate_metric(const MetricField& m,
                                 const std::vector<std::pair<ChartPoint, FiberVector>>& samples,
                                 const DiffEngine& d) {
    if (samples.empty()) throw std::invalid_argument("validate_metric: no samples");
    ValidationReport r;
    r.samples = static_cast<int>(samples.size());
    r.min_value = std::numeric_limits<double>::infinity();
    r.min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto& [p, v] : samples) {
        require_fiber(v);
        const double F = m.value(p, v);
        if (!std::isfinite(F))
            throw NonSmoothEvaluation("F is not finite at (" + std::to_string(p.u1) + "," +
                                      std::to_string(p.u2) + ")");
        r.min_value = std::min(r.min_value, F);
        for (double t : {0.5, 2.0}) {
            const double Ft = m.value(p, fiber(t * v.y1, t * v.y2));
            r.max_homogeneity_residual = std::max(r.max_homogeneity_residual, std::abs(Ft - t * F));
        }
        Mat2 hess;
        hess[0][0] = d.e_partial(m, p, v, y_index(2, 0));
        hess[0][1] = hess[1][0] = d.e_partial(m, p, v, y_index(1, 1));
        hess[1][1] = d.e_partial(m, p, v, y_index(0, 2));
        if (!std::isfinite(hess[0][0]) || !std::isfinite(hess[0][1]) || !std::isfinite(hess[1][1]))
            throw NonSmoothEvaluation("Hessian of E is not finite");
        r.min_hessian_eigenvalue = std::min(r.min_hessian_eigenvalue, sym_eigenvalues(hess)[0]);
    }
    return r;
}

MetricJet metric_jet(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                     const DiffEngine& d) {
    require_fiber(v);
    MetricJet j;
    j.F = m.value(p, v);
    j.E = 0.5 * j.F * j.F;
    j.l = {d.f_partial(m, p, v, y_index(1, 0)), d.f_partial(m, p, v, y_index(0, 1))};

    j.g[0][0] = d.e_partial(m, p, v, y_index(2, 0));
    j.g[0][1] = j.g[1][0] = d.e_partial(m, p, v, y_index(1, 1));
    j.g[1][1] = d.e_partial(m, p, v, y_index(0, 2));
    j.detg = det(j.g);
    if (!(j.detg > 0.0))
        throw SingularMetric("det g <= 0 at fiber (" + std::to_string(v.y1) + "," +
                             std::to_string(v.y2) + ") of metric " + m.name());
    j.g_inv = inverse(j.g);

    // C_ijk = (1/2) d^3 E / dy^i dy^j dy^k: depends only on the index multiset
    for (int i = 0; i < 2; ++i)
        for (int jj = 0; jj < 2; ++jj)
            for (int k = 0; k < 2; ++k) {
                const int ones = i + jj + k;
                j.cartan[i][jj][k] = 0.5 * d.e_partial(m, p, v, y_index(3 - ones, ones));
            }
    for (int i = 0; i < 2; ++i) {
        double s = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) s += j.g_inv[a][b] * j.cartan[i][a][b];
        j.cartan_trace[i] = s;
    }

    j.V = {-j.l[1], j.l[0]};
    j.gVV = quad_form(j.g, j.V, j.V);
    const double w = std::sqrt(j.gVV);
    j.V0 = scale(j.V, 1.0 / w);
    j.C0 = {v.y1 / j.F, v.y2 / j.F};

    double lam = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) lam += j.V0[a] * j.V0[b] * j.V0[c] * j.cartan[a][b][c];
    j.main_scalar = lam;
    return j;
}

double main_scalar(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                   const DiffEngine& d) {
    return metric_jet(m, p, v, d).main_scalar;
}

SprayLinear spray_linear(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                         const DiffEngine& d) {
    require_fiber(v);
    const int deg = 1;
    const Series2 SE = d.e_series_y(m, p, v, deg + 2);
    const Series2 SEx0 = d.e_series_y(m, p, v, deg + 1, 0);
    const Series2 SEx1 = d.e_series_y(m, p, v, deg + 1, 1);

    const Series2 g11 = SE.diff(0).diff(0), g12 = SE.diff(0).diff(1), g22 = SE.diff(1).diff(1);
    const Series2 dt = g11 * g22 - g12 * g12;
    const Series2 idt = dt.reciprocal();
    const Series2 gi11 = g22 * idt, gi22 = g11 * idt;
    const Series2 gi12s = g12 * idt * (-1.0);

    const Series2 yk0 = Series2::coordinate(0, v.y1, deg);
    const Series2 yk1 = Series2::coordinate(1, v.y2, deg);
    const Series2 A0 = yk0 * SEx0.diff(0) + yk1 * SEx1.diff(0) - SEx0;
    const Series2 A1 = yk0 * SEx0.diff(1) + yk1 * SEx1.diff(1) - SEx1;

    const Series2 G0 = 0.5 * (gi11 * A0 + gi12s * A1);
    const Series2 G1 = 0.5 * (gi12s * A0 + gi22 * A1);

    SprayLinear out;
    out.G = {G0.partial(0, 0), G1.partial(0, 0)};
    out.Gi[0][0] = G0.partial(1, 0);
    out.Gi[0][1] = G0.partial(0, 1);
    out.Gi[1][0] = G1.partial(1, 0);
    out.Gi[1][1] = G1.partial(0, 1);
    return out;
}

SprayJets spray_jets(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                     const DiffEngine& d) {
    require_fiber(v);
    const int deg = 3;  // fiber-Taylor degree of the spray coefficients
    const Series2 SE = d.e_series_y(m, p, v, deg + 2);
    const std::array<Series2, 2> SEx = {d.e_series_y(m, p, v, deg + 1, 0),
                                        d.e_series_y(m, p, v, deg + 1, 1)};

    const Series2 g11 = SE.diff(0).diff(0), g12 = SE.diff(0).diff(1), g22 = SE.diff(1).diff(1);
    const Series2 dt = g11 * g22 - g12 * g12;
    if (!(dt.at(0, 0) > 0.0)) throw SingularMetric("det g <= 0 in spray_jets of " + m.name());
    const Series2 idt = dt.reciprocal();
    const Series2 gi[2][2] = {{g22 * idt, (-1.0) * (g12 * idt)},
                              {(-1.0) * (g12 * idt), g11 * idt}};

    const Series2 yk[2] = {Series2::coordinate(0, v.y1, deg),
                           Series2::coordinate(1, v.y2, deg)};
    Series2 A[2] = {Series2(deg), Series2(deg)};
    for (int mm = 0; mm < 2; ++mm)
        A[mm] = yk[0] * SEx[0].diff(mm) + yk[1] * SEx[1].diff(mm) - SEx[mm];

    Series2 Gs[2] = {Series2(deg), Series2(deg)};
    for (int l = 0; l < 2; ++l) Gs[l] = 0.5 * (gi[l][0] * A[0] + gi[l][1] * A[1]);

    SprayJets out;
    out.F = m.value(p, v);
    out.g[0][0] = g11.at(0, 0);
    out.g[0][1] = out.g[1][0] = g12.at(0, 0);
    out.g[1][1] = g22.at(0, 0);
    out.g_inv = inverse(out.g);
    out.l = {d.f_partial(m, p, v, y_index(1, 0)), d.f_partial(m, p, v, y_index(0, 1))};

    auto ycount = [](std::initializer_list<int> idx) {
        int a = 0, b = 0;
        for (int i : idx) (i == 0 ? a : b)++;
        return std::pair<int, int>{a, b};
    };
    for (int l = 0; l < 2; ++l) {
        out.G[l] = Gs[l].partial(0, 0);
        for (int i = 0; i < 2; ++i) {
            auto [a1, b1] = ycount({i});
            out.Gi[l][i] = Gs[l].partial(a1, b1);
            for (int jj = 0; jj < 2; ++jj) {
                auto [a2, b2] = ycount({i, jj});
                out.Gij[l][i][jj] = Gs[l].partial(a2, b2);
                for (int k = 0; k < 2; ++k) {
                    auto [a3, b3] = ycount({i, jj, k});
                    out.Gijk[l][i][jj][k] = Gs[l].partial(a3, b3);
                }
            }
        }
    }

    // lowered Landsberg tensor, totally symmetric
    for (int i = 0; i < 2; ++i)
        for (int jj = 0; jj < 2; ++jj)
            for (int k = 0; k < 2; ++k) {
                double s = 0.0;
                for (int mm = 0; mm < 2; ++mm) s += out.l[mm] * out.Gijk[mm][i][jj][k];
                out.landsberg_lowered[i][jj][k] = 0.5 * out.F * s;
            }

    // mixed Landsberg tensor from the horizontal derivative of g
    for (int l = 0; l < 2; ++l)
        for (int i = 0; i < 2; ++i)
            for (int jj = 0; jj < 2; ++jj) {
                double s = 0.0;
                for (int mm = 0; mm < 2; ++mm) {
                    // X_i^h(g_jm) = d g_jm/dx^i - G^r_i d g_jm/dy^r
                    auto [aj, bj] = ycount({jj, mm});
                    double xh = SEx[i].partial(aj, bj);
                    for (int r = 0; r < 2; ++r) {
                        auto [a3, b3] = ycount({jj, mm, r});
                        xh -= out.Gi[r][i] * SE.partial(a3, b3);
                    }
                    double t = xh;
                    for (int k = 0; k < 2; ++k)
                        t -= out.Gij[k][i][jj] * out.g[k][mm] + out.Gij[k][i][mm] * out.g[jj][k];
                    s += out.g_inv[l][mm] * t;
                }
                out.landsberg_mixed[l][i][jj] = 0.5 * s;
            }
    return out;
}

Ten3 SprayJets::landsberg_from_jets() const {
    Ten3 r{};
    for (int lo = 0; lo < 2; ++lo)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double s = 0.0;
                for (int k = 0; k < 2; ++k)
                    for (int mm = 0; mm < 2; ++mm) s += l[mm] * g_inv[k][lo] * (-Gijk[mm][i][j][k]);
                r[lo][i][j] = -0.5 * F * s;
            }
    return r;
}

namespace {

// scalar fields on TM used by the bracket check, all engine-evaluated
struct FrameFields {
    const MetricField& m;
    const DiffEngine& d;

    Vec2 V0(const Vec2& x, const Vec2& y) const {
        const MetricJet j = metric_jet(m, {x[0], x[1]}, {y[0], y[1]}, d);
        return j.V0;
    }
    Mat2 Gi(const Vec2& x, const Vec2& y) const {
        return spray_linear(m, {x[0], x[1]}, {y[0], y[1]}, d).Gi;
    }
    double F(const Vec2& x, const Vec2& y) const { return m.value(x, y); }
    double lambda(const Vec2& x, const Vec2& y) const {
        return metric_jet(m, {x[0], x[1]}, {y[0], y[1]}, d).main_scalar;
    }
    double XhF(int i, const Vec2& x, const Vec2& y) const {
        const Mat2 gi = Gi(x, y);
        PartialIndex dx{i == 0 ? 1 : 0, i == 1 ? 1 : 0, 0, 0};
        double s = d.f_partial(m, {x[0], x[1]}, {y[0], y[1]}, dx);
        for (int l = 0; l < 2; ++l)
            s -= gi[l][i] * d.f_partial(m, {x[0], x[1]}, {y[0], y[1]}, y_index(l == 0 ? 1 : 0, l == 1 ? 1 : 0));
        return s;
    }
    double V0F(const Vec2& x, const Vec2& y) const {
        const Vec2 v0 = V0(x, y);
        double s = 0.0;
        for (int k = 0; k < 2; ++k)
            s += v0[k] * d.f_partial(m, {x[0], x[1]}, {y[0], y[1]}, y_index(k == 0 ? 1 : 0, k == 1 ? 1 : 0));
        return s;
    }

    // directional derivative of a field along a TM direction, with field re-evaluation
    template <class Field>
    double deriv(Field&& f, const Vec2& x, const Vec2& y, const Vec2& dx, const Vec2& dy,
                 double h) const {
        return fd::directional(
            [&](double t) { return f(add(x, scale(dx, t)), add(y, scale(dy, t))); }, h);
    }
};

}  // namespace

CartanPermutationReport bracket_check(const MetricField& m, const ChartPoint& p,
                                      const FiberVector& v, const DiffEngine& d) {
    require_fiber(v);
    CartanPermutationReport rep;
    const FrameFields ff{m, d};
    const Vec2 x{p.u1, p.u2}, y{v.y1, v.y2};
    const double h = d.kind() == DiffEngine::Kind::dual ? 1e-4 : 2e-3;

    const double F0 = ff.F(x, y);
    const Vec2 v00 = ff.V0(x, y);
    const Mat2 gi0 = ff.Gi(x, y);
    const Vec2 s_dx{y[0] / F0, y[1] / F0};
    Vec2 s_dy{0, 0};
    for (int l = 0; l < 2; ++l) s_dy[l] = -(y[0] * gi0[l][0] + y[1] * gi0[l][1]) / F0;

    // [S0, V0] phi = -(1/F) V0^h phi for phi in {x^1, x^2, y^1, y^2}
    for (int i = 0; i < 2; ++i) {
        // phi = x^i: V0 phi = 0, S0 phi = y^i/F
        const double lhs = -ff.deriv(
            [&](const Vec2& xx, const Vec2& yy) { return yy[i] / ff.F(xx, yy); }, x, y,
            {0, 0}, v00, h);
        const double rhs = -v00[i] / F0;
        rep.second_formula_residual = std::max(rep.second_formula_residual, std::abs(lhs - rhs));
    }
    for (int k = 0; k < 2; ++k) {
        // phi = y^k: V0 phi = V0^k (field), S0 phi = -(y^i G^k_i)/F (field)
        const double t1 = ff.deriv(
            [&](const Vec2& xx, const Vec2& yy) { return ff.V0(xx, yy)[k]; }, x, y, s_dx, s_dy, h);
        const double t2 = ff.deriv(
            [&](const Vec2& xx, const Vec2& yy) {
                const Mat2 gg = ff.Gi(xx, yy);
                return -(yy[0] * gg[k][0] + yy[1] * gg[k][1]) / ff.F(xx, yy);
            },
            x, y, {0, 0}, v00, h);
        const double lhs = t1 - t2;
        const double rhs = (v00[0] * gi0[k][0] + v00[1] * gi0[k][1]) / F0;
        rep.second_formula_residual = std::max(rep.second_formula_residual, std::abs(lhs - rhs));
    }

    // contracted first formula applied to F itself
    {
        Vec2 h_dx = v00, h_dy{0, 0};
        for (int l = 0; l < 2; ++l) h_dy[l] = -(v00[0] * gi0[l][0] + v00[1] * gi0[l][1]);
        auto v0hF = [&](const Vec2& xx, const Vec2& yy) {
            const Vec2 w = ff.V0(xx, yy);
            double s = 0.0;
            for (int i = 0; i < 2; ++i) s += w[i] * ff.XhF(i, xx, yy);
            return s;
        };
        auto v0F = [&](const Vec2& xx, const Vec2& yy) { return ff.V0F(xx, yy); };
        const double term_bracket = ff.deriv(v0hF, x, y, {0, 0}, v00, h) -
                                    ff.deriv(v0F, x, y, h_dx, h_dy, h);
        double s0F = 0.0;
        for (int i = 0; i < 2; ++i) s0F += y[i] / F0 * ff.XhF(i, x, y);
        const double lam = ff.lambda(x, y);
        const double Slam =
            F0 * ff.deriv([&](const Vec2& xx, const Vec2& yy) { return ff.lambda(xx, yy); }, x, y,
                          s_dx, s_dy, h);
        rep.first_formula_contracted =
            std::abs(term_bracket + s0F / F0 + lam * v0hF(x, y) + Slam * ff.V0F(x, y));
        rep.v0F_residual = std::abs(ff.V0F(x, y));
    }
    return rep;
}

}  // namespace fsl

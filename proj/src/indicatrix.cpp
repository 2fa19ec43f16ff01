#include "fsl/indicatrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fsl/tensors.hpp"

namespace fsl {

namespace {

Vec2 v0_rhs(const MetricField& m, const ChartPoint& p, const Vec2& y, const DiffEngine& d) {
    const double l1 = d.f_partial(m, p, {y[0], y[1]}, y_index(1, 0));
    const double l2 = d.f_partial(m, p, {y[0], y[1]}, y_index(0, 1));
    Mat2 g;
    g[0][0] = d.e_partial(m, p, {y[0], y[1]}, y_index(2, 0));
    g[0][1] = g[1][0] = d.e_partial(m, p, {y[0], y[1]}, y_index(1, 1));
    g[1][1] = d.e_partial(m, p, {y[0], y[1]}, y_index(0, 2));
    const Vec2 V{-l2, l1};
    const double gvv = quad_form(g, V, V);
    if (!(gvv > 0.0)) throw SingularMetric("g(V,V) <= 0 along indicatrix of " + m.name());
    return scale(V, 1.0 / std::sqrt(gvv));
}

Vec2 rk4_step(const MetricField& m, const ChartPoint& p, const Vec2& y, double h,
              const DiffEngine& d) {
    const Vec2 k1 = v0_rhs(m, p, y, d);
    const Vec2 k2 = v0_rhs(m, p, add(y, scale(k1, h / 2)), d);
    const Vec2 k3 = v0_rhs(m, p, add(y, scale(k2, h / 2)), d);
    const Vec2 k4 = v0_rhs(m, p, add(y, scale(k3, h)), d);
    return add(y, scale(add(add(k1, scale(add(k2, k3), 2.0)), k4), h / 6));
}

}  // namespace

FiberVector seed_point(const MetricField& m, const ChartPoint& p, const FiberVector& direction) {
    if (direction.norm() < 1e-12) throw SingularMetric("seed_point: zero direction");
    const double F = m.value(p, direction);
    if (!(F > 0.0)) throw SingularMetric("seed_point: F <= 0 along direction");
    return {direction.y1 / F, direction.y2 / F};
}

IndicatrixTrace trace_indicatrix(const MetricField& m, const ChartPoint& p, const FiberVector& seed,
                                 const DiffEngine& d, const TraceOptions& opts) {
    const Vec2 y0{seed.y1, seed.y2};
    const double h = opts.step;

    // phase 1: locate the period
    Vec2 y = y0;
    double th = 0.0;
    const Vec2 tangent0 = v0_rhs(m, p, y0, d);
    const double capture = 3.0 * h * std::max(1.0, norm(tangent0));
    while (true) {
        y = rk4_step(m, p, y, h, d);
        th += h;
        if (th > 1.0 && norm(sub(y, y0)) < capture) break;
        if (th > opts.theta_max)
            throw NoClosure("indicatrix trace failed to close within theta_max for " + m.name());
    }
    for (int it = 0; it < 3; ++it) {  // Newton refinement on the return section
        const double gval = dot(sub(y, y0), tangent0);
        const double dg = dot(v0_rhs(m, p, y, d), tangent0);
        const double dt = -gval / dg;
        y = rk4_step(m, p, y, dt, d);
        th += dt;
    }
    const double period = th;
    const double closure = norm(sub(y, y0));
    if (closure > opts.closure_tol)
        throw NoClosure("closure error " + std::to_string(closure) + " exceeds tolerance");

    // phase 2: resample on a uniform grid
    const int N = opts.samples;
    const int ups = std::max(1, static_cast<int>(std::ceil(period / (N * h))));
    const double hh = period / (N * ups);

    IndicatrixTrace tr;
    tr.base = p;
    tr.period = period;
    tr.closure_error = closure;
    tr.theta.resize(N);
    tr.c.resize(N);
    tr.v0.resize(N);
    tr.lam.resize(N);
    tr.w.resize(N);
    tr.g.resize(N);
    tr.mu.resize(N);
    tr.phase.resize(N);
    if (opts.want_spray) {
        tr.alpha.resize(N);
        tr.omega.resize(N);
    }

    y = y0;
    double prev_phase = std::atan2(y0[1], y0[0]);
    double unwrapped = prev_phase;
    for (int k = 0; k < N; ++k) {
        tr.theta[k] = k * period / N;
        tr.c[k] = y;

        const MetricJet j = metric_jet(m, p, {y[0], y[1]}, d);
        tr.v0[k] = j.V0;
        tr.lam[k] = j.main_scalar;
        tr.w[k] = std::sqrt(j.gVV);
        tr.g[k] = j.g;
        // induced measure on the trace tangent: sqrt(det g) (y^1 V0^2 - y^2 V0^1)/F
        tr.mu[k] = std::sqrt(j.detg) * (y[0] * j.V0[1] - y[1] * j.V0[0]) / j.F;

        double ph = std::atan2(y[1], y[0]);
        while (ph < prev_phase - 1e-9) ph += 2.0 * M_PI;
        unwrapped += ph - (k == 0 ? ph : prev_phase);
        prev_phase = ph;
        tr.phase[k] = unwrapped;

        if (opts.want_spray) {
            const SprayJets s = spray_jets(m, p, {y[0], y[1]}, d);
            for (int i = 0; i < 2; ++i) {
                double a = 0.0, o = 0.0;
                for (int jj = 0; jj < 2; ++jj)
                    for (int kk = 0; kk < 2; ++kk) {
                        a += j.V0[jj] * j.V0[kk] * s.landsberg_lowered[i][jj][kk];
                        for (int l = 0; l < 2; ++l)
                            o += j.V0[jj] * j.V0[kk] * s.Gijk[l][i][jj][kk] *
                                 (j.g[l][0] * j.V0[0] + j.g[l][1] * j.V0[1]);
                    }
                tr.alpha[k][i] = a;
                tr.omega[k][i] = o;
            }
        }

        for (int s = 0; s < ups; ++s) y = rk4_step(m, p, y, hh, d);
    }
    return tr;
}

void IndicatrixTrace::ensure_interp() const {
    if (interp_ready_) return;
    const int N = size();
    std::vector<double> cx(N), cy(N), sx(N), sy(N);
    for (int k = 0; k < N; ++k) {
        cx[k] = c[k][0];
        cy[k] = c[k][1];
        sx[k] = v0[k][0];
        sy[k] = v0[k][1];
    }
    cx_ = PeriodicCubic(std::move(cx), std::move(sx), period);
    cy_ = PeriodicCubic(std::move(cy), std::move(sy), period);
    lam_i_ = PeriodicCubic::from_samples(lam, period);
    w_i_ = PeriodicCubic::from_samples(w, period);
    interp_ready_ = true;
}

Vec2 IndicatrixTrace::curve_at(double th) const {
    ensure_interp();
    return {cx_(th), cy_(th)};
}

Vec2 IndicatrixTrace::tangent_at(double th) const {
    ensure_interp();
    return {cx_.derivative(th), cy_.derivative(th)};
}

double IndicatrixTrace::lambda_at(double th) const {
    ensure_interp();
    return lam_i_(th);
}

double IndicatrixTrace::w_at(double th) const {
    ensure_interp();
    return w_i_(th);
}

double IndicatrixTrace::theta_of(const Vec2& v) const {
    ensure_interp();
    const int N = size();
    double target = std::atan2(v[1], v[0]);
    // lift into [phase[0], phase[0] + 2 pi)
    while (target < phase[0]) target += 2.0 * M_PI;
    while (target >= phase[0] + 2.0 * M_PI) target -= 2.0 * M_PI;
    int lo = 0, hi = N;  // phase[] is strictly increasing for a convex indicatrix
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (phase[mid] <= target) lo = mid;
        else hi = mid;
    }
    const double ph_lo = phase[lo];
    const double ph_hi = (lo + 1 < N) ? phase[lo + 1] : phase[0] + 2.0 * M_PI;
    const double frac = (target - ph_lo) / std::max(1e-300, ph_hi - ph_lo);
    double th = (lo + frac) * period / N;
    for (int it = 0; it < 4; ++it) {  // Newton on cross(c(th), v) = 0
        const Vec2 cc = curve_at(th);
        const Vec2 tt = tangent_at(th);
        const double f = cross(cc, v);
        const double df = cross(tt, v);
        if (std::abs(df) < 1e-14) break;
        th -= f / df;
    }
    double r = std::fmod(th, period);
    if (r < 0) r += period;
    return r;
}

void IndicatrixTrace::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "theta,y1,y2,lambda,w,alpha1,alpha2,omega1,omega2,mu\n";
    char buf[360];
    for (int k = 0; k < size(); ++k) {
        const double a1 = alpha.empty() ? 0.0 : alpha[k][0];
        const double a2 = alpha.empty() ? 0.0 : alpha[k][1];
        const double o1 = omega.empty() ? 0.0 : omega[k][0];
        const double o2 = omega.empty() ? 0.0 : omega[k][1];
        std::snprintf(buf, sizeof(buf),
                      "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", theta[k],
                      c[k][0], c[k][1], lam[k], w[k], a1, a2, o1, o2, mu[k]);
        out << buf;
    }
}

AveragedMetric averaged_metric_subsampled(const IndicatrixTrace& trace, int stride) {
    const int N = trace.size();
    if (N % stride != 0) throw std::invalid_argument("subsample stride must divide sample count");
    const int M = N / stride;
    if (M % 2 != 0) throw std::invalid_argument("Simpson quadrature needs an even sample count");
    if (!(trace.period > 0.0)) throw NoClosure("averaged_metric: trace has no period");
    const double h = trace.period / M;
    Mat2 acc{};
    for (int k = 0; k < M; ++k) {
        // closed-curve composite Simpson: endpoints wrap onto sample 0
        const double wq = (k % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
        const int idx = k * stride;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) acc[i][j] += wq * trace.g[idx][i][j] * trace.mu[idx];
    }
    if (!(det(acc) > 0.0) || !(acc[0][0] > 0.0))
        throw SingularMetric("averaged metric is not positive definite");
    return {acc};
}

AveragedMetric averaged_metric(const IndicatrixTrace& trace) {
    return averaged_metric_subsampled(trace, 1);
}

SourceIntegrals source_integrals(const IndicatrixTrace& trace) {
    if (trace.alpha.empty())
        throw std::invalid_argument("source_integrals: trace was built without spray sampling");
    const int N = trace.size();
    SourceIntegrals s;
    s.period = trace.period;
    s.theta.resize(N + 1);
    for (int k = 0; k <= N; ++k) s.theta[k] = k * trace.period / N;
    const double h = trace.period / N;
    // endpoint-corrected trapezoid: the h^2/12 slope term lifts the cumulative
    // sums to O(h^4), slopes from 4th-order periodic central differences
    auto slopes = [&](const std::vector<double>& f) {
        std::vector<double> out(N + 1);
        for (int k = 0; k <= N; ++k) {
            const double fp1 = f[(k + 1) % N], fm1 = f[(k - 1 + N) % N];
            const double fp2 = f[(k + 2) % N], fm2 = f[(k - 2 + N) % N];
            out[k] = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
        }
        return out;
    };
    for (int i = 0; i < 2; ++i) {
        s.beta[i].assign(N + 1, 0.0);
        s.gamma_int[i].assign(N + 1, 0.0);
        s.alpha_nodes_[i].resize(N + 1);
        s.omega_nodes_[i].resize(N + 1);
        for (int k = 0; k <= N; ++k) {
            s.alpha_nodes_[i][k] = trace.alpha[k % N][i];
            s.omega_nodes_[i][k] = trace.omega[k % N][i];
        }
        std::vector<double> raw_a(N + 1), raw_o(N + 1);
        for (int k = 0; k <= N; ++k) {
            raw_a[k] = s.alpha_nodes_[i][k];
            raw_o[k] = s.omega_nodes_[i][k];
        }
        const std::vector<double> da = slopes(raw_a), dm = slopes(raw_o);
        for (int k = 1; k <= N; ++k) {
            s.beta[i][k] = s.beta[i][k - 1] + 0.5 * h * (raw_a[k - 1] + raw_a[k]) +
                           h * h / 12.0 * (da[k - 1] - da[k]);
            s.gamma_int[i][k] = s.gamma_int[i][k - 1] + 0.5 * h * (raw_o[k - 1] + raw_o[k]) +
                                h * h / 12.0 * (dm[k - 1] - dm[k]);
        }
    }
    return s;
}

double SourceIntegrals::eval(const std::vector<double>& vals, const std::vector<double>& slopes,
                             double t) const {
    const int N = static_cast<int>(vals.size()) - 1;
    const double h = period / N;
    double u = std::fmod(t, period);
    if (u < 0) u += period;
    int k = std::min(N - 1, static_cast<int>(u / h));
    const double x = (u - k * h) / h;
    const double h00 = (1 + 2 * x) * (1 - x) * (1 - x);
    const double h10 = x * (1 - x) * (1 - x);
    const double h01 = x * x * (3 - 2 * x);
    const double h11 = x * x * (x - 1);
    return h00 * vals[k] + h10 * h * slopes[k] + h01 * vals[k + 1] + h11 * h * slopes[k + 1];
}

double SourceIntegrals::beta_at(int i, double t) const {
    double base = 0.0;
    if (t >= period || t < 0) {  // extend by the full-period increment
        const double cycles = std::floor(t / period);
        base = cycles * beta[i].back();
        t -= cycles * period;
    }
    return base + eval(beta[i], alpha_nodes_[i], t);
}

double SourceIntegrals::gamma_at(int i, double t) const {
    double base = 0.0;
    if (t >= period || t < 0) {
        const double cycles = std::floor(t / period);
        base = cycles * gamma_int[i].back();
        t -= cycles * period;
    }
    return base + eval(gamma_int[i], omega_nodes_[i], t);
}

double polar_mass(const MetricField& m, const ChartPoint& p, const DiffEngine& d, int n) {
    // total induced mass by polar-angle quadrature: integral of sqrt(det g) r^2 dphi
    double acc = 0.0;
    const double h = 2.0 * M_PI / n;
    for (int k = 0; k < n; ++k) {
        const double phi = k * h;
        const Vec2 dir{std::cos(phi), std::sin(phi)};
        const double F = m.value(p, {dir[0], dir[1]});
        const double r = 1.0 / F;
        const Vec2 y{r * dir[0], r * dir[1]};
        Mat2 g;
        g[0][0] = d.e_partial(m, p, {y[0], y[1]}, y_index(2, 0));
        g[0][1] = g[1][0] = d.e_partial(m, p, {y[0], y[1]}, y_index(1, 1));
        g[1][1] = d.e_partial(m, p, {y[0], y[1]}, y_index(0, 2));
        acc += std::sqrt(det(g)) * r * r * h;
    }
    return acc;
}

}  // namespace fsl

#include "fsl/plane.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace fsl {

namespace {

// 16-node Gauss-Legendre rule on [-1, 1]
constexpr double kGlNodes[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeights[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                  0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                  0.0622535239386479, 0.0271524594117541};

double gl_segment(const std::function<double(double)>& f, double a, double b) {
    const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a))));
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double pa = a + (b - a) * p / panels;
        const double pb = a + (b - a) * (p + 1) / panels;
        const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
        for (int k = 0; k < 8; ++k)
            acc += half * kGlWeights[k] * (f(mid + half * kGlNodes[k]) + f(mid - half * kGlNodes[k]));
    }
    return acc;
}

double line_integral_f(const OneFormField& rho, const Vec2& origin, const Vec2& p, bool x_first) {
    // f with rho_2 = df/du1, rho_1 = -df/du2 along a two-segment axis path
    if (x_first) {
        const double ix = gl_segment(
            [&](double t) { return rho(Vec2{t, origin[1]})[1]; }, origin[0], p[0]);
        const double iy = gl_segment(
            [&](double t) { return -rho(Vec2{p[0], t})[0]; }, origin[1], p[1]);
        return ix + iy;
    }
    const double iy = gl_segment(
        [&](double t) { return -rho(Vec2{origin[0], t})[0]; }, origin[1], p[1]);
    const double ix = gl_segment(
        [&](double t) { return rho(Vec2{t, p[1]})[1]; }, origin[0], p[0]);
    return iy + ix;
}

void check_divergence_free(const OneFormField& rho, const Vec2& origin) {
    const double h = 1e-4;
    for (double x = -1.5; x <= 1.51; x += 0.75)
        for (double y = -1.5; y <= 1.51; y += 0.75) {
            const Vec2 p{origin[0] + x, origin[1] + y};
            auto d = [&](int dir, int comp, double hh) {
                Vec2 pp = p, pm = p;
                pp[dir] += hh;
                pm[dir] -= hh;
                return (rho(pp)[comp] - rho(pm)[comp]) / (2 * hh);
            };
            const double div = (4 * d(0, 0, h / 2) - d(0, 0, h)) / 3.0 +
                               (4 * d(1, 1, h / 2) - d(1, 1, h)) / 3.0;
            if (std::abs(div) > 1e-8)
                throw NotDivergenceFree("div rho# = " + std::to_string(div) + " at (" +
                                        std::to_string(p[0]) + "," + std::to_string(p[1]) + ")");
        }
}

}  // namespace

ParametricCurve ParametricCurve::radial() {
    return {[](double t) { return Vec2{t, t}; }, [](double) { return Vec2{1.0, 1.0}; }};
}

ParametricCurve ParametricCurve::circle() {
    return {[](double t) { return Vec2{std::cos(t), std::sin(t) + 1.0}; },
            [](double t) { return Vec2{-std::sin(t), std::cos(t)}; }};
}

ParametricCurve ParametricCurve::segment(const Vec2& a, const Vec2& b) {
    return {[a, b](double t) { return add(a, scale(sub(b, a), t)); },
            [a, b](double) { return sub(b, a); }};
}

ParametricCurve ParametricCurve::loop_circle(const Vec2& c, double r) {
    return {[c, r](double t) {
                return Vec2{c[0] + r * std::cos(2 * M_PI * t), c[1] + r * std::sin(2 * M_PI * t)};
            },
            [c, r](double t) {
                return Vec2{-2 * M_PI * r * std::sin(2 * M_PI * t),
                            2 * M_PI * r * std::cos(2 * M_PI * t)};
            }};
}

ParametricCurve ParametricCurve::loop_square(const Vec2& c, double a) {
    auto corner = [c, a](int k) {
        static const int sx[4] = {1, -1, -1, 1}, sy[4] = {1, 1, -1, -1};
        return Vec2{c[0] + a * sx[k & 3], c[1] + a * sy[k & 3]};
    };
    return {[corner](double t) {
                const double u = t * 4.0;
                const int k = std::min(3, static_cast<int>(u));
                const double s = u - k;
                return add(corner(k), scale(sub(corner(k + 1), corner(k)), s));
            },
            [corner](double t) {
                const double u = t * 4.0;
                const int k = std::min(3, static_cast<int>(u));
                return scale(sub(corner(k + 1), corner(k)), 4.0);
            },
            {0.25, 0.5, 0.75}};
}

OneFormField OneFormField::rotational() {
    return OneFormField([](const Vec2& p) { return p[1]; }, [](const Vec2& p) { return -p[0]; },
                        [](const Vec2& p) { return -0.5 * (p[0] * p[0] + p[1] * p[1]); });
}

OneFormField OneFormField::zero() {
    return OneFormField([](const Vec2&) { return 0.0; }, [](const Vec2&) { return 0.0; },
                        [](const Vec2&) { return 0.0; });
}

std::function<double(const Vec2&)> potential(const OneFormField& rho, const Vec2& origin) {
    check_divergence_free(rho, origin);
    // two-path discrepancy on a checkpoint grid
    for (double x = -1.5; x <= 1.51; x += 1.5)
        for (double y = -1.5; y <= 1.51; y += 1.5) {
            const Vec2 p{origin[0] + x, origin[1] + y};
            const double f1 = line_integral_f(rho, origin, p, true);
            const double f2 = line_integral_f(rho, origin, p, false);
            if (std::abs(f1 - f2) > 1e-6)
                throw NotDivergenceFree("potential paths disagree by " + std::to_string(f1 - f2));
        }
    if (rho.has_potential()) {
        // trust but verify the closed form against quadrature
        const double off = rho.potential_value(origin);
        for (double x = -1.0; x <= 1.01; x += 1.0)
            for (double y = -1.0; y <= 1.01; y += 1.0) {
                const Vec2 p{origin[0] + x, origin[1] + y};
                const double fq = line_integral_f(rho, origin, p, true);
                if (std::abs(rho.potential_value(p) - off - fq) > 1e-8)
                    throw NotDivergenceFree("declared potential disagrees with quadrature");
            }
        return [rho, off](const Vec2& p) { return rho.potential_value(p) - off; };
    }
    return [rho, origin](const Vec2& p) { return line_integral_f(rho, origin, p, true); };
}

namespace {

// advance the parallel ODE from t0 to t1; integration never steps across a
// velocity break of the curve
Vec2 advance_transport(const OneFormField& rho, const ParametricCurve& c, Vec2 X, double t0,
                       double t1, double step) {
    std::vector<double> stops{t0};
    for (double b : c.breaks)
        if (b > t0 + 1e-15 && b < t1 - 1e-15) stops.push_back(b);
    stops.push_back(t1);
    for (size_t s = 0; s + 1 < stops.size(); ++s) {
        const double lo = stops[s], hi = stops[s + 1];
        auto rhs = [&](double t, const Vec2& Xv) {
            const Vec2 q = c.pos(t);
            const Vec2 v = c.vel(std::min(std::max(t, lo + 1e-12), hi - 1e-12));
            const Vec2 r = rho(q);
            const double w = v[0] * r[1] - v[1] * r[0];  // (f o c)'
            return Vec2{-w * Xv[1], w * Xv[0]};
        };
        double t = lo;
        while (t < hi - 1e-15) {
            const double h = std::min(step, hi - t);
            const Vec2 k1 = rhs(t, X);
            const Vec2 k2 = rhs(t + h / 2, add(X, scale(k1, h / 2)));
            const Vec2 k3 = rhs(t + h / 2, add(X, scale(k2, h / 2)));
            const Vec2 k4 = rhs(t + h, add(X, scale(k3, h)));
            X = add(X, scale(add(add(k1, scale(add(k2, k3), 2.0)), k4), h / 6));
            t += h;
        }
    }
    return X;
}

}  // namespace

TransportResult transport(const OneFormField& rho, const ParametricCurve& c, const Vec2& X0,
                          const std::vector<double>& t_grid, double step) {
    if (t_grid.size() < 2) throw std::invalid_argument("transport: need at least two grid points");
    auto f = potential(rho, c.pos(t_grid.front()));
    const double r0 = norm(X0);
    const double psi00 = -f(c.pos(t_grid.front()));
    const double psi0 = std::atan2(-X0[1], X0[0]) - psi00;

    TransportResult out;
    out.t = t_grid;
    out.ode.reserve(t_grid.size());
    out.closed.reserve(t_grid.size());

    Vec2 X = X0;
    for (size_t k = 0; k < t_grid.size(); ++k) {
        if (k > 0) X = advance_transport(rho, c, X, t_grid[k - 1], t_grid[k], step);
        const double psi = -f(c.pos(t_grid[k]));
        const Vec2 Xc{r0 * std::cos(psi + psi0), -r0 * std::sin(psi + psi0)};
        out.ode.push_back(X);
        out.closed.push_back(Xc);
        out.max_mismatch = std::max(out.max_mismatch, norm(sub(X, Xc)));
        out.ode_norm_drift = std::max(out.ode_norm_drift, std::abs(norm(X) - r0));
        out.closed_norm_drift = std::max(out.closed_norm_drift, std::abs(norm(Xc) - r0));
    }
    return out;
}

double holonomy_check(const OneFormField& rho, const ParametricCurve& loop, const Vec2& X0,
                      double step) {
    const Vec2 start = loop.pos(0.0), end = loop.pos(1.0);
    if (norm(sub(start, end)) > 1e-12) throw std::invalid_argument("holonomy_check: loop not closed");
    const Vec2 X = advance_transport(rho, loop, X0, 0.0, 1.0, step);
    return norm(sub(X, X0));
}

// ---------------------------------------------------------------------------
// seed indicatrices
// ---------------------------------------------------------------------------

namespace {

double radius_along(const std::function<double(const Vec2&)>& phi, const Vec2& dir) {
    // bracket the boundary on the ray t*dir
    double lo = 1.0, hi = 1.0;
    if (phi(dir) < 0.0) {
        while (phi(scale(dir, hi)) < 0.0) {
            hi *= 2.0;
            if (hi > 1e6) throw RootBracketFailure("seed boundary not found outward");
        }
    } else {
        while (phi(scale(dir, lo)) > 0.0) {
            lo *= 0.5;
            if (lo < 1e-6) throw RootBracketFailure("seed boundary not found inward");
        }
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(scale(dir, mid)) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

SeedIndicatrix SeedIndicatrix::from_function(std::function<double(const Vec2&)> phi) {
    SeedIndicatrix s;
    if (!(phi(Vec2{0.0, 0.0}) < 0.0))
        throw RootBracketFailure("seed indicatrix must enclose the origin (phi(0) < 0)");
    s.phi_ = std::move(phi);
    s.r_in_ = 1e300;
    s.r_out_ = 0.0;
    const int n = 720;
    for (int k = 0; k < n; ++k) {
        const double a = 2.0 * M_PI * k / n;
        const double r = radius_along(s.phi_, {std::cos(a), std::sin(a)});
        s.r_in_ = std::min(s.r_in_, r);
        s.r_out_ = std::max(s.r_out_, r);
    }
    return s;
}

SeedIndicatrix SeedIndicatrix::trifocal() {
    auto s = from_function([](const Vec2& y) {
        return std::hypot(y[0] + 1.0, y[1]) + std::hypot(y[0], y[1]) + std::hypot(y[0] - 1.0, y[1]) -
               4.0;
    });
    s.trifocal_ = true;
    return s;
}

SeedIndicatrix SeedIndicatrix::circle(double r) {
    return from_function([r](const Vec2& y) { return std::hypot(y[0], y[1]) - r; });
}

double SeedIndicatrix::gauge(const Vec2& y) const {
    const double r = norm(y);
    if (r < 1e-300) return 0.0;
    double lo = 0.999 * r / r_out_;  // phi(y/lo) >= 0 (outside or on)
    double hi = 1.001 * r / r_in_;   // phi(y/hi) <= 0 (inside or on)
    if (phi(scale(y, 1.0 / lo)) < 0.0 || phi(scale(y, 1.0 / hi)) > 0.0)
        throw RootBracketFailure("gauge bracket failed");
    for (int it = 0; it < 20; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(scale(y, 1.0 / mid)) >= 0.0 ? lo : hi) = mid;
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {  // Newton polish, derivative by central difference
        const double e = 1e-6 * s;
        const double f0 = phi(scale(y, 1.0 / s));
        const double fp = phi(scale(y, 1.0 / (s + e)));
        const double fm = phi(scale(y, 1.0 / (s - e)));
        const double df = (fp - fm) / (2.0 * e);
        if (df == 0.0) break;
        s -= f0 / df;
    }
    return s;
}

SeedIndicatrix::ConvexityCertificate SeedIndicatrix::convexity_certificate(int n) const {
    std::vector<Vec2> pts(n);
    for (int k = 0; k < n; ++k) {
        const double a = 2.0 * M_PI * k / n;
        pts[k] = boundary_point({std::cos(a), std::sin(a)});
    }
    ConvexityCertificate cert;
    cert.min_cross = 1e300;
    double turning = 0.0;
    for (int k = 0; k < n; ++k) {
        const Vec2 e1 = sub(pts[(k + 1) % n], pts[k]);
        const Vec2 e2 = sub(pts[(k + 2) % n], pts[(k + 1) % n]);
        cert.min_cross = std::min(cert.min_cross, cross(e1, e2));
        turning += std::atan2(cross(e1, e2), dot(e1, e2));
    }
    cert.total_turning = turning;
    cert.convex = cert.min_cross > -1e-12 && std::abs(turning - 2.0 * M_PI) < 1e-6;
    return cert;
}

TranslatedIndicatrix translated_indicatrix(const SeedIndicatrix& seed, const OneFormField& rho,
                                           const Vec2& p) {
    auto f = potential(rho, {0.0, 0.0});
    TranslatedIndicatrix out;
    out.angle = f(p);  // f(origin) = 0
    const Mat2 back = rotation(-out.angle);
    auto phi = seed.phi_;
    out.phi = [phi, back](const Vec2& v) { return phi(mul(back, v)); };
    if (seed.trifocal_) {
        const Mat2 fwd = rotation(out.angle);
        out.foci = {mul(fwd, Vec2{-1.0, 0.0}), Vec2{0.0, 0.0}, mul(fwd, Vec2{1.0, 0.0})};
    }
    return out;
}

MetricField metric_from_field(const SeedIndicatrix& seed, const OneFormField& rho,
                              std::string name) {
    auto f = potential(rho, {0.0, 0.0});
    auto cert = seed.convexity_certificate();
    if (!cert.convex)
        throw RootBracketFailure("seed indicatrix failed the convexity certificate");
    return MetricField::black_box(std::move(name), [seed, f](const Vec2& x, const Vec2& y) {
        const double a = f(x);
        return seed.gauge(mul(rotation(-a), y));
    });
}

// ---------------------------------------------------------------------------
// figures
// ---------------------------------------------------------------------------

namespace {

void write_frame_svg(const std::string& path, const Vec2& base,
                     const std::vector<Vec2>& boundary, const std::vector<Vec2>& foci,
                     const std::vector<Vec2>& path_pts) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    char buf[256];
    const double half = 2.5;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.6f %.6f %.6f %.6f\">\n",
                  base[0] - half, -(base[1] + half), 2 * half, 2 * half);
    out << buf;
    out << "<g stroke-width=\"0.015\" fill=\"none\">\n";
    auto polyline = [&](const std::vector<Vec2>& pts, const char* color, bool closed) {
        out << "<polyline stroke=\"" << color << "\" points=\"";
        for (const Vec2& q : pts) {
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f ", q[0], -q[1]);
            out << buf;
        }
        if (closed && !pts.empty()) {
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f", pts[0][0], -pts[0][1]);
            out << buf;
        }
        out << "\"/>\n";
    };
    if (!path_pts.empty()) polyline(path_pts, "#999999", false);
    polyline(boundary, "#000000", true);
    for (const Vec2& q : foci) {
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.6f\" cy=\"%.6f\" r=\"0.04\" fill=\"#cc0000\"/>\n", q[0],
                      -q[1]);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.6f\" cy=\"%.6f\" r=\"0.03\" fill=\"#0000cc\"/>\n", base[0],
                  -base[1]);
    out << buf;
    out << "</g>\n</svg>\n";
}

}  // namespace

std::vector<std::string> render_figures(const SeedIndicatrix& seed, const OneFormField& rho,
                                        const FigureSpec& spec) {
    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);
    std::vector<std::string> written;
    std::ofstream csv(spec.out_dir + "/figures.csv");
    if (!csv) throw std::runtime_error("cannot open figures.csv");
    csv << "family,t,kind,index,u1,u2\n";
    char buf[240];

    struct Family {
        const char* name;
        ParametricCurve curve;
        const std::vector<double>& ts;
    };
    const Family families[2] = {{"radial", ParametricCurve::radial(), spec.radial_t},
                                {"circle", ParametricCurve::circle(), spec.circle_t}};

    for (const auto& fam : families) {
        for (double t : fam.ts) {
            const Vec2 base = fam.curve.pos(t);
            const TranslatedIndicatrix ti = translated_indicatrix(seed, rho, base);
            std::vector<Vec2> boundary(spec.boundary_samples);
            for (int k = 0; k < spec.boundary_samples; ++k) {
                const double a = 2.0 * M_PI * k / spec.boundary_samples;
                const Vec2 dir{std::cos(a), std::sin(a)};
                // boundary of the translated curve = rotated seed boundary
                const Vec2 y = scale(dir, 1.0 / seed.gauge(mul(rotation(-ti.angle), dir)));
                boundary[k] = add(base, y);
            }
            std::vector<Vec2> foci;
            for (const Vec2& q : ti.foci) foci.push_back(add(base, q));
            std::vector<Vec2> path_pts;
            const double t0 = fam.ts.front(), t1 = fam.ts.back();
            for (int k = 0; k <= 128; ++k)
                path_pts.push_back(fam.curve.pos(t0 + (t1 - t0) * k / 128.0));

            std::snprintf(buf, sizeof(buf), "%s/%s_t%.4f.svg", spec.out_dir.c_str(), fam.name, t);
            write_frame_svg(buf, base, boundary, foci, path_pts);
            written.push_back(buf);

            for (int k = 0; k < spec.boundary_samples; ++k) {
                std::snprintf(buf, sizeof(buf), "%s,%.6f,boundary,%d,%.9f,%.9f\n", fam.name, t, k,
                              boundary[k][0], boundary[k][1]);
                csv << buf;
            }
            for (size_t k = 0; k < foci.size(); ++k) {
                std::snprintf(buf, sizeof(buf), "%s,%.6f,focus,%zu,%.9f,%.9f\n", fam.name, t, k,
                              foci[k][0], foci[k][1]);
                csv << buf;
            }
        }
    }
    written.push_back(spec.out_dir + "/figures.csv");
    return written;
}

}  // namespace fsl

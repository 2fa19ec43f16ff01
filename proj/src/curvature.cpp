#include "fsl/curvature.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fsl/parallel.hpp"

namespace fsl {

namespace {

// kappa from the metric and its first/second coordinate derivatives
double kappa_from_derivs(const Mat2& g, const Mat2 dg[2], const Mat2 ddg[2][2]) {
    const Mat2 gi = inverse(g);
    Ten3 chris{};
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double s = 0.0;
                for (int l = 0; l < 2; ++l)
                    s += gi[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                chris[k][i][j] = 0.5 * s;
            }
    // d_m Gamma^k_ij, using d(g^-1) = -g^-1 dg g^-1
    Ten4 dchris{};  // [m][k][i][j]
    for (int mdir = 0; mdir < 2; ++mdir) {
        Mat2 dgi;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double s = 0.0;
                for (int c = 0; c < 2; ++c)
                    for (int e = 0; e < 2; ++e) s += gi[a][c] * dg[mdir][c][e] * gi[e][b];
                dgi[a][b] = -s;
            }
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < 2; ++l) {
                        s += dgi[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                        s += gi[k][l] * (ddg[mdir][i][j][l] + ddg[mdir][j][i][l] - ddg[mdir][l][i][j]);
                    }
                    dchris[mdir][k][i][j] = 0.5 * s;
                }
    }
    // R(d1, d2) d2, then kappa = gamma(R(d1,d2)d2, d1) / det gamma
    Vec2 r{};
    for (int l = 0; l < 2; ++l) {
        double s = dchris[0][l][1][1] - dchris[1][l][0][1];
        for (int mm = 0; mm < 2; ++mm)
            s += chris[l][0][mm] * chris[mm][1][1] - chris[l][1][mm] * chris[mm][0][1];
        r[l] = s;
    }
    return (g[0][0] * r[0] + g[0][1] * r[1]) / det(g);
}

Mat2 richardson_d1(const MatrixField& f, const Vec2& p, int dir, double h) {
    auto diff = [&](double hh) {
        Vec2 pp = p, pm = p;
        pp[dir] += hh;
        pm[dir] -= hh;
        const Mat2 a = f(pp), b = f(pm);
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r[i][j] = (a[i][j] - b[i][j]) / (2.0 * hh);
        return r;
    };
    const Mat2 d1 = diff(h), d2 = diff(h / 2);
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = (4.0 * d2[i][j] - d1[i][j]) / 3.0;
    return r;
}

Mat2 richardson_d2(const MatrixField& f, const Vec2& p, int d1, int d2, double h) {
    auto second = [&](double hh) {
        Mat2 r;
        if (d1 == d2) {
            Vec2 pp = p, pm = p;
            pp[d1] += hh;
            pm[d1] -= hh;
            const Mat2 a = f(pp), b = f(pm), c = f(p);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    r[i][j] = (a[i][j] - 2.0 * c[i][j] + b[i][j]) / (hh * hh);
        } else {
            Vec2 qpp = p, qpm = p, qmp = p, qmm = p;
            qpp[d1] += hh; qpp[d2] += hh;
            qpm[d1] += hh; qpm[d2] -= hh;
            qmp[d1] -= hh; qmp[d2] += hh;
            qmm[d1] -= hh; qmm[d2] -= hh;
            const Mat2 a = f(qpp), b = f(qpm), c = f(qmp), e = f(qmm);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    r[i][j] = (a[i][j] - b[i][j] - c[i][j] + e[i][j]) / (4.0 * hh * hh);
        }
        return r;
    };
    const Mat2 a = second(h), b = second(h / 2);
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = (4.0 * b[i][j] - a[i][j]) / 3.0;
    return r;
}

Ten3 christoffels_from(const Mat2& g, const Mat2 dg[2]) {
    const Mat2 gi = inverse(g);
    Ten3 chris{};
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double s = 0.0;
                for (int l = 0; l < 2; ++l)
                    s += gi[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                chris[k][i][j] = 0.5 * s;
            }
    return chris;
}

// dsharp[m][k] = d_m (rho#)^k precomputed by the caller
double div_from_derivs(const Mat2& g, const Mat2 dg[2], const Mat2& dsharp,
                       const Vec2& rho_sharp, double frame_angle) {
    const Ten3 chris = christoffels_from(g, dg);

    // Gram-Schmidt frame from the rotated coordinate basis
    const Mat2 rot = rotation(frame_angle);
    const Vec2 b1{rot[0][0], rot[1][0]}, b2{rot[0][1], rot[1][1]};
    const double n1 = std::sqrt(quad_form(g, b1, b1));
    const Vec2 e1 = scale(b1, 1.0 / n1);
    Vec2 e2 = sub(b2, scale(e1, quad_form(g, b2, e1)));
    e2 = scale(e2, 1.0 / std::sqrt(quad_form(g, e2, e2)));

    double divv = 0.0;
    for (const Vec2& e : {e1, e2}) {
        Vec2 cov{};  // (nabla*_e rho#)^k
        for (int k = 0; k < 2; ++k) {
            double s = 0.0;
            for (int mdir = 0; mdir < 2; ++mdir) {
                s += e[mdir] * dsharp[mdir][k];
                for (int l = 0; l < 2; ++l) s += e[mdir] * chris[k][mdir][l] * rho_sharp[l];
            }
            cov[k] = s;
        }
        divv += quad_form(g, cov, e);
    }
    return divv;
}

}  // namespace

double gauss_curvature(const MatrixField& gamma, const Vec2& p, double h) {
    const Mat2 g = gamma(p);
    if (!(det(g) > 0.0)) throw SingularMetric("gauss_curvature: field not positive definite");
    Mat2 dg[2] = {richardson_d1(gamma, p, 0, h), richardson_d1(gamma, p, 1, h)};
    Mat2 ddg[2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) ddg[a][b] = richardson_d2(gamma, p, a, b, h);
    return kappa_from_derivs(g, dg, ddg);
}

double divergence(const MatrixField& gamma, const OneForm& rho, const Vec2& p, double h,
                  double frame_angle) {
    const Mat2 g = gamma(p);
    if (!(det(g) > 0.0)) throw SingularMetric("divergence: field not positive definite");
    Mat2 dg[2] = {richardson_d1(gamma, p, 0, h), richardson_d1(gamma, p, 1, h)};
    auto sharp = [&](const Vec2& q) { return mul(inverse(gamma(q)), rho(q)); };
    Mat2 dsharp;
    for (int mdir = 0; mdir < 2; ++mdir) {
        auto diff = [&](double hh) {
            Vec2 pp = p, pm = p;
            pp[mdir] += hh;
            pm[mdir] -= hh;
            const Vec2 a = sharp(pp), b = sharp(pm);
            return Vec2{(a[0] - b[0]) / (2 * hh), (a[1] - b[1]) / (2 * hh)};
        };
        const Vec2 c1 = diff(h), c2 = diff(h / 2);
        dsharp[mdir] = {(4 * c2[0] - c1[0]) / 3.0, (4 * c2[1] - c1[1]) / 3.0};
    }
    return div_from_derivs(g, dg, dsharp, sharp(p), frame_angle);
}

Ten4 connection_curvature(const LinearConnection& conn, const Vec2& p, double h) {
    Ten4 dG{};  // dG[m][l][i][j] = d_m Gamma^l_ij
    for (int mdir = 0; mdir < 2; ++mdir) {
        auto diff = [&](double hh) {
            Vec2 pp = p, pm = p;
            pp[mdir] += hh;
            pm[mdir] -= hh;
            const Ten3 a = conn(pp), b = conn(pm);
            Ten3 r{};
            for (int l = 0; l < 2; ++l)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) r[l][i][j] = (a[l][i][j] - b[l][i][j]) / (2 * hh);
            return r;
        };
        const Ten3 c1 = diff(h), c2 = diff(h / 2);
        for (int l = 0; l < 2; ++l)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    dG[mdir][l][i][j] = (4 * c2[l][i][j] - c1[l][i][j]) / 3.0;
    }
    const Ten3 G = conn(p);
    Ten4 R{};
    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double s = dG[i][l][j][k] - dG[j][l][i][k];
                    for (int mm = 0; mm < 2; ++mm)
                        s += G[l][i][mm] * G[mm][j][k] - G[l][j][mm] * G[mm][i][k];
                    R[l][k][i][j] = s;
                }
    return R;
}

double one_form_d(const OneForm& rho, const Vec2& p, double h) {
    auto d = [&](int dir, int comp, double hh) {
        Vec2 pp = p, pm = p;
        pp[dir] += hh;
        pm[dir] -= hh;
        return (rho(pp)[comp] - rho(pm)[comp]) / (2 * hh);
    };
    const double a1 = d(0, 1, h), a2 = d(0, 1, h / 2);
    const double b1 = d(1, 0, h), b2 = d(1, 0, h / 2);
    return (4 * a2 - a1) / 3.0 - ((4 * b2 - b1) / 3.0);
}

std::vector<CurvatureReport> divergence_representation_check(const MatrixField& gamma,
                                                             const LinearConnection& conn,
                                                             const RegionGrid& grid) {
    // shared fine grid at half pitch with a 2-node margin
    const double delta = std::min(grid.dx, grid.dy) / 2.0;
    const int fx = 2 * (grid.nx - 1) + 5, fy = 2 * (grid.ny - 1) + 5;
    std::vector<Mat2> fine(static_cast<size_t>(fx) * fy);
    std::vector<Vec2> sharp(static_cast<size_t>(fx) * fy);
    parallel_for(fx * fy, [&](int idx) {
        const int a = idx % fx, b = idx / fx;
        const Vec2 q{grid.x0 + (a - 2) * delta, grid.y0 + (b - 2) * delta};
        fine[idx] = gamma(q);
        sharp[idx] = mul(inverse(fine[idx]), torsion_decompose(conn, q).rho);
    });
    auto gat = [&](int a, int b) -> const Mat2& { return fine[static_cast<size_t>(b) * fx + a]; };
    auto sat = [&](int a, int b) -> const Vec2& { return sharp[static_cast<size_t>(b) * fx + a]; };

    std::vector<CurvatureReport> out(static_cast<size_t>(grid.nx) * grid.ny);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const int a = 2 * i + 2, b = 2 * j + 2;
            const Vec2 p{grid.x0 + i * grid.dx, grid.y0 + j * grid.dy};

            auto D1 = [&](auto&& f, int dir) {
                const int sa = dir == 0 ? 1 : 0, sb = dir == 0 ? 0 : 1;
                auto fine1 = (f(a + sa, b + sb) - f(a - sa, b - sb)) * (1.0 / (2 * delta));
                auto fine2 = (f(a + 2 * sa, b + 2 * sb) - f(a - 2 * sa, b - 2 * sb)) * (1.0 / (4 * delta));
                return (fine1 * 4.0 - fine2) * (1.0 / 3.0);
            };
            auto D2p = [&](auto&& f, int d1, int d2) {
                if (d1 == d2) {
                    const int sa = d1 == 0 ? 1 : 0, sb = d1 == 0 ? 0 : 1;
                    auto s1 = (f(a + sa, b + sb) - f(a, b) * 2.0 + f(a - sa, b - sb)) *
                              (1.0 / (delta * delta));
                    auto s2 = (f(a + 2 * sa, b + 2 * sb) - f(a, b) * 2.0 + f(a - 2 * sa, b - 2 * sb)) *
                              (1.0 / (4 * delta * delta));
                    return (s1 * 4.0 - s2) * (1.0 / 3.0);
                }
                auto x1 = (f(a + 1, b + 1) - f(a + 1, b - 1) - f(a - 1, b + 1) + f(a - 1, b - 1)) *
                          (1.0 / (4 * delta * delta));
                auto x2 = (f(a + 2, b + 2) - f(a + 2, b - 2) - f(a - 2, b + 2) + f(a - 2, b - 2)) *
                          (1.0 / (16 * delta * delta));
                return (x1 * 4.0 - x2) * (1.0 / 3.0);
            };

            struct M2 {  // tiny arithmetic wrapper for the stencil lambdas
                Mat2 m{};
                M2 operator-(const M2& o) const {
                    M2 r;
                    for (int x = 0; x < 2; ++x)
                        for (int y = 0; y < 2; ++y) r.m[x][y] = m[x][y] - o.m[x][y];
                    return r;
                }
                M2 operator+(const M2& o) const {
                    M2 r;
                    for (int x = 0; x < 2; ++x)
                        for (int y = 0; y < 2; ++y) r.m[x][y] = m[x][y] + o.m[x][y];
                    return r;
                }
                M2 operator*(double s) const {
                    M2 r;
                    for (int x = 0; x < 2; ++x)
                        for (int y = 0; y < 2; ++y) r.m[x][y] = m[x][y] * s;
                    return r;
                }
            };
            auto gm = [&](int x, int y) { return M2{gat(x, y)}; };
            struct V2w {
                Vec2 v{};
                V2w operator-(const V2w& o) const { return {sub(v, o.v)}; }
                V2w operator+(const V2w& o) const { return {add(v, o.v)}; }
                V2w operator*(double s) const { return {scale(v, s)}; }
            };
            auto sm = [&](int x, int y) { return V2w{sat(x, y)}; };

            const Mat2 g = gat(a, b);
            Mat2 dg[2] = {D1(gm, 0).m, D1(gm, 1).m};
            Mat2 ddg[2][2];
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) ddg[x][y] = D2p(gm, x, y).m;

            CurvatureReport rep;
            rep.p = p;
            rep.kappa_star = kappa_from_derivs(g, dg, ddg);

            // coordinate-trace divergence of rho#
            const Ten3 chris = christoffels_from(g, dg);
            const Vec2 ds0 = D1(sm, 0).v, ds1 = D1(sm, 1).v;
            double divv = ds0[0] + ds1[1];
            const Vec2 rs = sat(a, b);
            for (int mm = 0; mm < 2; ++mm)
                for (int l = 0; l < 2; ++l) divv += chris[mm][mm][l] * rs[l];
            rep.div_rho_sharp = divv;
            rep.sum_residual = std::abs(rep.kappa_star + rep.div_rho_sharp);
            rep.conn_curvature_norm = max_abs(connection_curvature(conn, p, delta));
            out[static_cast<size_t>(j) * grid.nx + i] = rep;
        }
    return out;
}

std::vector<CurvatureReport> divergence_representation_check(const MetricField& m,
                                                             const LinearConnection& conn,
                                                             const DiffEngine& d,
                                                             const RegionGrid& grid,
                                                             const TraceOptions& topts) {
    return divergence_representation_check(averaged_gamma_field(m, d, topts), conn, grid);
}

void write_reports_csv(const std::vector<CurvatureReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "u1,u2,kappaStar,divRho,sumResidual,Rnorm\n";
    char buf[240];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.p[0], r.p[1],
                      r.kappa_star, r.div_rho_sharp, r.sum_residual, r.conn_curvature_norm);
        out << buf;
    }
}

}  // namespace fsl

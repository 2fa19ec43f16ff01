#include "fsl/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "fsl/connection.hpp"
#include "fsl/curvature.hpp"
#include "fsl/expr.hpp"
#include "fsl/indicatrix.hpp"
#include "fsl/parallel.hpp"
#include "fsl/plane.hpp"
#include "fsl/tensors.hpp"

namespace fsl {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const Mat2& m) {
    return json::array({{m[0][0], m[0][1]}, {m[1][0], m[1][1]}});
}

json to_json(const Ten3& t) {
    json out = json::array();
    for (int k = 0; k < 2; ++k) {
        json plane = json::array();
        for (int i = 0; i < 2; ++i) plane.push_back({t[k][i][0], t[k][i][1]});
        out.push_back(plane);
    }
    return out;
}

json jet_to_json(const MetricJet& j) {
    return json{{"E", j.E},
                {"g", to_json(j.g)},
                {"gInv", to_json(j.g_inv)},
                {"detG", j.detg},
                {"cartan", to_json(j.cartan)},
                {"cartanTrace", {j.cartan_trace[0], j.cartan_trace[1]}},
                {"l", {j.l[0], j.l[1]}},
                {"V", {j.V[0], j.V[1]}},
                {"V0", {j.V0[0], j.V0[1]}},
                {"C0", {j.C0[0], j.C0[1]}},
                {"mainScalar", j.main_scalar}};
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
}

struct Tolerances {
    double euler, ycartan_rel, detg_rel, lambda_agree, eq4;
    static Tolerances table(const DiffEngine& d, double scale) {
        if (d.kind() == DiffEngine::Kind::dual)
            return {1e-8 * scale, 1e-7 * scale, 1e-6 * scale, 1e-5 * scale, 1e-4 * scale};
        return {1e-5 * scale, 1e-5 * scale, 1e-5 * scale, 1e-4 * scale, 1e-4 * scale};
    }
};

std::vector<std::pair<ChartPoint, FiberVector>> fiber_fan(const std::vector<ChartPoint>& grid,
                                                          int directions) {
    std::vector<std::pair<ChartPoint, FiberVector>> out;
    for (const ChartPoint& p : grid)
        for (int k = 0; k < directions; ++k) {
            const double a = 2.0 * M_PI * k / directions + 0.1;
            out.push_back({p, {std::cos(a), std::sin(a)}});
        }
    return out;
}

TraceOptions trace_options(const RunConfig& cfg) {
    TraceOptions t;
    t.step = cfg.get_double_or("trace", "step", 1e-3);
    t.samples = cfg.get_int_or("trace", "samples", 256);
    t.theta_max = cfg.get_double_or("trace", "theta_max", 40.0);
    return t;
}

int run_guarded(const CliOptions& opts, int (*body)(const RunConfig&, const CliOptions&)) {
    try {
        const RunConfig cfg = RunConfig::parse_file(opts.config_path);
        return body(cfg, opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

// the linear connection the construction's transports realize (torsion -rho)
LinearConnection construction_connection(const OneFormField& rho) {
    return LinearConnection::semi_symmetric([rho](const Vec2& p) {
        const Vec2 r = rho(p);
        return Vec2{-r[0], -r[1]};
    });
}

OneFormField one_form_from_config(const RunConfig& cfg) {
    const Expr r1 = Expr::parse(cfg.get_string("construction", "rho1"));
    const Expr r2 = Expr::parse(cfg.get_string("construction", "rho2"));
    std::optional<std::function<double(const Vec2&)>> pot;
    if (cfg.has("construction", "potential")) {
        const Expr pf = Expr::parse(cfg.get_string("construction", "potential"));
        pot = [pf](const Vec2& u) { return pf.eval(u, {0, 0}); };
    }
    return OneFormField([r1](const Vec2& u) { return r1.eval(u, {0, 0}); },
                        [r2](const Vec2& u) { return r2.eval(u, {0, 0}); }, pot);
}

}  // namespace

MetricField metric_from_config(const RunConfig& cfg) {
    if (cfg.has("construction", "seed")) {
        const Expr seed_expr = Expr::parse(cfg.get_string("construction", "seed"));
        const SeedIndicatrix seed = SeedIndicatrix::from_function(
            [seed_expr](const Vec2& y) { return seed_expr.eval({0, 0}, y); });
        return metric_from_field(seed, one_form_from_config(cfg),
                                 cfg.get_string_or("metric", "preset", "plane:custom"));
    }
    return make_preset(cfg.get_string("metric", "preset"));
}

DiffEngine engine_from_config(const RunConfig& cfg, const CliOptions& opts, const MetricField& m) {
    std::string kind = opts.engine.empty() ? cfg.get_string_or("engine", "kind", "") : opts.engine;
    if (kind.empty()) return DiffEngine::for_metric(m);
    if (kind == "dual") {
        if (!m.has_closed_form())
            throw ConfigError("metric '" + m.name() + "' has no closed form; use the fd engine");
        return DiffEngine::dual_engine();
    }
    if (kind == "fd") return DiffEngine::fd_engine();
    throw ConfigError("unknown engine kind '" + kind + "' (expected dual or fd)");
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

namespace {

int analyze_body(const RunConfig& cfg, const CliOptions& opts) {
    const MetricField m = metric_from_config(cfg);
    const DiffEngine d = engine_from_config(cfg, opts, m);
    const auto grid = cfg.base_grid();
    const auto tol = Tolerances::table(d, opts.tol_scale);
    const TraceOptions topts = trace_options(cfg);
    fs::create_directories(opts.out_dir);

    json summary;
    summary["metric"] = m.name();
    summary["engine"] = d.kind_name();
    bool ok = true;

    const auto samples = fiber_fan(grid, 8);
    const ValidationReport val = validate_metric(m, samples, d);
    summary["validation"] = {{"samples", val.samples},
                             {"maxHomogeneityResidual", val.max_homogeneity_residual},
                             {"minValue", val.min_value},
                             {"minHessianEigenvalue", val.min_hessian_eigenvalue}};
    ok = ok && val.positive() && val.positive_definite() && val.max_homogeneity_residual < 1e-9;

    double worst_euler = 0.0, worst_ycartan = 0.0, worst_detg = 0.0, worst_lambda = 0.0;
    for (const auto& [p, v] : samples) {
        const MetricJet j = metric_jet(m, p, v, d);
        worst_euler = std::max(worst_euler, std::abs(v.y1 * j.l[0] + v.y2 * j.l[1] - j.F));
        double cnorm = 0.0, contraction = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                contraction = std::max(
                    contraction, std::abs(v.y1 * j.cartan[a][b][0] + v.y2 * j.cartan[a][b][1]));
                for (int c = 0; c < 2; ++c) cnorm = std::max(cnorm, std::abs(j.cartan[a][b][c]));
            }
        worst_ycartan = std::max(worst_ycartan, contraction / std::max(1.0, cnorm));
        worst_detg = std::max(worst_detg, std::abs(j.detg - j.gVV) / j.detg);
        const double lam_fd = fd::directional(
            [&](double t) {
                return std::log(std::sqrt(
                    metric_jet(m, p, {v.y1 + t * j.V0[0], v.y2 + t * j.V0[1]}, d).detg));
            },
            d.kind() == DiffEngine::Kind::dual ? 1e-3 : 5e-3);
        worst_lambda = std::max(worst_lambda, std::abs(j.main_scalar - lam_fd));
    }
    summary["identitySuite"] = {{"euler", worst_euler},
                                {"yCartanRelative", worst_ycartan},
                                {"detgVsGVVRelative", worst_detg},
                                {"mainScalarAgreement", worst_lambda}};
    ok = ok && worst_euler < tol.euler && worst_ycartan < tol.ycartan_rel &&
         worst_detg < tol.detg_rel && worst_lambda < tol.lambda_agree;

    summary["jetDump"] = jet_to_json(metric_jet(m, grid.front(), {1.0, 0.0}, d));

    // traces and averaged metrics over the grid
    json points = json::array();
    std::vector<json> point_json(grid.size());
    std::vector<int> flags(grid.size(), 1);
    parallel_for(static_cast<int>(grid.size()), [&](int i) {
        const ChartPoint p = grid[i];
        TraceOptions to = topts;
        to.want_spray = false;
        const IndicatrixTrace tr = trace_indicatrix(m, p, seed_point(m, p, {1.0, 0.0}), d, to);
        const AveragedMetric gamma = averaged_metric(tr);
        double lmin = tr.lam[0], lmax = tr.lam[0], fdev = 0.0;
        for (int k = 0; k < tr.size(); ++k) {
            lmin = std::min(lmin, tr.lam[k]);
            lmax = std::max(lmax, tr.lam[k]);
            fdev = std::max(fdev, std::abs(m.value(p, {tr.c[k][0], tr.c[k][1]}) - 1.0));
        }
        char csv_name[128];
        std::snprintf(csv_name, sizeof(csv_name), "trace_%02d.csv", i);
        tr.write_csv(opts.out_dir + "/" + csv_name);
        point_json[i] = {{"p", {p.u1, p.u2}},
                         {"period", tr.period},
                         {"closureError", tr.closure_error},
                         {"lambdaRange", lmax - lmin},
                         {"riemannianFlag", (lmax - lmin) < 1e-6},
                         {"maxFDrift", fdev},
                         {"gamma", to_json(gamma.gamma)},
                         {"trace", csv_name}};
        if (fdev > 1e-6 || tr.closure_error > 1e-6) flags[i] = 0;
    });
    for (size_t i = 0; i < grid.size(); ++i) {
        points.push_back(point_json[i]);
        ok = ok && flags[i] == 1;
    }
    summary["grid"] = points;
    summary["verdict"] = ok ? "pass" : "fail";
    write_json(summary, opts.out_dir + "/analyze.json");
    return ok ? 0 : 2;
}

}  // namespace

int cmd_analyze(const CliOptions& opts) { return run_guarded(opts, analyze_body); }

// ---------------------------------------------------------------------------
// connection
// ---------------------------------------------------------------------------

namespace {

int connection_body(const RunConfig& cfg, const CliOptions& opts) {
    const MetricField m = metric_from_config(cfg);
    const DiffEngine d = engine_from_config(cfg, opts, m);
    const auto grid = cfg.base_grid();
    const TraceOptions topts = trace_options(cfg);
    fs::create_directories(opts.out_dir);

    json summary;
    summary["metric"] = m.name();
    summary["engine"] = d.kind_name();
    json points = json::array();
    std::vector<json> point_json(grid.size());

    parallel_for(static_cast<int>(grid.size()), [&](int i) {
        const ChartPoint p = grid[i];
        json pj;
        pj["p"] = {p.u1, p.u2};
        auto tr = std::make_shared<IndicatrixTrace>(
            trace_indicatrix(m, p, seed_point(m, p, {1.0, 0.0}), d, topts));
        auto src = std::make_shared<SourceIntegrals>(source_integrals(*tr));
        const ConnectionSolve sol = solve_constants(tr, src);
        pj["lambdaRange"] = sol.lambda_range;
        pj["kSpread"] = {sol.k_spread[0], sol.k_spread[1]};
        if (sol.outcome == SolveOutcome::RiemannianCase) {
            pj["outcome"] = "riemannian";
            pj["conicFitResidual"] = sol.conic_residual;
        } else if (sol.outcome == SolveOutcome::InconsistentConstants) {
            pj["outcome"] = "inconsistent-constants";
        } else {
            pj["outcome"] = "solved";
            pj["k"] = {sol.k[0], sol.k[1]};
            const BuiltConnection built = build_connection(m, p, sol, d);
            pj["Gamma"] = to_json(built.gamma);
            pj["fiberSpread"] = built.fiber_spread;
            LinearConnection at_p;
            at_p.coeff = [g = built.gamma](const Vec2&) { return g; };
            const TorsionDecomposition td = torsion_decompose(at_p, {p.u1, p.u2});
            pj["rho"] = {td.rho[0], td.rho[1]};
            pj["torsionResidual"] = td.residual;
            std::vector<std::pair<ChartPoint, FiberVector>> samples;
            for (int k = 0; k < tr->size(); k += 8)
                samples.push_back({p, {tr->c[k][0], tr->c[k][1]}});
            pj["compatibilityResidual"] = compatibility_residual(m, at_p, samples, d);
        }
        point_json[i] = std::move(pj);
    });

    std::string verdict = "solved";
    for (size_t i = 0; i < grid.size(); ++i) {
        points.push_back(point_json[i]);
        const std::string oc = point_json[i]["outcome"];
        if (oc == "riemannian" && verdict == "solved") verdict = "riemannian";
        if (oc == "inconsistent-constants") verdict = "not-generalized-berwald";
    }

    // Levi-Civita comparison of the averaged metric at the first solved point
    for (size_t i = 0; i < grid.size(); ++i) {
        if (point_json[i]["outcome"] != "solved") continue;
        const ChartPoint p = grid[i];
        Ten3 gamma{};
        const auto& gj = point_json[i]["Gamma"];
        for (int k = 0; k < 2; ++k)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) gamma[k][a][b] = gj[k][a][b];
        LinearConnection at_p;
        at_p.coeff = [gamma](const Vec2&) { return gamma; };
        TraceOptions go = topts;
        go.samples = std::min(topts.samples, 256);
        const ComparisonReport rep =
            levi_civita_compare(averaged_gamma_field(m, d, go), at_p, {p.u1, p.u2}, 2e-3);
        summary["leviCivita"] = {{"p", {p.u1, p.u2}},
                                 {"eq02Residual", rep.eq02_residual},
                                 {"metricalityResidual", rep.metricality_residual},
                                 {"rho", {rep.rho[0], rep.rho[1]}}};
        break;
    }

    summary["points"] = points;
    summary["verdict"] = verdict;
    write_json(summary, opts.out_dir + "/connection.json");
    return 0;
}

}  // namespace

int cmd_connection(const CliOptions& opts) { return run_guarded(opts, connection_body); }

// ---------------------------------------------------------------------------
// wagner
// ---------------------------------------------------------------------------

namespace {

int wagner_body(const RunConfig& cfg, const CliOptions& opts) {
    const MetricField m = metric_from_config(cfg);
    const DiffEngine d = engine_from_config(cfg, opts, m);
    const auto grid = cfg.base_grid();
    const TraceOptions topts = trace_options(cfg);
    fs::create_directories(opts.out_dir);

    const WagnerReport rep = wagner_test(m, grid, d, topts);
    const auto pairs = wagner_scatter(m, grid, d, topts);
    {
        std::ofstream csv(opts.out_dir + "/wagner_scatter.csv");
        csv << "A,dA\n";
        char buf[96];
        for (const auto& pr : pairs) {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", pr[0], pr[1]);
            csv << buf;
        }
    }
    json summary;
    summary["metric"] = m.name();
    summary["engine"] = d.kind_name();
    summary["riemannian"] = rep.riemannian;
    summary["lambdaRange"] = rep.lambda_range;
    summary["scatterResidual"] = rep.scatter_residual;
    summary["pdeResidual"] = rep.pde_residual;
    summary["branches"] = rep.branches;
    const double tol = 1e-3 * opts.tol_scale;
    summary["verdict"] = rep.riemannian
                             ? "riemannian"
                             : (rep.scatter_residual < tol && rep.pde_residual < tol
                                    ? "generalized-berwald-consistent"
                                    : "not-generalized-berwald");
    write_json(summary, opts.out_dir + "/wagner.json");
    return 0;
}

}  // namespace

int cmd_wagner(const CliOptions& opts) { return run_guarded(opts, wagner_body); }

// ---------------------------------------------------------------------------
// curvature
// ---------------------------------------------------------------------------

namespace {

int curvature_body(const RunConfig& cfg, const CliOptions& opts) {
    const MetricField m = metric_from_config(cfg);
    const DiffEngine d = engine_from_config(cfg, opts, m);
    fs::create_directories(opts.out_dir);

    // connection choice: the construction's own connection for plane metrics,
    // a zero connection otherwise (overridable)
    const std::string kind = cfg.get_string_or("curvature", "connection", "auto");
    LinearConnection conn;
    if (kind == "zero" || (kind == "auto" && m.name().rfind("plane:", 0) != 0)) {
        conn.coeff = [](const Vec2&) { return Ten3{}; };
        conn.analytic = true;
    } else if (kind == "auto" || kind == "construction") {
        OneFormField rho = cfg.has("construction", "rho1")
                               ? one_form_from_config(cfg)
                               : OneFormField::rotational();
        conn = construction_connection(rho);
    } else {
        throw ConfigError("unknown [curvature] connection kind '" + kind + "'");
    }

    RegionGrid region;
    if (cfg.has("curvature", "u1")) {
        const GridAxis a1 = cfg.get_axis("curvature", "u1");
        const GridAxis a2 = cfg.get_axis("curvature", "u2");
        region.x0 = a1.min;
        region.y0 = a2.min;
        region.nx = a1.count;
        region.ny = a2.count;
        region.dx = a1.count > 1 ? (a1.max - a1.min) / (a1.count - 1) : 0.04;
        region.dy = a2.count > 1 ? (a2.max - a2.min) / (a2.count - 1) : 0.04;
    }
    TraceOptions topts = trace_options(cfg);
    topts.step = cfg.get_double_or("trace", "step", 2.5e-3);

    const auto reports = divergence_representation_check(m, conn, d, region, topts);
    write_reports_csv(reports, opts.out_dir + "/curvature.csv");

    double worst_sum = 0.0, worst_R = 0.0;
    for (const auto& r : reports) {
        worst_sum = std::max(worst_sum, r.sum_residual);
        worst_R = std::max(worst_R, r.conn_curvature_norm);
    }
    json summary;
    summary["metric"] = m.name();
    summary["engine"] = d.kind_name();
    summary["maxSumResidual"] = worst_sum;
    summary["maxConnCurvature"] = worst_R;
    const double tol = 1e-5 * opts.tol_scale;
    const bool ok = worst_sum < tol && worst_R < tol;
    summary["verdict"] = ok ? "pass" : "fail";
    write_json(summary, opts.out_dir + "/curvature.json");
    return ok ? 0 : 2;
}

}  // namespace

int cmd_curvature(const CliOptions& opts) { return run_guarded(opts, curvature_body); }

// ---------------------------------------------------------------------------
// figures
// ---------------------------------------------------------------------------

namespace {

int figures_body(const RunConfig& cfg, const CliOptions& opts) {
    SeedIndicatrix seed = SeedIndicatrix::trifocal();
    OneFormField rho = OneFormField::rotational();
    if (cfg.has("construction", "seed")) {
        const Expr seed_expr = Expr::parse(cfg.get_string("construction", "seed"));
        seed = SeedIndicatrix::from_function(
            [seed_expr](const Vec2& y) { return seed_expr.eval({0, 0}, y); });
        rho = one_form_from_config(cfg);
    }
    FigureSpec spec;
    spec.out_dir = opts.out_dir;
    const auto written = render_figures(seed, rho, spec);
    json summary;
    summary["files"] = written;
    summary["verdict"] = "pass";
    write_json(summary, opts.out_dir + "/figures.json");
    return 0;
}

}  // namespace

int cmd_figures(const CliOptions& opts) { return run_guarded(opts, figures_body); }

}  // namespace fsl

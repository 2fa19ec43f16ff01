#include <string>

#include "CLI11.hpp"

#include "fsl/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"finsler surface lab"};
    app.require_subcommand(1);

    fsl::CliOptions opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "run configuration file")->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--engine", opts.engine, "differentiation engine (dual|fd)");
        sub->add_option("--tol-scale", opts.tol_scale, "tolerance scale factor");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "metric validation, jets, traces");
    CLI::App* connection = app.add_subcommand("connection", "compatible-connection construction");
    CLI::App* wagner = app.add_subcommand("wagner", "Wagner criterion");
    CLI::App* curvature = app.add_subcommand("curvature", "curvature and divergence identity");
    CLI::App* figures = app.add_subcommand("figures", "indicatrix translation figures");
    for (CLI::App* sub : {analyze, connection, wagner, curvature, figures}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    if (analyze->parsed()) return fsl::cmd_analyze(opts);
    if (connection->parsed()) return fsl::cmd_connection(opts);
    if (wagner->parsed()) return fsl::cmd_wagner(opts);
    if (curvature->parsed()) return fsl::cmd_curvature(opts);
    if (figures->parsed()) return fsl::cmd_figures(opts);
    return 3;
}

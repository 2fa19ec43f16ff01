#pragma once

// Batch front-end: binds metric presets or construction configs to the
// analysis pipelines and writes JSON/CSV/SVG reports.

#include <string>

#include "fsl/config.hpp"
#include "fsl/diff_engine.hpp"
#include "fsl/metric_field.hpp"

namespace fsl {

struct CliOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::string engine;  // "", "dual" or "fd"
    double tol_scale = 1.0;
};

// exit codes: 0 success, 2 invariant failure, 3 config error
int cmd_analyze(const CliOptions& opts);
int cmd_connection(const CliOptions& opts);
int cmd_wagner(const CliOptions& opts);
int cmd_curvature(const CliOptions& opts);
int cmd_figures(const CliOptions& opts);

// shared helpers
MetricField metric_from_config(const RunConfig& cfg);
DiffEngine engine_from_config(const RunConfig& cfg, const CliOptions& opts, const MetricField& m);

}  // namespace fsl

// End-to-end checks of the command-line front end: exit codes, output files,
// and byte-determinism of the data products.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(FSL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

int failures = 0;

void check(bool ok, const std::string& what) {
    std::cout << (ok ? "  ok: " : "  FAILED: ") << what << "\n";
    if (!ok) ++failures;
}

}  // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "fsl_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    write_file(dir / "euclid.cfg",
               "[metric]\npreset = euclidean\n[grid]\nu1 = -0.5:0.5:2\nu2 = 0:0:1\n");
    write_file(dir / "bad.cfg", "[metric]\npreset = nonsense\n");
    write_file(dir / "construction.cfg",
               "[metric]\npreset = plane:expr-demo\n"
               "[construction]\nrho1 = u2\nrho2 = -u1\nseed = sqrt(y1^2 + y2^2) - 1\n"
               "[grid]\nu1 = 0.2:0.2:1\nu2 = 0.1:0.1:1\n[trace]\nstep = 0.002\nsamples = 64\n");

    check(run("analyze --config " + (dir / "euclid.cfg").string() + " --out " +
              (dir / "out1").string()) == 0,
          "analyze euclidean exits 0");
    check(fs::exists(dir / "out1" / "analyze.json"), "analyze writes a JSON summary");
    check(fs::exists(dir / "out1" / "trace_00.csv"), "analyze writes trace CSVs");
    {
        const std::string summary = slurp(dir / "out1" / "analyze.json");
        check(summary.find("\"verdict\": \"pass\"") != std::string::npos, "euclidean passes");
        check(summary.find("\"riemannianFlag\": true") != std::string::npos,
              "euclidean flagged Riemannian");
    }

    check(run("analyze --config " + (dir / "bad.cfg").string() + " --out " +
              (dir / "out2").string()) == 3,
          "malformed config exits 3");
    check(run("analyze --config " + (dir / "euclid.cfg").string() +
              " --engine bogus --out " + (dir / "out2b").string()) == 3,
          "unknown engine exits 3");

    check(run("connection --config " + (dir / "euclid.cfg").string() + " --out " +
              (dir / "out3").string()) == 0,
          "connection on euclidean exits 0");
    {
        const std::string summary = slurp(dir / "out3" / "connection.json");
        check(summary.find("\"verdict\": \"riemannian\"") != std::string::npos,
              "euclidean connection verdict is riemannian");
    }

    // expression-defined construction with a circular seed behaves like the
    // euclidean metric under the fd engine
    check(run("analyze --config " + (dir / "construction.cfg").string() + " --out " +
              (dir / "out4").string()) == 0,
          "expression construction analyze exits 0");

    check(run("wagner --config " + (dir / "euclid.cfg").string() + " --out " +
              (dir / "out5").string()) == 0,
          "wagner on euclidean exits 0");
    {
        const std::string summary = slurp(dir / "out5" / "wagner.json");
        check(summary.find("\"verdict\": \"riemannian\"") != std::string::npos,
              "euclidean wagner verdict is riemannian");
        check(fs::exists(dir / "out5" / "wagner_scatter.csv"), "wagner writes the scatter CSV");
    }

    write_file(dir / "curv.cfg",
               "[metric]\npreset = euclidean\n[curvature]\nconnection = zero\n"
               "u1 = -0.1:0.1:5\nu2 = -0.1:0.1:5\n");
    check(run("curvature --config " + (dir / "curv.cfg").string() + " --out " +
              (dir / "out6").string()) == 0,
          "curvature euclidean + zero connection exits 0");
    {
        const std::string csv = slurp(dir / "out6" / "curvature.csv");
        check(csv.find("u1,u2,kappaStar,divRho,sumResidual,Rnorm") == 0,
              "curvature CSV has the documented header");
    }

    check(run("figures --config " + (dir / "euclid.cfg").string() + " --out " +
              (dir / "fig1").string()) == 0,
          "figures exits 0");
    check(run("figures --config " + (dir / "euclid.cfg").string() + " --out " +
              (dir / "fig2").string()) == 0,
          "figures rerun exits 0");
    check(fs::exists(dir / "fig1" / "figures.csv"), "figures writes the combined CSV");
    {
        int svg_count = 0;
        for (const auto& e : fs::directory_iterator(dir / "fig1"))
            if (e.path().extension() == ".svg") ++svg_count;
        check(svg_count >= 9, "at least nine SVG frames");
        check(slurp(dir / "fig1" / "figures.csv") == slurp(dir / "fig2" / "figures.csv"),
              "figure CSV is byte-stable across runs");
        check(slurp(dir / "fig1" / "radial_t0.0000.svg") ==
                  slurp(dir / "fig2" / "radial_t0.0000.svg"),
              "SVG output is byte-stable across runs");
    }

    std::cout << (failures == 0 ? "all cli checks passed\n" : "cli checks FAILED\n");
    return failures == 0 ? 0 : 1;
}

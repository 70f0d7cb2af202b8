#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "qmem/errors.hpp"
#include "qmem/pipeline.hpp"

namespace {

struct CliState {
    std::string config_path;
    std::string figure_name;
    std::string out_dir;
    bool out_dir_set = false;
    int grid_points = 0;
    double tolerance = 0.0;
    int threads = 1;
    bool quiet = false;
};

// Precedence: --out flag, then QMEM_OUT_DIR, then the config's output
// directory, then ./out.
std::string resolve_out_dir(const CliState& cli, const std::string& config_dir) {
    if (cli.out_dir_set) return cli.out_dir;
    if (const char* env = std::getenv("QMEM_OUT_DIR"); env && *env) return env;
    if (!config_dir.empty()) return config_dir;
    return "out";
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& text) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path path = std::filesystem::path(dir) / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

qmem::RunOptions run_options(const CliState& cli) {
    qmem::RunOptions options;
    if (cli.grid_points > 0) options.grid_points = cli.grid_points;
    if (cli.tolerance > 0.0) options.tolerance = cli.tolerance;
    options.threads = cli.threads;
    return options;
}

void emit(const CliState& cli, const std::string& text) {
    if (!cli.quiet) std::cout << text;
}

int do_run(const CliState& cli) {
    const qmem::SimConfig cfg = qmem::SimConfig::load(cli.config_path);
    const std::string dir = resolve_out_dir(cli, cfg.out_dir);
    if (cfg.pipeline == qmem::PipelineKind::oracle_compare) {
        const qmem::DeviationReport report =
            qmem::run_oracle_compare(cfg, run_options(cli));
        std::ostringstream os;
        os << "rel_l2=" << report.rel_l2 << '\n'
           << "delta_w=" << report.delta_w << '\n'
           << "w_oracle=" << report.w_oracle << '\n'
           << "w_spectral=" << report.w_spectral << '\n';
        for (const std::string& w : report.warnings) os << "warning=" << w << '\n';
        write_file(dir, "oracle_compare.txt", os.str());
        emit(cli, os.str());
        return 0;
    }
    const qmem::RunResult result = qmem::run_simulation(cfg, run_options(cli));
    write_file(dir, "spectrum.csv", result.spectrum_csv());
    std::ostringstream metrics;
    metrics << result.metrics.to_text();
    for (const std::string& w : result.warnings)
        metrics << "warning=" << w << '\n';
    write_file(dir, "metrics.txt", metrics.str());
    emit(cli, metrics.str());
    return 0;
}

int do_sweep(const CliState& cli) {
    const qmem::SimConfig cfg = qmem::SimConfig::load(cli.config_path);
    const std::string csv = qmem::run_sweep(cfg, run_options(cli));
    const std::string dir = resolve_out_dir(cli, cfg.out_dir);
    write_file(dir, "sweep.csv", csv);
    emit(cli, csv);
    return 0;
}

int do_figure(const CliState& cli) {
    const auto files = qmem::reproduce_figure(cli.figure_name, run_options(cli));
    const std::string dir = resolve_out_dir(cli, "");
    for (const auto& file : files) {
        write_file(dir, file.filename, file.csv);
        if (!cli.quiet) std::cout << "wrote " << dir << '/' << file.filename << '\n';
    }
    return 0;
}

int do_oracle_compare(const CliState& cli) {
    qmem::SimConfig cfg = qmem::SimConfig::load(cli.config_path);
    const qmem::DeviationReport report =
        qmem::run_oracle_compare(cfg, run_options(cli));
    std::ostringstream os;
    os << "rel_l2=" << report.rel_l2 << '\n'
       << "delta_w=" << report.delta_w << '\n'
       << "w_oracle=" << report.w_oracle << '\n'
       << "w_spectral=" << report.w_spectral << '\n';
    for (const std::string& w : report.warnings) os << "warning=" << w << '\n';
    write_file(resolve_out_dir(cli, cfg.out_dir), "oracle_compare.txt", os.str());
    emit(cli, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon storage, retrieval, and frequency conversion in "
                 "inhomogeneously broadened media"};
    app.require_subcommand(1);

    CliState cli;
    app.add_option("--out", cli.out_dir, "Output directory (default ./out)")
        ->each([&](const std::string&) { cli.out_dir_set = true; });
    app.add_option("--grid-points", cli.grid_points,
                   "Override the number of frequency-grid points (odd)");
    app.add_option("--tolerance", cli.tolerance,
                   "Relative tolerance of adaptive quadratures");
    app.add_option("--threads", cli.threads, "Worker threads for sweeps");
    app.add_flag("--quiet", cli.quiet, "Suppress console output");

    CLI::App* run = app.add_subcommand("run", "Run a single simulation");
    run->add_option("config", cli.config_path, "INI configuration file")
        ->required();

    CLI::App* sweep = app.add_subcommand("sweep", "Run an optical-depth sweep");
    sweep->add_option("config", cli.config_path, "INI configuration file")
        ->required();

    CLI::App* figure =
        app.add_subcommand("figure", "Regenerate published curve data");
    figure->add_option("name", cli.figure_name, "fig2a, fig2b, or fig3")
        ->required();

    CLI::App* compare = app.add_subcommand(
        "oracle-compare", "Compare the spectral pipeline to the time-domain solver");
    compare->add_option("config", cli.config_path, "INI configuration file")
        ->required();

    for (CLI::App* sub : {run, sweep, figure, compare}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return do_run(cli);
        if (sweep->parsed()) return do_sweep(cli);
        if (figure->parsed()) return do_figure(cli);
        if (compare->parsed()) return do_oracle_compare(cli);
    } catch (const qmem::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qmem::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

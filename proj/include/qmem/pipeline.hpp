#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmem/config.hpp"
#include "qmem/grid.hpp"
#include "qmem/metrics.hpp"
#include "qmem/oracle.hpp"

namespace qmem {

// Command-line overrides applied on top of a SimConfig.
struct RunOptions {
    std::optional<int> grid_points;
    std::optional<double> tolerance; // relative tolerance of adaptive quadratures
    int threads = 1;
};

struct RunResult {
    MetricsReport metrics;
    SpectralField output;
    std::string config_hash;
    int precision = 12;
    std::vector<std::string> warnings;

    // omega, Re E, Im E, |E|^2 with a header row and a config-hash comment.
    std::string spectrum_csv() const;
};

// Executes a retrieve or transduce pipeline for a single parameter set.
RunResult run_simulation(const SimConfig& config, const RunOptions& options = {});

// Optical-depth sweep; returns the full CSV text (ascending rows, failures
// marked per row). Fans out across options.threads with ordered collection.
std::string run_sweep(const SimConfig& config, const RunOptions& options = {});

struct FigureFile {
    std::string filename;
    std::string csv;
};

// Regenerates the data behind the published curves (fig2a, fig2b, fig3)
// from the parameter sets embedded in their captions.
std::vector<FigureFile> reproduce_figure(const std::string& name,
                                         const RunOptions& options = {});

// Runs the requested time-domain case next to its spectral counterpart.
DeviationReport run_oracle_compare(const SimConfig& config,
                                   const RunOptions& options = {});

} // namespace qmem

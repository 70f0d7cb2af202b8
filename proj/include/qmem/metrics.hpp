#pragma once

#include <string>

#include "qmem/grid.hpp"

namespace qmem {

// Figures of merit for one simulation run.
struct MetricsReport {
    double efficiency = 0.0;
    double retrieval_probability = 0.0;
    double fidelity_f = 0.0;
    double fidelity_n = 0.0;
    double leakage = 0.0;
    bool above_capacity_threshold = false; // efficiency > 0.5
    double grid_half_width = 0.0;
    int grid_points = 0;

    std::string to_text() const; // key=value block
    static std::string csv_header(const std::string& parameter_name);
    std::string csv_row(double parameter_value, int precision = 12) const;
};

// Photon-number ratio of output to input.
double efficiency(const SpectralField& e_out, const SpectralField& e_in);

// Photon-number content of the output field.
double retrieval_probability(const SpectralField& e_out);

// Normalized spectral overlap |<out, ref>| / (||out|| ||ref||).
double fidelity(const SpectralField& e_out, const SpectralField& reference);

// Formats a double with the given number of significant digits.
std::string format_significant(double value, int digits);

} // namespace qmem

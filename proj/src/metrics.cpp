#include "qmem/metrics.hpp"

#include <cmath>
#include <sstream>

namespace qmem {

double efficiency(const SpectralField& e_out, const SpectralField& e_in) {
    const double denom = field_norm(e_in);
    if (!(denom > 0.0))
        throw std::invalid_argument("efficiency: input field has zero norm");
    return field_norm(e_out) / denom;
}

double retrieval_probability(const SpectralField& e_out) {
    return field_norm(e_out);
}

double fidelity(const SpectralField& e_out, const SpectralField& reference) {
    if (!(e_out.grid == reference.grid))
        throw std::invalid_argument("fidelity: fields live on different grids");
    const double na = field_norm(e_out);
    const double nb = field_norm(reference);
    if (!(na > 0.0) || !(nb > 0.0))
        throw std::invalid_argument("fidelity: zero-norm argument");
    const Eigen::VectorXd w = trapezoid_weights(e_out.grid);
    Complex overlap(0.0, 0.0);
    for (int i = 0; i < e_out.grid.size(); ++i)
        overlap += w(i) * std::conj(e_out.amplitude(i)) * reference.amplitude(i);
    return std::abs(overlap) / std::sqrt(na * nb);
}

std::string format_significant(double value, int digits) {
    std::ostringstream ss;
    ss.precision(digits);
    ss << value;
    return ss.str();
}

std::string MetricsReport::to_text() const {
    std::ostringstream ss;
    ss.precision(12);
    ss << "efficiency=" << efficiency << '\n'
       << "retrieval_probability=" << retrieval_probability << '\n'
       << "fidelity_f=" << fidelity_f << '\n'
       << "fidelity_n=" << fidelity_n << '\n'
       << "leakage=" << leakage << '\n'
       << "above_capacity_threshold=" << (above_capacity_threshold ? 1 : 0) << '\n'
       << "grid_half_width=" << grid_half_width << '\n'
       << "grid_points=" << grid_points << '\n';
    return ss.str();
}

std::string MetricsReport::csv_header(const std::string& parameter_name) {
    return parameter_name +
           ",retrieval_probability,efficiency,fidelity_f,fidelity_n,leakage";
}

std::string MetricsReport::csv_row(double parameter_value, int precision) const {
    std::ostringstream ss;
    ss << format_significant(parameter_value, precision) << ','
       << format_significant(retrieval_probability, precision) << ','
       << format_significant(efficiency, precision) << ','
       << format_significant(fidelity_f, precision) << ','
       << format_significant(fidelity_n, precision) << ','
       << format_significant(leakage, precision);
    return ss.str();
}

} // namespace qmem

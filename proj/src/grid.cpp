#include "qmem/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace qmem {

FrequencyGrid::FrequencyGrid(double omega_min, double omega_max, int n_points)
    : omega_min_(omega_min), omega_max_(omega_max), n_points_(n_points) {
    if (n_points < 2)
        throw std::invalid_argument("FrequencyGrid: n_points must be >= 2");
    if (!(omega_max > omega_min))
        throw std::invalid_argument("FrequencyGrid: omega_max must exceed omega_min");
    spacing_ = (omega_max_ - omega_min_) / (n_points_ - 1);
    points_ = Eigen::VectorXd::LinSpaced(n_points_, omega_min_, omega_max_);
}

FrequencyGrid make_symmetric_grid(double half_width, int n_points) {
    if (!(half_width > 0.0))
        throw std::invalid_argument("make_symmetric_grid: half_width must be positive");
    if (n_points < 3 || n_points % 2 == 0)
        throw std::invalid_argument("make_symmetric_grid: n_points must be odd and >= 3");
    return FrequencyGrid(-half_width, half_width, n_points);
}

SpaceGrid::SpaceGrid(double length, int n_points)
    : length_(length), n_points_(n_points) {
    if (!(length > 0.0))
        throw std::invalid_argument("SpaceGrid: length must be positive");
    if (n_points < 2)
        throw std::invalid_argument("SpaceGrid: n_points must be >= 2");
    spacing_ = length_ / (n_points_ - 1);
    points_ = Eigen::VectorXd::LinSpaced(n_points_, 0.0, length_);
}

Eigen::VectorXd trapezoid_weights(const FrequencyGrid& grid) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(grid.size(), grid.spacing());
    w(0) *= 0.5;
    w(grid.size() - 1) *= 0.5;
    return w;
}

double field_norm(const SpectralField& field) {
    const Eigen::VectorXd w = trapezoid_weights(field.grid);
    return (w.array() * field.amplitude.array().abs2()).sum();
}

SpectralField gaussian_field(const FrequencyGrid& grid, double width, double center,
                             double t_emit) {
    if (!(width > 0.0))
        throw std::invalid_argument("gaussian_field: width must be positive");
    SpectralField f(grid);
    for (int i = 0; i < grid.size(); ++i) {
        const double w = grid.point(i);
        const double x = (w - center) / width;
        f.amplitude(i) = std::exp(-x * x) * std::exp(Complex(0.0, w * t_emit));
    }
    const double n = field_norm(f);
    if (n > 0.0) f.amplitude /= std::sqrt(n);
    return f;
}

} // namespace qmem

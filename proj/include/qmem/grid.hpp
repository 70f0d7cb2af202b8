#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace qmem {

using Complex = std::complex<double>;

// Uniform grid of angular frequencies (rad/ns).
class FrequencyGrid {
public:
    FrequencyGrid(double omega_min, double omega_max, int n_points);

    double omega_min() const { return omega_min_; }
    double omega_max() const { return omega_max_; }
    int size() const { return n_points_; }
    double spacing() const { return spacing_; }
    double point(int i) const { return omega_min_ + spacing_ * i; }
    const Eigen::VectorXd& points() const { return points_; }

    bool operator==(const FrequencyGrid& other) const {
        return omega_min_ == other.omega_min_ && omega_max_ == other.omega_max_ &&
               n_points_ == other.n_points_;
    }

private:
    double omega_min_;
    double omega_max_;
    int n_points_;
    double spacing_;
    Eigen::VectorXd points_;
};

// Symmetric grid about omega = 0; n_points must be odd so that 0 is a grid
// point (CRIB kernels couple omega to -omega').
FrequencyGrid make_symmetric_grid(double half_width, int n_points);

// Spatial grid on [0, L], both endpoints included.
class SpaceGrid {
public:
    SpaceGrid(double length, int n_points);

    double length() const { return length_; }
    int size() const { return n_points_; }
    double spacing() const { return spacing_; }
    double point(int i) const { return spacing_ * i; }
    const Eigen::VectorXd& points() const { return points_; }

private:
    double length_;
    int n_points_;
    double spacing_;
    Eigen::VectorXd points_;
};

// Complex photon amplitude on a frequency grid, normalized such that
// the trapezoid estimate of the squared-norm integral is a photon number.
struct SpectralField {
    FrequencyGrid grid;
    Eigen::VectorXcd amplitude;
    std::vector<std::string> warnings; // filled e.g. on under-resolved kernel ridges

    SpectralField(FrequencyGrid g, Eigen::VectorXcd a)
        : grid(std::move(g)), amplitude(std::move(a)) {
        if (amplitude.size() != grid.size())
            throw std::invalid_argument("SpectralField: amplitude size does not match grid");
    }
    explicit SpectralField(FrequencyGrid g)
        : grid(std::move(g)), amplitude(Eigen::VectorXcd::Zero(grid.size())) {}
};

// Trapezoid estimate of the photon-number integral of |amplitude|^2.
double field_norm(const SpectralField& field);

// Trapezoid weights for a uniform grid.
Eigen::VectorXd trapezoid_weights(const FrequencyGrid& grid);

// Unit-normalized Gaussian wave packet  N exp(-(w-center)^2/width^2) e^{i w t_emit}.
SpectralField gaussian_field(const FrequencyGrid& grid, double width, double center = 0.0,
                             double t_emit = 0.0);

} // namespace qmem

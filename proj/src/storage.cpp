#include "qmem/storage.hpp"

#include <cmath>
#include <fstream>

namespace qmem {

namespace {

double mu0_of(const TransitionParams& params, const EmitterDistribution& dist) {
    if (std::isfinite(params.mu0)) return params.mu0;
    return mu0_for_depth(params.d, dist.peak_density(), params.length, params.c);
}

} // namespace

double SpinWave::stored_norm(const EmitterDistribution& dist) const {
    const double L = params.length;
    Eigen::VectorXd wz = Eigen::VectorXd::Constant(zgrid.size(), zgrid.spacing());
    wz(0) *= 0.5;
    wz(zgrid.size() - 1) *= 0.5;
    double total = 0.0;
    for (int i = 0; i < zgrid.size(); ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j + 1 < deltas.size(); ++j) {
            const double h = deltas(j + 1) - deltas(j);
            const double a =
                dist.evaluate(zgrid.point(i), deltas(j)) * std::norm(values(i, j));
            const double b =
                dist.evaluate(zgrid.point(i), deltas(j + 1)) * std::norm(values(i, j + 1));
            row += 0.5 * h * (a + b);
        }
        total += wz(i) * row;
    }
    return total * L / params.c;
}

void SpinWave::dump(const std::string& path) const {
    std::ofstream out(path);
    out.precision(12);
    out << "# z delta re_s im_s\n";
    for (int i = 0; i < zgrid.size(); ++i)
        for (Eigen::Index j = 0; j < deltas.size(); ++j)
            out << zgrid.point(i) << ' ' << deltas(j) << ' ' << values(i, j).real()
                << ' ' << values(i, j).imag() << '\n';
}

SpinWave store_spin_wave(const SpectralField& e_in, const TransitionParams& params,
                         const EmitterDistribution& dist, double t0, double delta_t,
                         const SpaceGrid& zgrid, const Eigen::VectorXd& deltas) {
    if (params.c_prime > params.c) {
        const double bound = params.length * (1.0 / params.c - 1.0 / params.c_prime);
        if (delta_t < bound - 1e-12)
            throw std::invalid_argument(
                "store_spin_wave: delta_t violates the temporal ordering bound");
    }
    const double L = params.length;
    const double gamma = params.gamma;
    const double mu0 = mu0_of(params, dist);
    const FrequencyGrid& grid = e_in.grid;

    const bool separable = dist.is_separable();
    Eigen::VectorXcd Hgrid;
    if (separable) Hgrid = tabulate_H(dist.spectral(), gamma, grid);

    SpinWave sw{zgrid, deltas, Eigen::MatrixXcd::Zero(zgrid.size(), deltas.size()),
                t0, delta_t, params};

    Eigen::VectorXcd wline(grid.size());
    for (int i = 0; i < zgrid.size(); ++i) {
        const double z = zgrid.point(i);
        for (int m = 0; m < grid.size(); ++m) {
            const double w = grid.point(m);
            const Complex h = separable
                                  ? dist.spatial().mass_above(z) * Hgrid(m)
                                  : response_h(z, w, dist, gamma);
            const Complex phase =
                std::exp(Complex(0.0, -w * (t0 + delta_t) -
                                          w * (L - z) * params.inverse_ceff));
            wline(m) = e_in.amplitude(m) * phase * std::exp(-params.d * h);
        }
        const Complex grating = std::exp(Complex(0.0, params.delta_k * z));
        for (Eigen::Index j = 0; j < deltas.size(); ++j) {
            const Complex pole(deltas(j), -0.5 * gamma);
            const Complex integral = cauchy_trapezoid(grid.points(), wline, pole);
            // kernel 1/(i(Delta-omega)+gamma/2) = i/(omega - pole)
            sw.values(i, j) = Complex(0.0, -mu0) / std::sqrt(2.0 * M_PI) * grating *
                              Complex(0.0, 1.0) * integral;
        }
    }
    return sw;
}

Complex storage_response(double z, double t, double delta, const TransitionParams& params,
                         const EmitterDistribution& dist, const FrequencyGrid& grid) {
    const double L = params.length;
    const double gamma = params.gamma;
    const double mu0 = mu0_of(params, dist);
    const bool separable = dist.is_separable();
    Eigen::VectorXcd Hgrid;
    if (separable) Hgrid = tabulate_H(dist.spectral(), gamma, grid);

    const double tau = t - (L - z) / params.c;
    Eigen::VectorXcd g(grid.size());
    for (int m = 0; m < grid.size(); ++m) {
        const double w = grid.point(m);
        const Complex h = separable ? dist.spatial().mass_above(z) * Hgrid(m)
                                    : response_h(z, w, dist, gamma);
        g(m) = std::exp(Complex(0.0, -w * tau)) * std::exp(-params.d * h);
    }
    const Complex pole(delta, -0.5 * gamma);
    const Complex integral = cauchy_trapezoid(grid.points(), g, pole);
    return mu0 / (2.0 * M_PI) * Complex(0.0, 1.0) * integral;
}

double storage_leakage(const SpectralField& e_in, const TransitionParams& params,
                       const EmitterDistribution& dist) {
    const double in_norm = field_norm(e_in);
    if (!(in_norm > 0.0))
        throw std::invalid_argument("storage_leakage: zero input field");
    const SpectralField intensity =
        transmitted_intensity(e_in, dist, params.d, params.gamma);
    const Eigen::VectorXd w = trapezoid_weights(intensity.grid);
    const double leaked = (w.array() * intensity.amplitude.array().real()).sum();
    return leaked / in_norm;
}

} // namespace qmem

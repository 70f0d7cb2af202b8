#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "qmem/grid.hpp"
#include "qmem/profile.hpp"
#include "qmem/quadrature.hpp"

namespace qmem {

// H(omega) = (1/2 pi n0) \int dDelta n(Delta) / (i (Delta - omega) + gamma/2).
// Takes the value ~1/2 for a band much wider than the photon spectrum.
Complex response_H(const SpectralProfile& profile, double gamma, double omega,
                   const QuadOptions& opts = {});

// h(z, -i omega) = (1/2 pi n0) \int_z^L dz' \int dDelta G(z',Delta)/(i(Delta-omega)+gamma/2).
// Separable distributions factorize into mass_above(z) * H(omega).
Complex response_h(double z, double omega, const EmitterDistribution& dist, double gamma,
                   const QuadOptions& opts = {});

// C(omega) = (1/2 pi n0) \int dDelta n(Delta) f(Delta) / (i (Delta - omega) + gamma/2).
Complex response_C(const SpectralProfile& profile,
                   const std::function<Complex(double)>& f, double gamma, double omega,
                   const QuadOptions& opts = {});

Eigen::VectorXcd tabulate_H(const SpectralProfile& profile, double gamma,
                            const FrequencyGrid& grid, const QuadOptions& opts = {});
Eigen::VectorXcd tabulate_C(const SpectralProfile& profile,
                            const std::function<Complex(double)>& f, double gamma,
                            const FrequencyGrid& grid, const QuadOptions& opts = {});

// Write-once cache of tabulated H (and C) vectors keyed on
// (profile identity, gamma, grid); safe for concurrent lookups.
class ResponseCache {
public:
    const Eigen::VectorXcd& H(const SpectralProfile& profile, double gamma,
                              const FrequencyGrid& grid);
    const Eigen::VectorXcd& C(const SpectralProfile& profile,
                              const std::function<Complex(double)>& f,
                              const std::string& f_key, double gamma,
                              const FrequencyGrid& grid);

private:
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Eigen::VectorXcd>> table_;
};

// Process-wide cache shared by the evaluators that tabulate H and C on
// output grids (sweeps rebuild kernels for many optical depths).
ResponseCache& global_response_cache();

// I(omega) = |E_in(omega)|^2 exp(-2 d Re H(omega)); the transmitted
// (leaked) intensity spectrum during storage.
SpectralField transmitted_intensity(const SpectralField& e_in,
                                    const EmitterDistribution& dist, double d,
                                    double gamma);

} // namespace qmem

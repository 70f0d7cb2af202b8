#pragma once

#include <string>

#include "qmem/grid.hpp"
#include "qmem/profile.hpp"
#include "qmem/response.hpp"
#include "qmem/transition.hpp"

namespace qmem {

// Collective spin-wave amplitude S(z, Delta) after the storage pi-pulse.
struct SpinWave {
    SpaceGrid zgrid;
    Eigen::VectorXd deltas;
    Eigen::MatrixXcd values; // (z index, Delta index)
    double t0 = 0.0;
    double delta_t = 0.0;
    TransitionParams params;

    // (L/c) \int dz \int dDelta G(z,Delta) |S|^2 by trapezoid.
    double stored_norm(const EmitterDistribution& dist) const;

    void dump(const std::string& path) const; // z, Delta, Re S, Im S
};

// Maps the incident photon spectrum onto the spin wave.
// delta_t must satisfy the ordering bound L (1/c - 1/c') when c' > c.
SpinWave store_spin_wave(const SpectralField& e_in, const TransitionParams& params,
                         const EmitterDistribution& dist, double t0, double delta_t,
                         const SpaceGrid& zgrid, const Eigen::VectorXd& deltas);

// Storage response function F(z, t; Delta): inverse transform of the medium
// response along u = -i omega. Vanishes for t < (L - z)/c.
Complex storage_response(double z, double t, double delta, const TransitionParams& params,
                         const EmitterDistribution& dist, const FrequencyGrid& grid);

// Fraction of the input photon energy transmitted through the medium.
double storage_leakage(const SpectralField& e_in, const TransitionParams& params,
                       const EmitterDistribution& dist);

} // namespace qmem

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qmem/grid.hpp"
#include "qmem/profile.hpp"
#include "qmem/transducer.hpp"
#include "qmem/transition.hpp"

namespace qmem {

// Resolution of the time-domain integrator. cfl = 1 advects exactly.
struct OracleSettings {
    int nz = 256;
    int n_delta = 96;
    double cfl = 0.9;
};

// Complex input envelope at the entry face z = L.
struct TimeDomainInput {
    std::function<Complex(double)> amplitude;
    double t_center = 0.0;
    double half_window = 0.0; // amplitude negligible outside t_center +- this
};

// Matches the spectral-domain Gaussian wave packet of the same width whose
// emission time is t_center.
TimeDomainInput gaussian_input(double width, double t_center);

struct OracleResult {
    Eigen::VectorXd times;
    Eigen::VectorXcd boundary_field;  // recorded exit-face amplitude
    double transmitted_fraction = 0.0;
    double final_excitation = 0.0;
    std::vector<std::string> warnings;

    // (1/sqrt(2 pi)) \int dt e^{i omega t} E(t) on the given grid.
    SpectralField spectrum(const FrequencyGrid& grid) const;
    double energy() const; // \int dt |E(t)|^2
    void dump(const std::string& path) const; // t, Re E, Im E
};

// Storage only: drive the backward field, record the transmitted field at
// z = 0 until t_end.
OracleResult oracle_storage(const TransitionParams& params,
                            const EmitterDistribution& dist,
                            const TimeDomainInput& input, double t_end,
                            const OracleSettings& settings = {});

// Full echo sequence: backward storage, counter-propagating pi-pulse front at
// t0 + delta_t + (L-z)/c', detuning reversal, forward pi-pulse front at
// t_storage + z/c', forward emission recorded at z = L.
OracleResult oracle_crib(const TransitionParams& storage,
                         const TransitionParams& retrieval,
                         const EmitterDistribution& dist,
                         const TimeDomainInput& input, double t0, double delta_t,
                         double t_storage, double record_window,
                         const OracleSettings& settings = {});

// Microwave-stored excitation f(Delta) transferred to the polarization by a
// forward front at z/c', then emitted; recorded at z = L.
OracleResult oracle_transduction(const TransitionParams& params,
                                 const EmitterDistribution& dist,
                                 const StoredExcitation& excitation,
                                 double record_window,
                                 const OracleSettings& settings = {});

// Deviation between the time-domain and spectral formulations.
struct DeviationReport {
    double rel_l2 = 0.0;   // relative L2 distance of the output spectra
    double delta_w = 0.0;  // |W_oracle - W_spectral|
    double w_oracle = 0.0;
    double w_spectral = 0.0;
    std::vector<std::string> warnings;
};

DeviationReport compare_spectra(const SpectralField& oracle_side,
                                const SpectralField& spectral_side);

} // namespace qmem

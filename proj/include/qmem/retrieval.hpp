#pragma once

#include <optional>
#include <string>

#include "qmem/grid.hpp"
#include "qmem/profile.hpp"
#include "qmem/response.hpp"
#include "qmem/transition.hpp"

namespace qmem {

// Relation between the detunings seen during storage and retrieval.
struct BroadeningMap {
    enum class Kind { negate, identity, uncorrelated };

    Kind kind = Kind::negate;
    std::optional<SpectralProfile> g0; // retrieval-detuning density (uncorrelated)

    static BroadeningMap negate() { return {Kind::negate, std::nullopt}; }
    static BroadeningMap identity() { return {Kind::identity, std::nullopt}; }
    static BroadeningMap uncorrelated(SpectralProfile density) {
        return {Kind::uncorrelated, std::move(density)};
    }
};

enum class KernelProvenance { general, crib_uniform, ideal };

// Two-frequency retrieval kernel S(omega, omega'). When the kernel carries
// the echo ridge 1/(gamma - i(omega + omega')), has_ridge is set and
// apply_kernel integrates the ridge factor analytically per cell.
struct KernelMatrix {
    FrequencyGrid out_grid;
    FrequencyGrid in_grid;
    Eigen::MatrixXcd entries; // (out index, in index)
    KernelProvenance provenance = KernelProvenance::general;
    bool has_ridge = false;
    double ridge_gamma = 0.0;

    void export_text(const std::string& path) const; // omega, omega', Re, Im
};

// Nested z- and Delta-quadrature of the full kernel. dist_s enters through
// the storage absorption exponent, dist_r through the emitting density.
KernelMatrix build_kernel_general(const TransitionParams& storage,
                                  const TransitionParams& retrieval,
                                  const EmitterDistribution& dist_s,
                                  const EmitterDistribution& dist_r,
                                  const BroadeningMap& map, double t_storage,
                                  const FrequencyGrid& out_grid,
                                  const FrequencyGrid& in_grid,
                                  const QuadOptions& opts = {});

// Closed form for spatially-uniform distributions in the broad-band limit
// (absorption response fixed at 1/2); CRIB detuning reversal assumed.
KernelMatrix build_kernel_crib_uniform(const TransitionParams& storage,
                                       const TransitionParams& retrieval,
                                       double t_storage,
                                       const FrequencyGrid& out_grid,
                                       const FrequencyGrid& in_grid);

// Matched storage/retrieval transitions (single Lambda configuration).
KernelMatrix build_kernel_ideal(const TransitionParams& params, double t_storage,
                                const FrequencyGrid& out_grid,
                                const FrequencyGrid& in_grid);

// E_out(omega) = (1/2 pi) \int domega' S(omega, omega') E_in(omega').
SpectralField apply_kernel(const KernelMatrix& kernel, const SpectralField& e_in);

} // namespace qmem

#pragma once

#include <string>

#include "qmem/grid.hpp"
#include "qmem/profile.hpp"
#include "qmem/response.hpp"
#include "qmem/transition.hpp"

namespace qmem {

// Spin-wave amplitude f(Delta) left on the stable transition by the
// microwave storage step; z-independent by assumption.
class StoredExcitation {
public:
    // Unnormalized Gaussian  e^{-Delta^2/width^2} e^{i Delta t_emit}.
    static StoredExcitation gaussian(double width, double t_emit);
    // Three-column text table: Delta, Re f, Im f. Linear interpolation.
    static StoredExcitation from_file(const std::string& path);
    static StoredExcitation tabulated(Eigen::VectorXd deltas, Eigen::VectorXcd values);

    Complex operator()(double delta) const;
    double scale() const { return scale_; }
    double width() const { return width_; }
    double t_emit() const { return t_emit_; }
    bool is_gaussian() const { return gaussian_; }
    std::string cache_key() const;
    std::vector<double> breakpoints() const;

    friend StoredExcitation normalize_excitation(const StoredExcitation&,
                                                 const EmitterDistribution&,
                                                 const TransitionParams&);

private:
    StoredExcitation() = default;
    bool gaussian_ = true;
    double width_ = 1.0;
    double t_emit_ = 0.0;
    double scale_ = 1.0;
    Eigen::VectorXd tab_deltas_;
    Eigen::VectorXcd tab_values_;
};

// Solves the transfer-normalization integral (L/c) \int dDelta n |f|^2 = 1.
StoredExcitation normalize_excitation(const StoredExcitation& raw,
                                      const EmitterDistribution& dist,
                                      const TransitionParams& params);

// Output spectrum by nested z- and Delta-quadrature; supports z-dependent
// distributions and a nonzero phase grating delta_k.
SpectralField mw_output_general(const StoredExcitation& f,
                                const EmitterDistribution& dist,
                                const TransitionParams& params,
                                const FrequencyGrid& out_grid,
                                bool include_propagation_phase = false,
                                const QuadOptions& opts = {});

// Closed form for a spatially-uniform distribution (delta_k must vanish).
SpectralField mw_output_uniform(const StoredExcitation& f,
                                const SpectralProfile& profile,
                                const TransitionParams& params,
                                const FrequencyGrid& out_grid,
                                bool include_propagation_phase = false,
                                const QuadOptions& opts = {});

enum class TransducerRegime { low_d, large_cutoff };

// Leading-order forms: low_d (sinc spectrum, d << 1) and large_cutoff
// (group velocities matched on the photon bandwidth scale).
SpectralField mw_output_approx(const StoredExcitation& f,
                               const SpectralProfile& profile,
                               const TransitionParams& params,
                               const FrequencyGrid& out_grid,
                               TransducerRegime regime,
                               bool include_propagation_phase = false,
                               const QuadOptions& opts = {});

} // namespace qmem

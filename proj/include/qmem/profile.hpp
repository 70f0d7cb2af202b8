#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qmem/grid.hpp"

namespace qmem {

enum class ProfileShape { gaussian, sech, lorentzian, uniform, tabulated };

ProfileShape profile_shape_from_string(const std::string& name);
std::string to_string(ProfileShape shape);

// Normalized spectral density of emitters n(Delta).
//
// Closed-form shapes (width Gamma, centered at `center`):
//   gaussian    N exp(-x^2/Gamma^2)
//   sech        N sech(sqrt(pi) x / Gamma)
//   lorentzian  N / (x^2 + (Gamma/sqrt(pi))^2)
//   uniform     N on |x| <= sqrt(pi) Gamma / 2
// All four have peak density 1/(sqrt(pi) Gamma).
class SpectralProfile {
public:
    SpectralProfile(ProfileShape shape, double width, double center = 0.0);

    // Tabulated profile: linear interpolation between samples, renormalized
    // on construction.
    static SpectralProfile tabulated(Eigen::VectorXd deltas, Eigen::VectorXd weights);
    static SpectralProfile from_file(const std::string& path);

    double density(double delta) const;   // n(Delta) >= 0
    double peak_density() const;          // n0 = max over Delta
    double width() const { return width_; }
    double center() const { return center_; }
    ProfileShape shape() const { return shape_; }

    // Truncation domain: closed interval outside which the density is zero
    // or numerically negligible (lorentzian tails extend to 200 Gamma).
    std::pair<double, double> support() const;

    // Interior points quadratures should split at (band edges, table knots).
    std::vector<double> breakpoints() const;

    const Eigen::VectorXd& table_deltas() const { return tab_deltas_; }
    const Eigen::VectorXd& table_values() const { return tab_values_; }

    // Stable identity string for caching.
    std::string cache_key() const;

private:
    SpectralProfile() = default;

    ProfileShape shape_ = ProfileShape::gaussian;
    double width_ = 1.0;
    double center_ = 0.0;
    double norm_ = 1.0; // closed-form normalization constant
    Eigen::VectorXd tab_deltas_;
    Eigen::VectorXd tab_values_;
};

// make_profile in the Fig. 3 parametrization.
SpectralProfile make_profile(ProfileShape shape, double width, double center = 0.0);

// Convolution over Delta0 + Delta1 = Delta of a reversible and an
// irreversible broadening density; returns a normalized tabulated profile.
SpectralProfile compose_broadening(const SpectralProfile& reversible,
                                   const SpectralProfile& irreversible);

// Normalized linear density of emitters along z in [0, L].
class SpatialProfile {
public:
    static SpatialProfile uniform(double length);
    static SpatialProfile tabulated(double length, Eigen::VectorXd zs, Eigen::VectorXd weights);

    double density(double z) const;            // n~(z)
    double length() const { return length_; }
    bool is_uniform() const { return uniform_; }
    // Integral of the density over [z, L] (enters h(z, u)).
    double mass_above(double z) const;

private:
    SpatialProfile() = default;
    double length_ = 1.0;
    bool uniform_ = true;
    Eigen::VectorXd tab_z_;
    Eigen::VectorXd tab_values_;
    Eigen::VectorXd tab_cumulative_; // cumulative mass up to each knot
};

// Emitters' distribution G(z, Delta); separable or fully tabulated.
class EmitterDistribution {
public:
    static EmitterDistribution separable(SpatialProfile spatial, SpectralProfile spectral);
    static EmitterDistribution tabulated(Eigen::VectorXd zs, Eigen::VectorXd deltas,
                                         Eigen::MatrixXd values); // values(i,j)=G(z_i,Delta_j)

    bool is_separable() const { return separable_; }
    double length() const { return spatial_->length(); }

    double evaluate(double z, double delta) const;
    SpectralProfile marginal_spectral() const;
    SpatialProfile marginal_spatial() const;
    double peak_density() const; // n0 of the spectral marginal

    const SpatialProfile& spatial() const;
    const SpectralProfile& spectral() const;

private:
    EmitterDistribution() = default;

    bool separable_ = true;
    std::optional<SpatialProfile> spatial_;
    std::optional<SpectralProfile> spectral_;
    // tabulated storage
    Eigen::VectorXd tab_z_, tab_delta_;
    Eigen::MatrixXd tab_values_;
};

double peak_density(const EmitterDistribution& dist);

} // namespace qmem

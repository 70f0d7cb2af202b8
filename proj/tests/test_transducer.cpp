#include <doctest.h>

#include <cmath>

#include "qmem/metrics.hpp"
#include "qmem/transducer.hpp"

using namespace qmem;

namespace {

TransitionParams make_params(double d, double cutoff = -2.0 * M_PI * 30.0,
                             double c = 0.01) {
    TransitionSpec s;
    s.gamma = 2.0 * M_PI * 0.01;
    s.length = 0.01;
    s.c = c;
    s.c_prime = c;
    s.d = d;
    s.omega_char = cutoff;
    return derive(s);
}

EmitterDistribution medium(const SpectralProfile& n) {
    return EmitterDistribution::separable(SpatialProfile::uniform(0.01), n);
}

} // namespace

TEST_CASE("excitation normalization on a uniform band") {
    // flat f over a uniform density integrates to (L/c) scale^2
    const double Gamma = 2.0 * M_PI * 5.0;
    const SpectralProfile n(ProfileShape::uniform, Gamma);
    const auto dist = medium(n);
    const auto params = make_params(1.0);
    Eigen::VectorXd deltas(2);
    deltas << -1e4, 1e4; // spans the whole band
    Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(2);
    const StoredExcitation f =
        normalize_excitation(StoredExcitation::tabulated(deltas, ones), dist, params);
    CHECK(f.scale() * f.scale() ==
          doctest::Approx(params.c / params.length).epsilon(1e-6));
}

TEST_CASE("normalization is invariant under rescaling of the raw excitation") {
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    const auto dist = medium(n);
    const auto params = make_params(1.0);
    // zero emission time: a phase ramp on the table would add a modulus
    // interpolation error far above the budget below
    const StoredExcitation a = normalize_excitation(
        StoredExcitation::gaussian(2.0 * M_PI * 3.0, 0.0), dist, params);
    Eigen::VectorXd deltas = Eigen::VectorXd::LinSpaced(4001, -100.0, 100.0);
    Eigen::VectorXcd scaled(4001);
    for (int i = 0; i < 4001; ++i)
        scaled(i) = 5.0 * StoredExcitation::gaussian(2.0 * M_PI * 3.0, 0.0)(deltas(i));
    const StoredExcitation b =
        normalize_excitation(StoredExcitation::tabulated(deltas, scaled), dist, params);
    // budget: linear interpolation of the table vs the analytic gaussian
    for (double x : {0.0, 1.7, -6.3})
        CHECK(std::abs(a(x) - b(x)) < 1e-5 * std::abs(a(0.0)));
}

TEST_CASE("a vanishing stored excitation emits nothing") {
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    Eigen::VectorXd deltas(3);
    deltas << -100.0, 0.0, 100.0;
    const StoredExcitation zero =
        StoredExcitation::tabulated(deltas, Eigen::VectorXcd::Zero(3));
    const FrequencyGrid grid = make_symmetric_grid(40.0, 201);
    const SpectralField out = mw_output_uniform(zero, n, make_params(2.0), grid);
    CHECK(field_norm(out) == 0.0);
}

TEST_CASE("general quadrature agrees with the closed uniform-medium form") {
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    const auto dist = medium(n);
    const auto params = make_params(1.5);
    const StoredExcitation f = normalize_excitation(
        StoredExcitation::gaussian(2.0 * M_PI * 3.0, 1.0), dist, params);
    const FrequencyGrid grid = make_symmetric_grid(8.0 * 2.0 * M_PI * 3.0, 801);
    const SpectralField closed = mw_output_uniform(f, n, params, grid);
    const SpectralField general = mw_output_general(f, dist, params, grid);
    const double ref = std::sqrt(field_norm(closed));
    double diff2 = 0.0;
    const Eigen::VectorXd w = trapezoid_weights(grid);
    for (int i = 0; i < grid.size(); ++i)
        diff2 += w(i) * std::norm(closed.amplitude(i) - general.amplitude(i));
    CHECK(std::sqrt(diff2) / ref < 1e-6);
}

TEST_CASE("the small-depth expansion matches the full spectrum at d = 0.01") {
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    const auto params = make_params(0.01);
    const auto dist = medium(n);
    const StoredExcitation f = normalize_excitation(
        StoredExcitation::gaussian(2.0 * M_PI, 1.0), dist, params);
    const FrequencyGrid grid = make_symmetric_grid(8.0 * 2.0 * M_PI, 401);
    const SpectralField full = mw_output_uniform(f, n, params, grid);
    const SpectralField lowd =
        mw_output_approx(f, n, params, grid, TransducerRegime::low_d);
    const double peak = full.amplitude.cwiseAbs().maxCoeff();
    for (int i = 0; i < grid.size(); ++i) {
        if (std::abs(full.amplitude(i)) < 0.05 * peak) continue;
        CHECK(std::abs(lowd.amplitude(i) - full.amplitude(i)) <
              0.05 * std::abs(full.amplitude(i)));
    }
}

TEST_CASE("the matched-velocity expansion matches when the cutoff is huge") {
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    const auto params = make_params(2.0, -2.0 * M_PI * 3e4);
    const auto dist = medium(n);
    const StoredExcitation f = normalize_excitation(
        StoredExcitation::gaussian(2.0 * M_PI, 1.0), dist, params);
    const FrequencyGrid grid = make_symmetric_grid(8.0 * 2.0 * M_PI, 401);
    const SpectralField full = mw_output_uniform(f, n, params, grid);
    const SpectralField approx =
        mw_output_approx(f, n, params, grid, TransducerRegime::large_cutoff);
    const double peak = full.amplitude.cwiseAbs().maxCoeff();
    for (int i = 0; i < grid.size(); ++i) {
        if (std::abs(full.amplitude(i)) < 0.05 * peak) continue;
        CHECK(std::abs(approx.amplitude(i) - full.amplitude(i)) <
              0.01 * std::abs(full.amplitude(i)));
    }
}

TEST_CASE("the emission probability does not depend on the chosen group velocity") {
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    const FrequencyGrid grid = make_symmetric_grid(8.0 * 2.0 * M_PI * 3.0, 801);
    double w[2];
    int idx = 0;
    for (double c : {0.01, 0.3}) {
        const auto params = make_params(2.0, -2.0 * M_PI * 30.0, c);
        const auto dist = medium(n);
        const StoredExcitation f = normalize_excitation(
            StoredExcitation::gaussian(2.0 * M_PI * 3.0, 1.0), dist, params);
        w[idx++] = field_norm(mw_output_uniform(f, n, params, grid));
    }
    CHECK(w[0] == doctest::Approx(w[1]).epsilon(1e-8));
}

TEST_CASE("the exit propagation phase changes no moduli") {
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    const auto params = make_params(2.0);
    const auto dist = medium(n);
    const StoredExcitation f = normalize_excitation(
        StoredExcitation::gaussian(2.0 * M_PI, 1.0), dist, params);
    const FrequencyGrid grid = make_symmetric_grid(8.0 * 2.0 * M_PI, 401);
    const SpectralField plain = mw_output_uniform(f, n, params, grid, false);
    const SpectralField phased = mw_output_uniform(f, n, params, grid, true);
    for (int i = 0; i < grid.size(); ++i)
        CHECK(std::abs(phased.amplitude(i)) ==
              doctest::Approx(std::abs(plain.amplitude(i))).epsilon(1e-12));
    CHECK(field_norm(phased) == doctest::Approx(field_norm(plain)).epsilon(1e-12));
}

TEST_CASE("a phase grating requires the general evaluator") {
    TransitionSpec s;
    s.gamma = 2.0 * M_PI * 0.01;
    s.length = 0.01;
    s.c = 0.01;
    s.c_prime = 0.01;
    s.d = 1.0;
    s.k = 0.0;
    s.k_prime = 300.0; // delta_k != 0
    const auto params = derive(s);
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    const StoredExcitation f = StoredExcitation::gaussian(2.0 * M_PI, 1.0);
    const FrequencyGrid grid = make_symmetric_grid(40.0, 101);
    CHECK_THROWS_AS(mw_output_uniform(f, n, params, grid), std::invalid_argument);
    // the grating suppresses the collectively enhanced emission
    const auto dist = medium(n);
    const auto matched = make_params(1.0);
    const StoredExcitation fn = normalize_excitation(f, dist, matched);
    const double w_matched = field_norm(mw_output_general(fn, dist, matched, grid));
    const double w_grating = field_norm(mw_output_general(fn, dist, params, grid));
    CHECK(w_grating < 0.5 * w_matched);
}

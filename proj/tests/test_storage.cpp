#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qmem/storage.hpp"

using namespace qmem;

namespace {

TransitionParams make_params(double d, double gamma) {
    TransitionSpec s;
    s.gamma = gamma;
    s.length = 0.01;
    s.c = 0.01;
    s.c_prime = 0.01;
    s.d = d;
    return derive(s);
}

EmitterDistribution gaussian_medium(double width) {
    return EmitterDistribution::separable(SpatialProfile::uniform(0.01),
                                          SpectralProfile(ProfileShape::gaussian, width));
}

// Detuning nodes with a dense core and logarithmic wings; the spin-wave
// wings fall off as 1/Delta^2 and still carry a visible share of the norm.
Eigen::VectorXd core_and_wings(double core, double outer, int n_core, int n_wing) {
    std::vector<double> pts;
    for (int i = 0; i < n_core; ++i)
        pts.push_back(-core + 2.0 * core * i / (n_core - 1));
    const double ratio = std::pow(outer / core, 1.0 / n_wing);
    double x = core;
    for (int i = 0; i < n_wing; ++i) {
        x *= ratio;
        pts.push_back(x);
        pts.push_back(-x);
    }
    std::sort(pts.begin(), pts.end());
    return Eigen::Map<Eigen::VectorXd>(pts.data(), static_cast<Eigen::Index>(pts.size()));
}

} // namespace

TEST_CASE("a zero input field stores a zero spin wave") {
    const auto params = make_params(2.0, 2.0 * M_PI * 0.01);
    const auto dist = gaussian_medium(2.0 * M_PI * 3.0);
    SpectralField zero(make_symmetric_grid(40.0, 401));
    const SpaceGrid zgrid(0.01, 17);
    Eigen::VectorXd deltas = Eigen::VectorXd::LinSpaced(41, -20.0, 20.0);
    const SpinWave sw = store_spin_wave(zero, params, dist, 0.0, 0.0, zgrid, deltas);
    CHECK(sw.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(sw.stored_norm(dist) == 0.0);
}

TEST_CASE("stored norm and leakage account for the whole photon") {
    // negligible polarization decay; absorbed + transmitted ~ 1
    const double gamma = 2.0 * M_PI * 1e-4;
    const auto params = make_params(2.0, gamma);
    const double Gamma = 2.0 * M_PI * 3.0;
    const auto dist = gaussian_medium(Gamma);
    const FrequencyGrid grid = make_symmetric_grid(8.0 * Gamma, 4001);
    const SpectralField e_in = gaussian_field(grid, 1.0);
    const SpaceGrid zgrid(0.01, 41);
    const Eigen::VectorXd deltas = core_and_wings(12.0, 8.0 * Gamma, 1201, 300);
    // the write must complete only after the pulse has fully traversed the
    // medium (transit 1 ns plus a few temporal widths of the photon)
    const SpinWave sw = store_spin_wave(e_in, params, dist, 0.0, 7.0, zgrid, deltas);
    const double stored = sw.stored_norm(dist);
    const double leaked = storage_leakage(e_in, params, dist);
    CHECK(stored + leaked == doctest::Approx(1.0).epsilon(0.03));
    CHECK(stored > 0.5); // most of the photon is absorbed at d = 2
}

TEST_CASE("leakage is total without emitters") {
    const auto params = make_params(0.0, 2.0 * M_PI * 0.01);
    const auto dist = gaussian_medium(2.0 * M_PI * 3.0);
    const SpectralField e_in = gaussian_field(make_symmetric_grid(40.0, 1001), 1.0);
    CHECK(storage_leakage(e_in, params, dist) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("leakage is negligible deep in the absorption regime") {
    // uniform band: d n(omega)/n0 = d = 16 across the photon spectrum
    const double Gamma = 2.0 * M_PI * 10.0;
    const auto params = make_params(16.0, Gamma / 1000.0);
    const auto dist = EmitterDistribution::separable(
        SpatialProfile::uniform(0.01), SpectralProfile(ProfileShape::uniform, Gamma));
    const SpectralField e_in = gaussian_field(make_symmetric_grid(8.0, 1001), 1.0);
    CHECK(storage_leakage(e_in, params, dist) < 1e-3);
}

TEST_CASE("storage response is causal") {
    const double Gamma = 2.0 * M_PI * 3.0;
    const auto params = make_params(1.0, 2.0 * M_PI * 0.01);
    const auto dist = gaussian_medium(Gamma);
    const FrequencyGrid grid = make_symmetric_grid(1500.0, 30001);
    const double z = 0.005;
    const double arrival = (params.length - z) / params.c;
    double peak = 0.0;
    for (double tau = 0.0; tau <= 2.0; tau += 0.1)
        peak = std::max(peak,
                        std::abs(storage_response(z, arrival + tau, 0.0, params, dist, grid)));
    REQUIRE(peak > 0.0);
    for (double tau : {-2.0, -1.0})
        CHECK(std::abs(storage_response(z, arrival + tau, 0.0, params, dist, grid)) <
              1e-3 * peak);
}

TEST_CASE("attenuation-free response peaks at the transit delay and decays at gamma/2") {
    const double gamma = 2.0 * M_PI * 0.05;
    const auto params = make_params(1e-6, gamma);
    const auto dist = gaussian_medium(2.0 * M_PI * 3.0);
    const FrequencyGrid grid = make_symmetric_grid(800.0, 16001);
    const double z = 0.004;
    const double arrival = (params.length - z) / params.c;
    const double before = std::abs(storage_response(z, arrival - 1.0, 0.0, params, dist, grid));
    const double at1 = std::abs(storage_response(z, arrival + 0.2, 0.0, params, dist, grid));
    const double at2 = std::abs(storage_response(z, arrival + 3.2, 0.0, params, dist, grid));
    CHECK(at1 > 100.0 * before);
    // free evolution of the polarization between the two sample times
    CHECK(at2 / at1 == doctest::Approx(std::exp(-0.5 * gamma * 3.0)).epsilon(0.01));
}

TEST_CASE("the temporal ordering bound on delta_t is enforced") {
    TransitionSpec s;
    s.gamma = 2.0 * M_PI * 0.01;
    s.length = 0.01;
    s.c = 0.01;
    s.c_prime = 0.02; // faster control pulse requires a waiting time
    s.d = 1.0;
    const TransitionParams params = derive(s);
    const auto dist = gaussian_medium(2.0 * M_PI * 3.0);
    const SpectralField e_in = gaussian_field(make_symmetric_grid(40.0, 401), 1.0);
    const SpaceGrid zgrid(0.01, 9);
    const Eigen::VectorXd deltas = Eigen::VectorXd::LinSpaced(21, -10.0, 10.0);
    CHECK_THROWS_AS(store_spin_wave(e_in, params, dist, 0.0, 0.0, zgrid, deltas),
                    std::invalid_argument);
    const double bound = s.length * (1.0 / s.c - 1.0 / s.c_prime);
    CHECK_NOTHROW(store_spin_wave(e_in, params, dist, 0.0, bound, zgrid, deltas));
}

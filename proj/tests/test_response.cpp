#include <doctest.h>

#include <cmath>
#include <complex>

#include "qmem/response.hpp"

using namespace qmem;

namespace {

const double kGamma = 2.0 * M_PI * 0.01; // polarization decay

// Dense-trapezoid evaluation of the absorption response, independent of the
// adaptive quadrature used by the library.
Complex brute_H(const SpectralProfile& n, double gamma, double omega, int points = 400001) {
    const auto [lo, hi] = n.support();
    const double h = (hi - lo) / (points - 1);
    const Complex pole(omega, 0.5 * gamma);
    Complex acc(0.0, 0.0);
    for (int i = 0; i < points; ++i) {
        const double x = lo + i * h;
        const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        acc += w * Complex(0.0, -1.0) * n.density(x) / (Complex(x, 0.0) - pole);
    }
    return acc * h / (2.0 * M_PI * n.peak_density());
}

} // namespace

TEST_CASE("absorption response at line center of a broad band is one half") {
    const SpectralProfile n(ProfileShape::uniform, 2.0 * M_PI * 20.0);
    const Complex H0 = response_H(n, kGamma, 0.0);
    CHECK(H0.real() == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(std::abs(H0.imag()) < 2e-3);
}

TEST_CASE("absorption response decays far outside the emitter band") {
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    CHECK(std::abs(response_H(n, kGamma, 100.0 * 2.0 * M_PI)) < 0.01);
}

TEST_CASE("absorption response matches a dense-trapezoid evaluation") {
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    const Complex fast = response_H(n, kGamma, 0.0);
    const Complex slow = brute_H(n, kGamma, 0.0);
    CHECK(std::abs(fast - slow) < 1e-6);
}

TEST_CASE("absorption response of an even profile is Hermitian in frequency") {
    const SpectralProfile n(ProfileShape::sech, 2.0 * M_PI);
    for (double omega : {0.7, 3.1, 11.0}) {
        const Complex plus = response_H(n, kGamma, omega);
        const Complex minus = response_H(n, kGamma, -omega);
        CHECK(std::abs(minus - std::conj(plus)) < 1e-9);
    }
}

TEST_CASE("spatial response vanishes at the far face and factorizes at the front") {
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    const EmitterDistribution dist =
        EmitterDistribution::separable(SpatialProfile::uniform(0.01), n);
    CHECK(std::abs(response_h(0.01, 1.0, dist, kGamma)) == 0.0);
    const Complex full = response_h(0.0, 1.0, dist, kGamma);
    const Complex H = response_H(n, kGamma, 1.0);
    CHECK(std::abs(full - H) < 1e-9);
}

TEST_CASE("spatial response of a tabulated density matches 2D brute force") {
    const double L = 0.01;
    const int nz = 41, nd = 81;
    Eigen::VectorXd zs(nz), deltas(nd);
    Eigen::MatrixXd values(nz, nd);
    for (int i = 0; i < nz; ++i) zs(i) = L * i / (nz - 1);
    for (int j = 0; j < nd; ++j) deltas(j) = -10.0 + 20.0 * j / (nd - 1);
    for (int i = 0; i < nz; ++i)
        for (int j = 0; j < nd; ++j)
            values(i, j) = (1.0 + zs(i) / L) * std::exp(-deltas(j) * deltas(j) / 9.0);
    const EmitterDistribution dist = EmitterDistribution::tabulated(zs, deltas, values);
    REQUIRE(!dist.is_separable());

    const double z = 0.3 * L, omega = 0.5;
    const Complex fast = response_h(z, omega, dist, kGamma);

    // dense trapezoid in both z and Delta on the interpolated density
    const int mz = 2001, md = 20001;
    const Complex pole(omega, 0.5 * kGamma);
    Complex acc(0.0, 0.0);
    const double hz = (L - z) / (mz - 1), hd = 20.0 / (md - 1);
    for (int j = 0; j < md; ++j) {
        const double delta = -10.0 + j * hd;
        double mass = 0.0;
        for (int i = 0; i < mz; ++i) {
            const double wz = (i == 0 || i == mz - 1) ? 0.5 : 1.0;
            mass += wz * dist.evaluate(z + i * hz, delta);
        }
        const double wd = (j == 0 || j == md - 1) ? 0.5 : 1.0;
        acc += wd * Complex(0.0, -1.0) * mass * hz / (Complex(delta, 0.0) - pole);
    }
    const Complex slow = acc * hd / (2.0 * M_PI * dist.peak_density());
    CHECK(std::abs(fast - slow) / std::abs(slow) < 1e-5);
}

TEST_CASE("excited response with a unit excitation equals the absorption response") {
    const SpectralProfile n(ProfileShape::lorentzian, 2.0 * M_PI);
    auto one = [](double) { return Complex(1.0, 0.0); };
    for (double omega : {0.0, 2.0, -7.5}) {
        const Complex c = response_C(n, one, kGamma, omega);
        const Complex h = response_H(n, kGamma, omega);
        CHECK(std::abs(c - h) < 1e-10);
    }
}

TEST_CASE("excited response of a broad band with a pure phase excitation") {
    // f(Delta) = e^{i Delta t} re-phases at time t: closing the contour around
    // the pole at omega + i gamma/2 leaves the free polarization decay, so the
    // modulus is e^{-gamma t / 2} up to band-edge corrections.
    const SpectralProfile n(ProfileShape::uniform, 2.0 * M_PI * 40.0);
    const double t = 1.0;
    auto f = [t](double delta) { return std::exp(Complex(0.0, delta * t)); };
    for (double omega : {0.0, 1.0, 3.0}) {
        const double mod = std::abs(response_C(n, f, kGamma, omega));
        CHECK(mod == doctest::Approx(std::exp(-0.5 * kGamma * t)).epsilon(0.005));
    }
}

TEST_CASE("transmitted intensity with no emitters is the input intensity") {
    const FrequencyGrid grid = make_symmetric_grid(8.0, 801);
    const SpectralField e = gaussian_field(grid, 1.0);
    const EmitterDistribution dist = EmitterDistribution::separable(
        SpatialProfile::uniform(0.01), SpectralProfile(ProfileShape::gaussian, 2.0));
    const SpectralField out = transmitted_intensity(e, dist, 0.0, kGamma);
    for (int i = 0; i < grid.size(); ++i)
        CHECK(out.amplitude(i).real() ==
              doctest::Approx(std::norm(e.amplitude(i))).epsilon(1e-12));
}

TEST_CASE("in-band attenuation of a uniform profile approaches exp(-d)") {
    const double Gamma = 2.0 * M_PI * 10.0;
    const SpectralProfile n(ProfileShape::uniform, Gamma);
    const EmitterDistribution dist =
        EmitterDistribution::separable(SpatialProfile::uniform(0.01), n);
    const double gamma = Gamma / 1000.0;
    const double d = 2.0;
    const FrequencyGrid grid(-1.0, 1.0, 3); // deep inside the band
    SpectralField e(grid);
    e.amplitude.setOnes();
    const SpectralField out = transmitted_intensity(e, dist, d, gamma);
    for (int i = 0; i < grid.size(); ++i)
        CHECK(out.amplitude(i).real() ==
              doctest::Approx(std::exp(-d)).epsilon(5e-3));
}

TEST_CASE("transmitted intensity is monotonically decreasing in the depth") {
    const FrequencyGrid grid = make_symmetric_grid(8.0, 401);
    const SpectralField e = gaussian_field(grid, 1.0);
    const EmitterDistribution dist = EmitterDistribution::separable(
        SpatialProfile::uniform(0.01), SpectralProfile(ProfileShape::gaussian, 2.0));
    double prev = field_norm(transmitted_intensity(e, dist, 0.0, kGamma));
    for (double d : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double cur = field_norm(transmitted_intensity(e, dist, d, kGamma));
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("cached tabulations agree with direct evaluation") {
    const SpectralProfile n(ProfileShape::gaussian, 2.0 * M_PI);
    const FrequencyGrid grid = make_symmetric_grid(10.0, 101);
    const Eigen::VectorXcd direct = tabulate_H(n, kGamma, grid);
    const Eigen::VectorXcd& cached = global_response_cache().H(n, kGamma, grid);
    const Eigen::VectorXcd& again = global_response_cache().H(n, kGamma, grid);
    CHECK((cached - direct).cwiseAbs().maxCoeff() == 0.0);
    CHECK(&cached == &again); // second lookup reuses the stored vector
}

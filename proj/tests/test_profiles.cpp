#include <doctest.h>

#include <cmath>

#include "qmem/profile.hpp"
#include "qmem/quadrature.hpp"

using namespace qmem;

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;

double mass(const SpectralProfile& p) {
    auto [lo, hi] = p.support();
    auto r = integrate_breakpoints([&](double x) { return Complex(p.density(x), 0.0); },
                                   lo, hi, p.breakpoints());
    return r.value.real();
}
} // namespace

TEST_CASE("closed-form profiles normalized with common peak") {
    const double gamma_w = 3.7;
    for (auto shape : {ProfileShape::gaussian, ProfileShape::sech,
                       ProfileShape::lorentzian, ProfileShape::uniform}) {
        auto p = make_profile(shape, gamma_w);
        CHECK(mass(p) == doctest::Approx(1.0).epsilon(2e-4)); // lorentzian tail budget
        CHECK(p.peak_density() == doctest::Approx(1.0 / (kSqrtPi * gamma_w)).epsilon(1e-10));
    }
}

TEST_CASE("uniform parametrization from the caption") {
    const double gamma_w = 2.0;
    auto p = make_profile(ProfileShape::uniform, gamma_w);
    const double half = kSqrtPi * gamma_w / 2.0;
    CHECK(p.density(0.0) == doctest::Approx(1.0 / (kSqrtPi * gamma_w)));
    CHECK(p.density(half * 0.999) > 0.0);
    CHECK(p.density(half * 1.001) == 0.0);
}

TEST_CASE("lorentzian peak equals 1/(sqrt(pi) Gamma)") {
    auto p = make_profile(ProfileShape::lorentzian, 5.0);
    CHECK(p.density(0.0) == doctest::Approx(1.0 / (kSqrtPi * 5.0)).epsilon(1e-12));
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(make_profile(ProfileShape::gaussian, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(profile_shape_from_string("triangle"), std::invalid_argument);
    Eigen::VectorXd xs(3), ys(3);
    xs << -1, 0, 1;
    ys << 0, 0, 0;
    CHECK_THROWS_AS(SpectralProfile::tabulated(xs, ys), std::invalid_argument);
}

TEST_CASE("tabulated profile keeps off-center peak") {
    Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(201, -10.0, 10.0);
    Eigen::VectorXd ys(201);
    for (int i = 0; i < 201; ++i) {
        const double x = xs(i);
        ys(i) = std::exp(-(x - 4.0) * (x - 4.0)) + 0.3 * std::exp(-(x + 2.0) * (x + 2.0));
    }
    auto p = SpectralProfile::tabulated(xs, ys);
    CHECK(p.peak_density() > p.density(0.0));
    CHECK(p.peak_density() == doctest::Approx(p.density(4.0)).epsilon(1e-3));
    CHECK(mass(p) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("compose_broadening identities") {
    // X conv narrow ~= X
    auto x = make_profile(ProfileShape::gaussian, 2.0);
    auto narrow = make_profile(ProfileShape::gaussian, 0.02);
    auto c = compose_broadening(x, narrow);
    double worst = 0.0;
    for (double d = -5.0; d <= 5.0; d += 0.25)
        worst = std::max(worst, std::abs(c.density(d) - x.density(d)));
    CHECK(worst < 2e-3 * x.peak_density());

    // gaussian conv gaussian
    auto g1 = make_profile(ProfileShape::gaussian, 1.5);
    auto g2 = make_profile(ProfileShape::gaussian, 2.5);
    auto g12 = compose_broadening(g1, g2);
    auto expected = make_profile(ProfileShape::gaussian, std::hypot(1.5, 2.5));
    for (double d = -6.0; d <= 6.0; d += 0.5)
        CHECK(g12.density(d) == doctest::Approx(expected.density(d)).epsilon(5e-3));

    // uniform conv uniform -> triangle peaked at 0
    auto u = make_profile(ProfileShape::uniform, 1.0);
    auto t = compose_broadening(u, u);
    CHECK(t.density(0.0) == doctest::Approx(u.peak_density()).epsilon(2e-2));
    CHECK(t.density(0.0) > t.density(0.7));
    CHECK(t.density(kSqrtPi * 1.05) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(mass(t) == doctest::Approx(1.0).epsilon(1e-6));

    // commutativity
    auto ab = compose_broadening(g1, u);
    auto ba = compose_broadening(u, g1);
    for (double d = -4.0; d <= 4.0; d += 0.5)
        CHECK(ab.density(d) == doctest::Approx(ba.density(d)).epsilon(1e-6));
}

TEST_CASE("separable distribution and marginals") {
    const double L = 0.01;
    auto dist = EmitterDistribution::separable(SpatialProfile::uniform(L),
                                               make_profile(ProfileShape::gaussian, 3.0));
    CHECK(dist.evaluate(L / 2, 0.0) ==
          doctest::Approx((1.0 / L) * (1.0 / (kSqrtPi * 3.0))).epsilon(1e-12));
    CHECK(dist.marginal_spectral().density(1.0) ==
          doctest::Approx(make_profile(ProfileShape::gaussian, 3.0).density(1.0)));
    CHECK(peak_density(dist) == doctest::Approx(1.0 / (kSqrtPi * 3.0)));
    CHECK_THROWS_AS(dist.evaluate(-0.001, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(dist.evaluate(L + 0.001, 0.0), std::invalid_argument);
}

TEST_CASE("tabulated distribution marginals against brute-force sums") {
    const int nz = 41, nd = 81;
    Eigen::VectorXd zs = Eigen::VectorXd::LinSpaced(nz, 0.0, 1.0);
    Eigen::VectorXd ds = Eigen::VectorXd::LinSpaced(nd, -5.0, 5.0);
    Eigen::MatrixXd vals(nz, nd);
    for (int i = 0; i < nz; ++i)
        for (int j = 0; j < nd; ++j)
            vals(i, j) = (1.0 + zs(i)) * std::exp(-ds(j) * ds(j) / 4.0);
    auto dist = EmitterDistribution::tabulated(zs, ds, vals);

    // total mass is 1 after renormalization
    auto nsp = dist.marginal_spectral();
    CHECK(mass(nsp) == doctest::Approx(1.0).epsilon(1e-8));

    // brute-force row sum at one Delta
    double expect = 0.0;
    for (int i = 0; i + 1 < nz; ++i)
        expect += 0.5 * (zs(i + 1) - zs(i)) *
                  (dist.evaluate(zs(i), ds(40)) + dist.evaluate(zs(i + 1), ds(40)));
    CHECK(nsp.density(ds(40)) == doctest::Approx(expect).epsilon(1e-9));
}

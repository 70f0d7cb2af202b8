#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qmem/transition.hpp"

using namespace qmem;

namespace {

TransitionSpec base_spec() {
    TransitionSpec s;
    s.gamma = 2.0 * M_PI * 0.01;
    s.length = 0.01;
    s.c = 0.01;
    s.c_prime = 0.01;
    return s;
}

} // namespace

TEST_CASE("matched group velocities give a vanishing cutoff term") {
    TransitionSpec s = base_spec();
    s.d = 2.0;
    const TransitionParams p = derive(s);
    CHECK(p.inverse_ceff == 0.0);
    CHECK(p.inv_cutoff == 0.0);
    CHECK(p.d == 2.0);
    CHECK(p.delta_k == 0.0);
}

TEST_CASE("optical depth derived from the coupling bandwidth") {
    TransitionSpec s = base_spec();
    const double n0 = 3.7;
    // choose mu0 so that 2 pi mu0^2 n0 L / c = 2
    s.n0 = n0;
    s.mu0 = std::sqrt(2.0 * s.c / (2.0 * M_PI * n0 * s.length));
    const TransitionParams p = derive(s);
    CHECK(p.d == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("mu0_for_depth inverts the depth relation") {
    const double n0 = 0.9, L = 0.01, c = 0.3;
    const double mu0 = mu0_for_depth(5.0, n0, L, c);
    CHECK(2.0 * M_PI * mu0 * mu0 * n0 * L / c == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("exactly one of d and mu0 must be supplied") {
    TransitionSpec s = base_spec();
    CHECK_THROWS_AS(derive(s), std::invalid_argument); // neither
    s.d = 1.0;
    s.mu0 = 1.0;
    s.n0 = 1.0;
    CHECK_THROWS_AS(derive(s), std::invalid_argument); // both
}

TEST_CASE("mu0 without a peak density is rejected") {
    TransitionSpec s = base_spec();
    s.mu0 = 1.0;
    CHECK_THROWS_AS(derive(s), std::invalid_argument);
}

TEST_CASE("cutoff override fixes the velocity-mismatch scale") {
    TransitionSpec s = base_spec();
    s.d = 1.0;
    s.omega_char = -2.0 * M_PI * 30.0;
    const TransitionParams p = derive(s);
    CHECK(p.inv_cutoff == doctest::Approx(-1.0 / (2.0 * M_PI * 30.0)).epsilon(1e-12));
    CHECK(p.inverse_ceff == doctest::Approx(2.0 * M_PI * p.inv_cutoff / s.length));
}

TEST_CASE("mismatched velocities produce the cutoff from 1/c' - 1/c") {
    TransitionSpec s = base_spec();
    s.d = 1.0;
    s.c = 0.01;
    s.c_prime = 0.02;
    const TransitionParams p = derive(s);
    CHECK(p.inverse_ceff == doctest::Approx(1.0 / 0.02 - 1.0 / 0.01));
    CHECK(p.inv_cutoff == doctest::Approx(s.length * p.inverse_ceff / (2.0 * M_PI)));
}

TEST_CASE("phase mismatch is the wave-number difference") {
    TransitionSpec s = base_spec();
    s.d = 1.0;
    s.k = 100.0;
    s.k_prime = 140.0;
    CHECK(derive(s).delta_k == doctest::Approx(40.0));
}

TEST_CASE("invalid scalars are rejected") {
    TransitionSpec s = base_spec();
    s.d = -1.0;
    CHECK_THROWS_AS(derive(s), std::invalid_argument);
    s = base_spec();
    s.d = 1.0;
    s.gamma = 0.0;
    CHECK_THROWS_AS(derive(s), std::invalid_argument);
    s = base_spec();
    s.d = 1.0;
    s.omega_char = 0.0;
    CHECK_THROWS_AS(derive(s), std::invalid_argument);
}

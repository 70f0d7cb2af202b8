#include "qmem/transition.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmem {

double mu0_for_depth(double d, double n0, double length, double c) {
    return std::sqrt(d * c / (2.0 * M_PI * n0 * length));
}

TransitionParams derive(const TransitionSpec& spec) {
    if (!(spec.gamma > 0.0)) throw std::invalid_argument("transition: gamma must be > 0");
    if (!(spec.length > 0.0)) throw std::invalid_argument("transition: L must be > 0");
    if (!(spec.c > 0.0)) throw std::invalid_argument("transition: c must be > 0");
    if (!(spec.c_prime > 0.0)) throw std::invalid_argument("transition: c' must be > 0");
    if (spec.d.has_value() == spec.mu0.has_value())
        throw std::invalid_argument("transition: exactly one of d and mu0 must be given");

    TransitionParams p{};
    p.gamma = spec.gamma;
    p.length = spec.length;
    p.c = spec.c;
    p.c_prime = spec.c_prime;
    p.k = spec.k;
    p.k_prime = spec.k_prime;
    p.delta_k = spec.k_prime - spec.k;

    if (spec.mu0) {
        if (!spec.n0 || !(*spec.n0 > 0.0))
            throw std::invalid_argument("transition: mu0 requires a positive n0");
        p.mu0 = *spec.mu0;
        p.d = 2.0 * M_PI * p.mu0 * p.mu0 * (*spec.n0) * spec.length / spec.c;
    } else {
        if (!(*spec.d >= 0.0)) throw std::invalid_argument("transition: d must be >= 0");
        p.d = *spec.d;
        p.mu0 = spec.n0 ? mu0_for_depth(p.d, *spec.n0, spec.length, spec.c)
                        : std::numeric_limits<double>::quiet_NaN();
    }

    if (spec.omega_char) {
        if (*spec.omega_char == 0.0)
            throw std::invalid_argument("transition: omega_char must be nonzero");
        p.inv_cutoff = 1.0 / *spec.omega_char;
        p.inverse_ceff = 2.0 * M_PI * p.inv_cutoff / spec.length;
    } else {
        p.inverse_ceff = 1.0 / spec.c_prime - 1.0 / spec.c;
        p.inv_cutoff = spec.length * p.inverse_ceff / (2.0 * M_PI);
    }
    return p;
}

} // namespace qmem

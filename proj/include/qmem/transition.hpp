#pragma once

#include <optional>

namespace qmem {

// Raw per-transition inputs; exactly one of {d, mu0 (with n0)} must be set.
struct TransitionSpec {
    double gamma = 0.0;   // polarization decay rate (rad/ns)
    double length = 0.0;  // medium length L (m)
    double c = 0.0;       // photon group velocity (m/ns)
    double c_prime = 0.0; // control-pulse group velocity (m/ns)
    double k = 0.0;       // photon wave number (1/m)
    double k_prime = 0.0; // control wave number (1/m)
    std::optional<double> d;    // optical depth
    std::optional<double> mu0;  // sqrt(N) coupling bandwidth (rad/ns)
    std::optional<double> n0;   // peak spectral density, needed with mu0
    // Direct override of the cutoff frequency 2 pi c_eff / L; when set,
    // the group-velocity mismatch is taken from it instead of (c, c').
    std::optional<double> omega_char;
};

// Derived per-transition parameters.
struct TransitionParams {
    double gamma;
    double length;
    double c;
    double c_prime;
    double k;
    double k_prime;
    double d;
    double mu0; // consistent with d via d = 2 pi mu0^2 n0 L / c (n0 as supplied, else NaN)
    double delta_k;       // k' - k
    double inverse_ceff;  // 1/c' - 1/c (ns/m); 0 when velocities match
    double inv_cutoff;    // zeta = L * inverse_ceff / (2 pi) = 1/omega_char; 0 when matched
};

TransitionParams derive(const TransitionSpec& spec);

// mu0 for a given optical depth and peak density (inverse of Eq.-12-style d).
double mu0_for_depth(double d, double n0, double length, double c);

} // namespace qmem

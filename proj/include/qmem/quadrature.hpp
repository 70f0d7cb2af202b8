#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "qmem/errors.hpp"

namespace qmem {

using Complex = std::complex<double>;
using Integrand = std::function<Complex(double)>;

struct QuadOptions {
    double rel_tol = 1e-7;
    double abs_tol = 1e-13;
    int max_depth = 40;
    bool throw_on_failure = true;
};

struct QuadResult {
    Complex value{0.0, 0.0};
    double error = 0.0;   // absolute error estimate
    long evaluations = 0;
    bool converged = true;
};

// Adaptive Gauss-Kronrod (G7/K15) over [a, b].
QuadResult integrate(const Integrand& f, double a, double b,
                     const QuadOptions& opts = {});

// Same, but with interior breakpoints the integrand is split at first
// (pole locations, support edges, oscillation centers).
QuadResult integrate_breakpoints(const Integrand& f, double a, double b,
                                 std::vector<double> breakpoints,
                                 const QuadOptions& opts = {});

// Exact integral of the piecewise-linear interpolant of g against the Cauchy
// kernel 1/(x - pole):   sum_cells \int g(x)/(x - pole) dx.
// Requires Im(pole) != 0 and strictly increasing nodes xs.
Complex cauchy_trapezoid(const Eigen::VectorXd& xs, const Eigen::VectorXcd& g,
                         Complex pole);

// Gauss-Legendre nodes and weights on [a, b] (Golub-Welsch).
struct GaussRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};
GaussRule gauss_legendre(int n, double a, double b);

} // namespace qmem

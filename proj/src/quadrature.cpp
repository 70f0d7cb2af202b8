#include "qmem/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace qmem {

namespace {

// QUADPACK G7/K15 nodes and weights on [-1, 1].
constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelResult {
    Complex kronrod;
    Complex gauss;
    double resasc; // scale for the error estimate
};

PanelResult gk15(const Integrand& f, double a, double b) {
    const double hl = 0.5 * (b - a);
    const double center = 0.5 * (a + b);
    Complex fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(center - hl * kKronrodNodes[i]);
        fv[14 - i] = f(center + hl * kKronrodNodes[i]);
    }
    fv[7] = f(center);
    Complex kron = kKronrodWeights[7] * fv[7];
    double scale = kKronrodWeights[7] * std::abs(fv[7]);
    for (int i = 0; i < 7; ++i) {
        kron += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
        scale += kKronrodWeights[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    // Gauss points are the odd Kronrod nodes.
    Complex gauss = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 3; ++i)
        gauss += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    return {kron * hl, gauss * hl, scale * std::abs(hl)};
}

void adapt(const Integrand& f, double a, double b, double tol_scale,
           const QuadOptions& opts, int depth, QuadResult& out) {
    PanelResult p = gk15(f, a, b);
    out.evaluations += 15;
    double err = std::abs(p.kronrod - p.gauss);
    // QUADPACK-style sharpening of the raw difference.
    if (p.resasc > 0.0 && err > 0.0)
        err = p.resasc * std::min(1.0, std::pow(200.0 * err / p.resasc, 1.5));
    const double local_tol = std::max(
        opts.abs_tol,
        opts.rel_tol * std::max(0.1 * tol_scale, std::abs(p.kronrod)));
    if (err <= local_tol || depth >= opts.max_depth) {
        out.value += p.kronrod;
        out.error += err;
        if (err > local_tol) out.converged = false;
        return;
    }
    const double m = 0.5 * (a + b);
    adapt(f, a, m, tol_scale, opts, depth + 1, out);
    adapt(f, m, b, tol_scale, opts, depth + 1, out);
}

} // namespace

QuadResult integrate_breakpoints(const Integrand& f, double a, double b,
                                 std::vector<double> breakpoints,
                                 const QuadOptions& opts) {
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(
        std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    // First pass to estimate the magnitude scale for relative tolerances.
    QuadResult coarse;
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double lo = breakpoints[i], hi = breakpoints[i + 1];
        if (hi <= a || lo >= b || hi <= lo) continue;
        PanelResult p = gk15(f, std::max(lo, a), std::min(hi, b));
        coarse.value += p.kronrod;
        coarse.evaluations += 15;
    }
    const double scale = std::max(std::abs(coarse.value), opts.abs_tol);

    QuadResult out;
    out.evaluations = coarse.evaluations;
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double lo = std::max(breakpoints[i], a);
        const double hi = std::min(breakpoints[i + 1], b);
        if (hi <= lo) continue;
        adapt(f, lo, hi, scale, opts, 0, out);
    }
    if (!out.converged && opts.throw_on_failure)
        throw NumericError("adaptive quadrature did not converge", out.error);
    return out;
}

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts) {
    return integrate_breakpoints(f, a, b, {}, opts);
}

Complex cauchy_trapezoid(const Eigen::VectorXd& xs, const Eigen::VectorXcd& g,
                         Complex pole) {
    if (xs.size() != g.size() || xs.size() < 2)
        throw std::invalid_argument("cauchy_trapezoid: node/value size mismatch");
    if (pole.imag() == 0.0)
        throw std::invalid_argument("cauchy_trapezoid: pole must be off the real axis");
    Complex total(0.0, 0.0);
    Complex log_prev = std::log(Complex(xs(0), 0.0) - pole);
    for (Eigen::Index i = 0; i + 1 < xs.size(); ++i) {
        const double x0 = xs(i), x1 = xs(i + 1);
        const double h = x1 - x0;
        const Complex log_next = std::log(Complex(x1, 0.0) - pole);
        // g linear on the cell: g(x) = g0 + s (x - x0), s = (g1 - g0)/h.
        // \int (g0 + s(x-x0))/(x-p) dx
        //   = (g0 - s (x0 - p)) [log(x-p)] + s h
        const Complex s = (g(i + 1) - g(i)) / h;
        total += (g(i) - s * (Complex(x0, 0.0) - pole)) * (log_next - log_prev) + s * h;
        log_prev = log_next;
    }
    return total;
}

GaussRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
    if (!(b > a)) throw std::invalid_argument("gauss_legendre: empty interval");
    // Jacobi matrix of the Legendre recurrence; eigenvalues are the nodes,
    // weights follow from the first eigenvector components.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double beta = i / std::sqrt(4.0 * i * i - 1.0);
        jacobi(i, i - 1) = beta;
        jacobi(i - 1, i) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        rule.nodes(i) = mid + half * solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights(i) = 2.0 * v0 * v0 * half;
    }
    return rule;
}

} // namespace qmem

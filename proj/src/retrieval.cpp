#include "qmem/retrieval.hpp"

#include <cmath>
#include <fstream>

namespace qmem {

namespace {

// (1 - e^{-x}) / x, stable near x = 0.
Complex one_minus_exp_over(Complex x) {
    if (std::abs(x) < 1e-5)
        return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
    return (1.0 - std::exp(-x)) / x;
}

// Closed-form entry shared by the uniform-CRIB and ideal kernels.
Complex closed_form_entry(const TransitionParams& s, const TransitionParams& r,
                          double gamma, double t_storage, double w, double wp) {
    const double L = s.length;
    const double dk_tot_L = (s.delta_k + r.delta_k) * L;
    const double dbar = 0.5 * (s.d + r.d);
    const double F = dk_tot_L + 2.0 * M_PI * (w * r.inv_cutoff + wp * s.inv_cutoff);
    const Complex phase = std::exp(
        Complex(0.0, w * (t_storage + L / r.c_prime) + wp * L / s.c_prime + dk_tot_L));
    const Complex ridge = 1.0 / (Complex(gamma, -(w + wp)));
    const Complex cutoff = one_minus_exp_over(Complex(dbar, F)) ;
    return phase * std::sqrt(s.d * r.d * s.c / r.c) * ridge * cutoff;
}

struct ProfileTable {
    Eigen::VectorXd xs;
    Eigen::VectorXcd vals;
};

// Fine piecewise-linear tabulation of a density for Cauchy-kernel integrals.
ProfileTable tabulate_density(const SpectralProfile& p, int base_points) {
    auto [lo, hi] = p.support();
    std::vector<double> nodes;
    nodes.reserve(base_points + 8);
    if (hi - lo > 100.0 * p.width()) {
        // Heavy-tailed support: grade the nodes so the core stays resolved
        // while the cells grow geometrically into the tails.
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        const double a = 6.0, sa = std::sinh(a);
        for (int i = 0; i < base_points; ++i) {
            const double u = -1.0 + 2.0 * i / double(base_points - 1);
            nodes.push_back(mid + half * std::sinh(a * u) / sa);
        }
    } else {
        for (int i = 0; i < base_points; ++i)
            nodes.push_back(lo + (hi - lo) * i / double(base_points - 1));
    }
    for (double b : p.breakpoints())
        if (b > lo && b < hi) nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [&](double a, double b) {
                                return std::abs(a - b) < 1e-12 * (hi - lo);
                            }),
                nodes.end());
    ProfileTable t;
    t.xs = Eigen::Map<const Eigen::VectorXd>(nodes.data(), nodes.size());
    t.vals.resize(t.xs.size());
    for (Eigen::Index i = 0; i < t.xs.size(); ++i) t.vals(i) = p.density(t.xs(i));
    return t;
}

ProfileTable tabulate_product(const SpectralProfile& a, const SpectralProfile& b,
                              int base_points) {
    auto [alo, ahi] = a.support();
    auto [blo, bhi] = b.support();
    const double lo = std::max(alo, blo), hi = std::min(ahi, bhi);
    if (!(hi > lo))
        throw std::invalid_argument("uncorrelated map: densities have disjoint supports");
    std::vector<double> nodes;
    for (int i = 0; i < base_points; ++i)
        nodes.push_back(lo + (hi - lo) * i / double(base_points - 1));
    for (const auto& p : {a, b})
        for (double brk : p.breakpoints())
            if (brk > lo && brk < hi) nodes.push_back(brk);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [&](double x, double y) {
                                return std::abs(x - y) < 1e-12 * (hi - lo);
                            }),
                nodes.end());
    ProfileTable t;
    t.xs = Eigen::Map<const Eigen::VectorXd>(nodes.data(), nodes.size());
    t.vals.resize(t.xs.size());
    for (Eigen::Index i = 0; i < t.xs.size(); ++i)
        t.vals(i) = a.density(t.xs(i)) * b.density(t.xs(i));
    return t;
}

} // namespace

void KernelMatrix::export_text(const std::string& path) const {
    std::ofstream out(path);
    out.precision(12);
    out << "# omega omega_prime re im\n";
    for (int i = 0; i < out_grid.size(); ++i)
        for (int j = 0; j < in_grid.size(); ++j)
            out << out_grid.point(i) << ' ' << in_grid.point(j) << ' '
                << entries(i, j).real() << ' ' << entries(i, j).imag() << '\n';
}

KernelMatrix build_kernel_crib_uniform(const TransitionParams& storage,
                                       const TransitionParams& retrieval,
                                       double t_storage,
                                       const FrequencyGrid& out_grid,
                                       const FrequencyGrid& in_grid) {
    if (t_storage < 0.0)
        throw std::invalid_argument("storage time must be nonnegative");
    const double gamma = retrieval.gamma;
    KernelMatrix k{out_grid, in_grid,
                   Eigen::MatrixXcd(out_grid.size(), in_grid.size()),
                   KernelProvenance::crib_uniform, true, gamma};
    for (int i = 0; i < out_grid.size(); ++i)
        for (int j = 0; j < in_grid.size(); ++j)
            k.entries(i, j) = closed_form_entry(storage, retrieval, gamma, t_storage,
                                                out_grid.point(i), in_grid.point(j));
    return k;
}

KernelMatrix build_kernel_ideal(const TransitionParams& params, double t_storage,
                                const FrequencyGrid& out_grid,
                                const FrequencyGrid& in_grid) {
    KernelMatrix k = build_kernel_crib_uniform(params, params, t_storage,
                                               out_grid, in_grid);
    k.provenance = KernelProvenance::ideal;
    return k;
}

KernelMatrix build_kernel_general(const TransitionParams& storage,
                                  const TransitionParams& retrieval,
                                  const EmitterDistribution& dist_s,
                                  const EmitterDistribution& dist_r,
                                  const BroadeningMap& map, double t_storage,
                                  const FrequencyGrid& out_grid,
                                  const FrequencyGrid& in_grid,
                                  const QuadOptions& opts) {
    if (t_storage < 0.0)
        throw std::invalid_argument("storage time must be nonnegative");
    if (std::abs(storage.length - retrieval.length) >
        1e-12 * std::max(storage.length, retrieval.length))
        throw std::invalid_argument("storage and retrieval share one medium length");
    if (std::abs(storage.gamma - retrieval.gamma) >
        1e-12 * std::max(storage.gamma, retrieval.gamma))
        throw std::invalid_argument("equal polarization decay rates are assumed");
    if (map.kind == BroadeningMap::Kind::uncorrelated && !map.g0)
        throw std::invalid_argument("uncorrelated map requires a detuning density");

    const double gamma = retrieval.gamma;
    const double L = retrieval.length;
    const int n_out = out_grid.size(), n_in = in_grid.size();
    const bool separable = dist_s.is_separable() && dist_r.is_separable();
    const int nz = separable ? 64 : 32;
    const GaussRule zrule = gauss_legendre(nz, 0.0, L);
    const double dk_tot = storage.delta_k + retrieval.delta_k;

    const SpectralProfile n_r = dist_r.marginal_spectral();
    const double n0 = n_r.peak_density();

    // z-dependent absorption factors for the outgoing and stored fields.
    Eigen::MatrixXcd er(n_out, nz), es(n_in, nz);
    if (separable) {
        const QuadOptions defaults{};
        const bool plain = opts.rel_tol == defaults.rel_tol &&
                           opts.abs_tol == defaults.abs_tol &&
                           opts.max_depth == defaults.max_depth;
        const Eigen::VectorXcd hr =
            plain ? global_response_cache().H(dist_r.spectral(), gamma, out_grid)
                  : tabulate_H(dist_r.spectral(), gamma, out_grid, opts);
        const Eigen::VectorXcd hs =
            plain ? global_response_cache().H(dist_s.spectral(), gamma, in_grid)
                  : tabulate_H(dist_s.spectral(), gamma, in_grid, opts);
        for (int m = 0; m < nz; ++m) {
            const double z = zrule.nodes(m);
            const double mass_r = dist_r.spatial().mass_above(z);
            const double mass_s = dist_s.spatial().mass_above(z);
            for (int i = 0; i < n_out; ++i)
                er(i, m) = std::exp(
                    Complex(0.0, -out_grid.point(i) * (L - z) * retrieval.inverse_ceff) -
                    retrieval.d * mass_r * hr(i));
            for (int j = 0; j < n_in; ++j)
                es(j, m) = std::exp(
                    Complex(0.0, -in_grid.point(j) * (L - z) * storage.inverse_ceff) -
                    storage.d * mass_s * hs(j));
        }
    } else {
        for (int m = 0; m < nz; ++m) {
            const double z = zrule.nodes(m);
            for (int i = 0; i < n_out; ++i)
                er(i, m) = std::exp(
                    Complex(0.0, -out_grid.point(i) * (L - z) * retrieval.inverse_ceff) -
                    retrieval.d * response_h(z, out_grid.point(i), dist_r, gamma, opts));
            for (int j = 0; j < n_in; ++j)
                es(j, m) = std::exp(
                    Complex(0.0, -in_grid.point(j) * (L - z) * storage.inverse_ceff) -
                    storage.d * response_h(z, in_grid.point(j), dist_s, gamma, opts));
        }
    }

    const Complex pref =
        std::sqrt(storage.d * retrieval.d) / (2.0 * M_PI * n0) *
        std::sqrt(storage.c / retrieval.c);
    Eigen::VectorXcd phase_out(n_out), phase_in(n_in);
    for (int i = 0; i < n_out; ++i)
        phase_out(i) = std::exp(
            Complex(0.0, out_grid.point(i) * (t_storage + L / retrieval.c_prime)));
    for (int j = 0; j < n_in; ++j)
        phase_in(j) =
            std::exp(Complex(0.0, in_grid.point(j) * L / storage.c_prime));

    KernelMatrix k{out_grid, in_grid, Eigen::MatrixXcd::Zero(n_out, n_in),
                   KernelProvenance::general,
                   map.kind == BroadeningMap::Kind::negate, gamma};

    if (separable) {
        // z-integral factorizes from the detuning integral.
        Eigen::VectorXcd wz(nz);
        for (int m = 0; m < nz; ++m)
            wz(m) = zrule.weights(m) * dist_r.spatial().density(zrule.nodes(m)) *
                    std::exp(Complex(0.0, dk_tot * zrule.nodes(m)));
        const Eigen::MatrixXcd zint = er * wz.asDiagonal() * es.transpose();

        const ProfileTable table = tabulate_density(n_r, 8001);
        switch (map.kind) {
        case BroadeningMap::Kind::negate: {
            // Partial fractions around the two simple poles give the
            // antidiagonal ridge times a difference of Cauchy transforms.
            Eigen::VectorXcd c1(n_out), c2(n_in);
            for (int i = 0; i < n_out; ++i)
                c1(i) = cauchy_trapezoid(table.xs, table.vals,
                                         Complex(out_grid.point(i), 0.5 * gamma));
            for (int j = 0; j < n_in; ++j)
                c2(j) = cauchy_trapezoid(table.xs, table.vals,
                                         Complex(-in_grid.point(j), -0.5 * gamma));
            for (int i = 0; i < n_out; ++i)
                for (int j = 0; j < n_in; ++j)
                    k.entries(i, j) =
                        pref * phase_out(i) * phase_in(j) * zint(i, j) *
                        (c1(i) - c2(j)) /
                        Complex(out_grid.point(i) + in_grid.point(j), gamma);
            break;
        }
        case BroadeningMap::Kind::identity: {
            for (int i = 0; i < n_out; ++i) {
                const double w = out_grid.point(i);
                for (int j = 0; j < n_in; ++j) {
                    const double wp = in_grid.point(j);
                    auto f = [&](double x) {
                        return Complex(n_r.density(x), 0.0) /
                               (Complex(0.5 * gamma, x - w) *
                                Complex(0.5 * gamma, x - wp));
                    };
                    std::vector<double> brk = n_r.breakpoints();
                    for (double c : {w, wp})
                        for (double off : {0.0, gamma, -gamma, 4 * gamma, -4 * gamma})
                            brk.push_back(c + off);
                    auto [lo, hi] = n_r.support();
                    const QuadResult q = integrate_breakpoints(f, lo, hi, brk, opts);
                    k.entries(i, j) =
                        pref * phase_out(i) * phase_in(j) * zint(i, j) * q.value;
                }
            }
            break;
        }
        case BroadeningMap::Kind::uncorrelated: {
            // The storage-detuning integral decouples and evaluates to pi.
            const ProfileTable prod = tabulate_product(*map.g0, n_r, 8001);
            Eigen::VectorXcd u(n_out);
            for (int i = 0; i < n_out; ++i)
                u(i) = Complex(0.0, -M_PI) *
                       cauchy_trapezoid(prod.xs, prod.vals,
                                        Complex(out_grid.point(i), 0.5 * gamma));
            for (int i = 0; i < n_out; ++i)
                for (int j = 0; j < n_in; ++j)
                    k.entries(i, j) =
                        pref * phase_out(i) * phase_in(j) * zint(i, j) * u(i);
            break;
        }
        }
        return k;
    }

    // Tabulated G(z, Delta): the detuning integral is z-dependent.
    if (map.kind != BroadeningMap::Kind::negate)
        throw std::invalid_argument(
            "non-separable distributions support only the detuning-reversal map");
    auto [lo, hi] = dist_r.marginal_spectral().support();
    const int n_tab = 2001;
    Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(n_tab, lo, hi);
    Eigen::MatrixXcd cz1(nz, n_out), cz2(nz, n_in);
    Eigen::VectorXcd row(n_tab);
    for (int m = 0; m < nz; ++m) {
        const double z = zrule.nodes(m);
        for (int t = 0; t < n_tab; ++t) row(t) = dist_r.evaluate(z, xs(t));
        for (int i = 0; i < n_out; ++i)
            cz1(m, i) = cauchy_trapezoid(xs, row,
                                         Complex(out_grid.point(i), 0.5 * gamma));
        for (int j = 0; j < n_in; ++j)
            cz2(m, j) = cauchy_trapezoid(xs, row,
                                         Complex(-in_grid.point(j), -0.5 * gamma));
    }
    for (int i = 0; i < n_out; ++i)
        for (int j = 0; j < n_in; ++j) {
            Complex total(0.0, 0.0);
            for (int m = 0; m < nz; ++m)
                total += zrule.weights(m) *
                         std::exp(Complex(0.0, dk_tot * zrule.nodes(m))) *
                         er(i, m) * es(j, m) * (cz1(m, i) - cz2(m, j));
            k.entries(i, j) =
                pref * phase_out(i) * phase_in(j) * total /
                Complex(out_grid.point(i) + in_grid.point(j), gamma);
        }
    return k;
}

SpectralField apply_kernel(const KernelMatrix& kernel, const SpectralField& e_in) {
    if (!(e_in.grid == kernel.in_grid))
        throw std::invalid_argument("apply_kernel: input grid does not match kernel");
    SpectralField out(kernel.out_grid);
    out.warnings = e_in.warnings;
    const int n_out = kernel.out_grid.size(), n_in = kernel.in_grid.size();
    if (kernel.has_ridge) {
        const double gamma = kernel.ridge_gamma;
        if (kernel.in_grid.spacing() > 0.25 * gamma)
            out.warnings.push_back(
                "kernel ridge under-resolved: grid spacing exceeds gamma/4");
        // Divide out the echo ridge and integrate it analytically per cell.
        Eigen::VectorXcd smooth(n_in);
        for (int i = 0; i < n_out; ++i) {
            const double w = kernel.out_grid.point(i);
            for (int j = 0; j < n_in; ++j)
                smooth(j) = kernel.entries(i, j) *
                            Complex(gamma, -(w + kernel.in_grid.point(j))) *
                            e_in.amplitude(j);
            const Complex integral = cauchy_trapezoid(
                kernel.in_grid.points(), smooth, Complex(-w, -gamma));
            out.amplitude(i) = Complex(0.0, 1.0) / (2.0 * M_PI) * integral;
        }
    } else {
        const Eigen::VectorXd wts = trapezoid_weights(kernel.in_grid);
        out.amplitude = (kernel.entries *
                         (wts.array() * e_in.amplitude.array()).matrix()) /
                        (2.0 * M_PI);
    }
    return out;
}

} // namespace qmem

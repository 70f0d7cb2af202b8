#include "qmem/transducer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qmem {

namespace {

Complex one_minus_exp_over(Complex x) {
    if (std::abs(x) < 1e-5)
        return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
    return (1.0 - std::exp(-x)) / x;
}

double sinc(double x) {
    if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double peak_n0(const EmitterDistribution& dist) { return peak_density(dist); }

bool default_quad_opts(const QuadOptions& o) {
    const QuadOptions d{};
    return o.rel_tol == d.rel_tol && o.abs_tol == d.abs_tol &&
           o.max_depth == d.max_depth;
}

Eigen::VectorXcd cached_H(const SpectralProfile& profile, double gamma,
                          const FrequencyGrid& grid, const QuadOptions& opts) {
    if (default_quad_opts(opts))
        return global_response_cache().H(profile, gamma, grid);
    return tabulate_H(profile, gamma, grid, opts);
}

Eigen::VectorXcd cached_C(const SpectralProfile& profile,
                          const StoredExcitation& f, double gamma,
                          const FrequencyGrid& grid, const QuadOptions& opts) {
    auto fn = [&](double x) { return f(x); };
    if (default_quad_opts(opts))
        return global_response_cache().C(profile, fn, f.cache_key(), gamma, grid);
    return tabulate_C(profile, fn, gamma, grid, opts);
}

double coupling_mu0(const TransitionParams& params, double n0) {
    if (std::isfinite(params.mu0)) return params.mu0;
    return mu0_for_depth(params.d, n0, params.length, params.c);
}

} // namespace

StoredExcitation StoredExcitation::gaussian(double width, double t_emit) {
    if (!(width > 0.0))
        throw std::invalid_argument("excitation width must be positive");
    StoredExcitation f;
    f.gaussian_ = true;
    f.width_ = width;
    f.t_emit_ = t_emit;
    return f;
}

StoredExcitation StoredExcitation::tabulated(Eigen::VectorXd deltas,
                                             Eigen::VectorXcd values) {
    if (deltas.size() != values.size() || deltas.size() < 2)
        throw std::invalid_argument("excitation table needs matching columns");
    for (Eigen::Index i = 1; i < deltas.size(); ++i)
        if (!(deltas(i) > deltas(i - 1)))
            throw std::invalid_argument("excitation table must be sorted in Delta");
    StoredExcitation f;
    f.gaussian_ = false;
    f.tab_deltas_ = std::move(deltas);
    f.tab_values_ = std::move(values);
    return f;
}

StoredExcitation StoredExcitation::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open excitation table: " + path);
    std::vector<double> xs;
    std::vector<Complex> vs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double x, re, im;
        if (!(ss >> x >> re >> im))
            throw std::invalid_argument("malformed excitation table line: " + line);
        xs.push_back(x);
        vs.push_back(Complex(re, im));
    }
    return tabulated(Eigen::Map<const Eigen::VectorXd>(xs.data(), xs.size()),
                     Eigen::Map<const Eigen::VectorXcd>(vs.data(), vs.size()));
}

Complex StoredExcitation::operator()(double delta) const {
    if (gaussian_) {
        const double x = delta / width_;
        return scale_ * std::exp(-x * x) *
               std::exp(Complex(0.0, delta * t_emit_));
    }
    if (delta <= tab_deltas_(0) || delta >= tab_deltas_(tab_deltas_.size() - 1)) {
        if (delta == tab_deltas_(0)) return scale_ * tab_values_(0);
        if (delta == tab_deltas_(tab_deltas_.size() - 1))
            return scale_ * tab_values_(tab_values_.size() - 1);
        return Complex(0.0, 0.0);
    }
    const double* begin = tab_deltas_.data();
    const double* it = std::upper_bound(begin, begin + tab_deltas_.size(), delta);
    const Eigen::Index j = it - begin;
    const double t = (delta - tab_deltas_(j - 1)) /
                     (tab_deltas_(j) - tab_deltas_(j - 1));
    return scale_ * ((1.0 - t) * tab_values_(j - 1) + t * tab_values_(j));
}

std::string StoredExcitation::cache_key() const {
    std::ostringstream key;
    key.precision(17);
    if (gaussian_) {
        key << "fgauss:" << width_ << ':' << t_emit_ << ':' << scale_;
    } else {
        key << "ftab:" << tab_deltas_.size() << ':' << scale_ << ':'
            << tab_deltas_(0) << ':' << tab_deltas_(tab_deltas_.size() - 1) << ':'
            << tab_values_.sum();
    }
    return key.str();
}

std::vector<double> StoredExcitation::breakpoints() const {
    if (gaussian_) return {-2.0 * width_, -width_, 0.0, width_, 2.0 * width_};
    // Every table node is a kink of the piecewise-linear interpolant.
    return std::vector<double>(tab_deltas_.data(),
                               tab_deltas_.data() + tab_deltas_.size());
}

StoredExcitation normalize_excitation(const StoredExcitation& raw,
                                      const EmitterDistribution& dist,
                                      const TransitionParams& params) {
    const SpectralProfile n = dist.marginal_spectral();
    auto [lo, hi] = n.support();
    std::vector<double> brk = n.breakpoints();
    for (double b : raw.breakpoints()) brk.push_back(b);
    const QuadResult q = integrate_breakpoints(
        [&](double x) {
            return Complex(n.density(x) * std::norm(raw(x)), 0.0);
        },
        lo, hi, brk);
    const double overlap = q.value.real() * params.length / params.c;
    if (!(overlap > 1e-300))
        throw std::invalid_argument(
            "excitation has zero overlap with the emitter density");
    StoredExcitation out = raw;
    out.scale_ = raw.scale_ / std::sqrt(overlap);
    return out;
}

SpectralField mw_output_uniform(const StoredExcitation& f,
                                const SpectralProfile& profile,
                                const TransitionParams& params,
                                const FrequencyGrid& out_grid,
                                bool include_propagation_phase,
                                const QuadOptions& opts) {
    if (params.delta_k != 0.0)
        throw std::invalid_argument(
            "uniform transducer path requires a vanishing phase grating");
    const double n0 = profile.peak_density();
    const Eigen::VectorXcd h = cached_H(profile, params.gamma, out_grid, opts);
    const Eigen::VectorXcd cfun = cached_C(profile, f, params.gamma, out_grid, opts);
    const Complex pref(0.0, std::sqrt(params.d * n0 * params.length / params.c));
    SpectralField out(out_grid);
    for (int i = 0; i < out_grid.size(); ++i) {
        const double w = out_grid.point(i);
        const Complex x = Complex(0.0, 2.0 * M_PI * w * params.inv_cutoff) +
                          params.d * h(i);
        Complex phase(1.0, 0.0);
        if (include_propagation_phase)
            phase = std::exp(Complex(0.0, w * params.length / params.c_prime));
        out.amplitude(i) = pref * cfun(i) * phase * one_minus_exp_over(x);
    }
    return out;
}

SpectralField mw_output_approx(const StoredExcitation& f,
                               const SpectralProfile& profile,
                               const TransitionParams& params,
                               const FrequencyGrid& out_grid,
                               TransducerRegime regime,
                               bool include_propagation_phase,
                               const QuadOptions& opts) {
    const double n0 = profile.peak_density();
    const Eigen::VectorXcd cfun = cached_C(profile, f, params.gamma, out_grid, opts);
    SpectralField out(out_grid);
    if (regime == TransducerRegime::low_d) {
        const Complex pref(0.0, std::sqrt(params.d * n0 * params.length / params.c));
        for (int i = 0; i < out_grid.size(); ++i) {
            const double w = out_grid.point(i);
            const double arg = M_PI * w * params.inv_cutoff;
            Complex phase = std::exp(Complex(0.0, -arg));
            if (include_propagation_phase)
                phase *= std::exp(Complex(0.0, w * params.length / params.c_prime));
            out.amplitude(i) = pref * cfun(i) * phase * sinc(arg);
        }
    } else {
        const Eigen::VectorXcd h = cached_H(profile, params.gamma, out_grid, opts);
        const Complex pref(
            0.0, std::sqrt(n0 * params.length / (params.d * params.c)));
        for (int i = 0; i < out_grid.size(); ++i) {
            const double w = out_grid.point(i);
            Complex phase(1.0, 0.0);
            if (include_propagation_phase)
                phase = std::exp(Complex(0.0, w * params.length / params.c_prime));
            out.amplitude(i) = pref * (cfun(i) / h(i)) *
                               (1.0 - std::exp(-params.d * h(i))) * phase;
        }
    }
    return out;
}

SpectralField mw_output_general(const StoredExcitation& f,
                                const EmitterDistribution& dist,
                                const TransitionParams& params,
                                const FrequencyGrid& out_grid,
                                bool include_propagation_phase,
                                const QuadOptions& opts) {
    const double L = params.length;
    const double gamma = params.gamma;
    const double n0 = peak_n0(dist);
    const double mu0 = coupling_mu0(params, n0);
    const Complex pref = Complex(0.0, mu0 * L / (std::sqrt(2.0 * M_PI) * params.c));
    const int nz = 64;
    const GaussRule zrule = gauss_legendre(nz, 0.0, L);
    const bool separable = dist.is_separable();

    SpectralField out(out_grid);
    Eigen::VectorXcd hgrid;
    Eigen::VectorXcd dfun(out_grid.size());
    if (separable) {
        const SpectralProfile& n = dist.spectral();
        hgrid = cached_H(n, gamma, out_grid, opts);
        // dfun = \int dDelta n f / (i(Delta - omega) + gamma/2) = 2 pi n0 C.
        const Eigen::VectorXcd cfun = cached_C(n, f, gamma, out_grid, opts);
        dfun = 2.0 * M_PI * n0 * cfun;
    }

    for (int i = 0; i < out_grid.size(); ++i) {
        const double w = out_grid.point(i);
        Complex zint(0.0, 0.0);
        for (int m = 0; m < nz; ++m) {
            const double z = zrule.nodes(m);
            Complex h, dval;
            if (separable) {
                h = dist.spatial().mass_above(z) * hgrid(i);
                dval = dist.spatial().density(z) * dfun(i);
            } else {
                h = response_h(z, w, dist, gamma, opts);
                auto [lo, hi] = dist.marginal_spectral().support();
                std::vector<double> brk = f.breakpoints();
                for (double off : {0.0, gamma, -gamma, 4 * gamma, -4 * gamma})
                    brk.push_back(w + off);
                dval = integrate_breakpoints(
                           [&](double x) {
                               return dist.evaluate(z, x) * f(x) /
                                      Complex(0.5 * gamma, x - w);
                           },
                           lo, hi, brk, opts)
                           .value;
            }
            zint += zrule.weights(m) *
                    std::exp(Complex(0.0,
                                     params.delta_k * z -
                                         w * (L - z) * params.inverse_ceff) -
                             params.d * h) *
                    dval;
        }
        Complex phase(1.0, 0.0);
        if (include_propagation_phase)
            phase = std::exp(Complex(0.0, w * L / params.c_prime));
        out.amplitude(i) = pref * phase * zint;
    }
    return out;
}

} // namespace qmem

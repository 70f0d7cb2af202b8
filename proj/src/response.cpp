#include "qmem/response.hpp"

#include <cmath>
#include <sstream>

namespace qmem {

namespace {

// Breakpoints for the Lorentzian factor of half-width gamma/2 centered at omega.
void add_pole_breakpoints(std::vector<double>& bp, double omega, double gamma) {
    for (double m : {0.0, 1.0, -1.0, 4.0, -4.0, 16.0, -16.0})
        bp.push_back(omega + m * gamma);
}

} // namespace

Complex response_H(const SpectralProfile& profile, double gamma, double omega,
                   const QuadOptions& opts) {
    if (!(gamma > 0.0)) throw std::invalid_argument("response_H: gamma must be > 0");
    const double n0 = profile.peak_density();
    const auto [lo, hi] = profile.support();
    std::vector<double> bp = profile.breakpoints();
    add_pole_breakpoints(bp, omega, gamma);
    // 1/(i(Delta-omega)+gamma/2) = -i/(Delta - (omega + i gamma/2))
    const Complex pole(omega, 0.5 * gamma);
    auto f = [&](double delta) {
        return Complex(0.0, -1.0) * profile.density(delta) / (Complex(delta, 0.0) - pole);
    };
    const QuadResult r = integrate_breakpoints(f, lo, hi, std::move(bp), opts);
    return r.value / (2.0 * M_PI * n0);
}

Complex response_h(double z, double omega, const EmitterDistribution& dist, double gamma,
                   const QuadOptions& opts) {
    const double L = dist.length();
    if (z < 0.0 || z > L) throw std::invalid_argument("response_h: z outside [0, L]");
    if (dist.is_separable())
        return dist.spatial().mass_above(z) *
               response_H(dist.spectral(), gamma, omega, opts);

    // Tabulated G: outer Delta quadrature of the z-partial mass.
    const SpectralProfile marginal = dist.marginal_spectral();
    const double n0 = marginal.peak_density();
    const auto [lo, hi] = marginal.support();
    std::vector<double> bp = marginal.breakpoints();
    add_pole_breakpoints(bp, omega, gamma);
    const Complex pole(omega, 0.5 * gamma);
    auto partial_mass = [&](double delta) {
        // \int_z^L G(z', delta) dz' by composite Simpson.
        const int n = 129;
        const double hstep = (L - z) / (n - 1);
        if (hstep <= 0.0) return 0.0;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w * dist.evaluate(z + i * hstep, delta);
        }
        return s * hstep / 3.0;
    };
    auto f = [&](double delta) {
        return Complex(0.0, -1.0) * partial_mass(delta) / (Complex(delta, 0.0) - pole);
    };
    const QuadResult r = integrate_breakpoints(f, lo, hi, std::move(bp), opts);
    return r.value / (2.0 * M_PI * n0);
}

Complex response_C(const SpectralProfile& profile,
                   const std::function<Complex(double)>& f, double gamma, double omega,
                   const QuadOptions& opts) {
    if (!(gamma > 0.0)) throw std::invalid_argument("response_C: gamma must be > 0");
    const double n0 = profile.peak_density();
    const auto [lo, hi] = profile.support();
    std::vector<double> bp = profile.breakpoints();
    add_pole_breakpoints(bp, omega, gamma);
    const Complex pole(omega, 0.5 * gamma);
    auto integrand = [&](double delta) {
        return Complex(0.0, -1.0) * profile.density(delta) * f(delta) /
               (Complex(delta, 0.0) - pole);
    };
    const QuadResult r = integrate_breakpoints(integrand, lo, hi, std::move(bp), opts);
    return r.value / (2.0 * M_PI * n0);
}

Eigen::VectorXcd tabulate_H(const SpectralProfile& profile, double gamma,
                            const FrequencyGrid& grid, const QuadOptions& opts) {
    Eigen::VectorXcd out(grid.size());
    for (int i = 0; i < grid.size(); ++i)
        out(i) = response_H(profile, gamma, grid.point(i), opts);
    return out;
}

Eigen::VectorXcd tabulate_C(const SpectralProfile& profile,
                            const std::function<Complex(double)>& f, double gamma,
                            const FrequencyGrid& grid, const QuadOptions& opts) {
    Eigen::VectorXcd out(grid.size());
    for (int i = 0; i < grid.size(); ++i)
        out(i) = response_C(profile, f, gamma, grid.point(i), opts);
    return out;
}

namespace {
std::string grid_key(const FrequencyGrid& g) {
    std::ostringstream ss;
    ss.precision(17);
    ss << g.omega_min() << ':' << g.omega_max() << ':' << g.size();
    return ss.str();
}
} // namespace

const Eigen::VectorXcd& ResponseCache::H(const SpectralProfile& profile, double gamma,
                                         const FrequencyGrid& grid) {
    std::ostringstream key;
    key.precision(17);
    key << "H|" << profile.cache_key() << '|' << gamma << '|' << grid_key(grid);
    {
        std::lock_guard lock(mutex_);
        auto it = table_.find(key.str());
        if (it != table_.end()) return *it->second;
    }
    auto value = std::make_shared<Eigen::VectorXcd>(tabulate_H(profile, gamma, grid));
    std::lock_guard lock(mutex_);
    auto [it, inserted] = table_.emplace(key.str(), std::move(value));
    return *it->second;
}

const Eigen::VectorXcd& ResponseCache::C(const SpectralProfile& profile,
                                         const std::function<Complex(double)>& f,
                                         const std::string& f_key, double gamma,
                                         const FrequencyGrid& grid) {
    std::ostringstream key;
    key.precision(17);
    key << "C|" << profile.cache_key() << '|' << f_key << '|' << gamma << '|'
        << grid_key(grid);
    {
        std::lock_guard lock(mutex_);
        auto it = table_.find(key.str());
        if (it != table_.end()) return *it->second;
    }
    auto value = std::make_shared<Eigen::VectorXcd>(tabulate_C(profile, f, gamma, grid));
    std::lock_guard lock(mutex_);
    auto [it, inserted] = table_.emplace(key.str(), std::move(value));
    return *it->second;
}

ResponseCache& global_response_cache() {
    static ResponseCache cache;
    return cache;
}

SpectralField transmitted_intensity(const SpectralField& e_in,
                                    const EmitterDistribution& dist, double d,
                                    double gamma) {
    if (!(d >= 0.0)) throw std::invalid_argument("transmitted_intensity: d must be >= 0");
    const SpectralProfile n = dist.marginal_spectral();
    SpectralField out(e_in.grid);
    for (int i = 0; i < e_in.grid.size(); ++i) {
        const double att =
            std::exp(-2.0 * d * response_H(n, gamma, e_in.grid.point(i)).real());
        out.amplitude(i) = std::norm(e_in.amplitude(i)) * att;
    }
    return out;
}

} // namespace qmem

#include "qmem/oracle.hpp"

#include <cmath>
#include <fstream>

#include "qmem/errors.hpp"

namespace qmem {

namespace {

// Equal-mass detuning nodes: quantiles of the spectral density, each
// carrying weight 1/n so \int dDelta n(Delta) X(Delta) ~ mean of X(nodes).
Eigen::VectorXd quantile_nodes(const SpectralProfile& profile, int n) {
    auto [lo, hi] = profile.support();
    const int fine = 40001;
    Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(fine, lo, hi);
    Eigen::VectorXd cdf(fine);
    cdf(0) = 0.0;
    for (int i = 1; i < fine; ++i)
        cdf(i) = cdf(i - 1) + 0.5 * (xs(i) - xs(i - 1)) *
                                  (profile.density(xs(i)) + profile.density(xs(i - 1)));
    const double total = cdf(fine - 1);
    Eigen::VectorXd nodes(n);
    int k = 1;
    for (int j = 0; j < n; ++j) {
        const double target = total * (j + 0.5) / n;
        while (k < fine - 1 && cdf(k) < target) ++k;
        const double c0 = cdf(k - 1), c1 = cdf(k);
        const double t = (c1 > c0) ? (target - c0) / (c1 - c0) : 0.5;
        nodes(j) = xs(k - 1) + t * (xs(k) - xs(k - 1));
    }
    return nodes;
}

struct Sim {
    int nz;       // cells; nz + 1 nodes
    int nd;
    double L;
    double dz;
    Eigen::VectorXd z;
    Eigen::VectorXd ntilde; // linear emitter density at nodes
    Eigen::VectorXd deltas; // base (storage) detunings
    Eigen::VectorXcd E;
    Eigen::MatrixXcd P, S;  // (nz+1) x nd
    double t = 0.0;

    Sim(const EmitterDistribution& dist, const OracleSettings& s, double length)
        : nz(s.nz), nd(s.n_delta), L(length), dz(length / s.nz) {
        if (s.nz < 16 || s.n_delta < 8)
            throw std::invalid_argument("oracle resolution too coarse");
        if (!(s.cfl > 0.0) || s.cfl > 1.0 + 1e-12)
            throw std::invalid_argument("oracle CFL number must lie in (0, 1]");
        if (!dist.is_separable())
            throw std::invalid_argument(
                "time-domain oracle requires a separable emitter distribution");
        z = Eigen::VectorXd::LinSpaced(nz + 1, 0.0, L);
        ntilde.resize(nz + 1);
        for (int i = 0; i <= nz; ++i) ntilde(i) = dist.spatial().density(z(i));
        deltas = quantile_nodes(dist.spectral(), nd);
        E = Eigen::VectorXcd::Zero(nz + 1);
        P = Eigen::MatrixXcd::Zero(nz + 1, nd);
        S = Eigen::MatrixXcd::Zero(nz + 1, nd);
    }

    double excitation(double c) const {
        double field = 0.0;
        for (int i = 0; i <= nz; ++i) {
            const double w = (i == 0 || i == nz) ? 0.5 : 1.0;
            field += w * std::norm(E(i));
        }
        double pol = 0.0;
        for (int i = 0; i <= nz; ++i) {
            const double w = (i == 0 || i == nz) ? 0.5 : 1.0;
            double row = 0.0;
            for (int j = 0; j < nd; ++j) row += std::norm(P(i, j)) + std::norm(S(i, j));
            pol += w * ntilde(i) * row / nd;
        }
        return (field * dz + L * pol * dz) / c;
    }
};

struct PhaseCoeffs {
    double dt;
    double lambda;
    double mu0;
    double coupling; // mu0 * L / n_delta, absorbed into the field source
    Eigen::VectorXcd decay, phi;       // per detuning node
    Eigen::VectorXcd grating, grating_conj; // e^{ikz}, e^{-ikz} per z node
};

PhaseCoeffs make_coeffs(const Sim& sim, const TransitionParams& params,
                        const EmitterDistribution& dist,
                        const Eigen::VectorXd& detunings,
                        const OracleSettings& settings) {
    PhaseCoeffs c;
    c.dt = settings.cfl * sim.dz / params.c;
    c.lambda = settings.cfl;
    c.mu0 = std::isfinite(params.mu0)
                ? params.mu0
                : mu0_for_depth(params.d, peak_density(dist), params.length, params.c);
    c.coupling = c.mu0 * params.length / sim.nd;
    c.decay.resize(sim.nd);
    c.phi.resize(sim.nd);
    for (int j = 0; j < sim.nd; ++j) {
        const Complex a(0.5 * params.gamma, detunings(j));
        c.decay(j) = std::exp(-a * c.dt);
        c.phi(j) = (std::abs(a) * c.dt < 1e-8)
                       ? Complex(c.dt, 0.0)
                       : (1.0 - c.decay(j)) / a;
    }
    c.grating.resize(sim.nz + 1);
    c.grating_conj.resize(sim.nz + 1);
    for (int i = 0; i <= sim.nz; ++i) {
        c.grating(i) = std::exp(Complex(0.0, params.k * sim.z(i)));
        c.grating_conj(i) = std::conj(c.grating(i));
    }
    return c;
}

// One step of the coupled transport/polarization system. backward = true
// drives E_b (boundary at z = L), otherwise E_f (boundary at z = 0).
void step(Sim& sim, const PhaseCoeffs& c, bool backward,
          const std::function<Complex(double)>& boundary) {
    const int nz = sim.nz;
    Eigen::VectorXcd e_new(nz + 1);
    if (backward) {
        for (int i = 0; i < nz; ++i) {
            const Complex mean_p = sim.P.row(i).sum();
            const Complex src =
                Complex(0.0, c.coupling) * c.grating(i) * sim.ntilde(i) * mean_p;
            e_new(i) = sim.E(i) + c.lambda * (sim.E(i + 1) - sim.E(i)) + c.dt * src;
        }
        e_new(nz) = boundary ? boundary(sim.t + c.dt) : Complex(0.0, 0.0);
    } else {
        for (int i = 1; i <= nz; ++i) {
            const Complex mean_p = sim.P.row(i).sum();
            const Complex src = Complex(0.0, c.coupling) * c.grating_conj(i) *
                                sim.ntilde(i) * mean_p;
            e_new(i) = sim.E(i) - c.lambda * (sim.E(i) - sim.E(i - 1)) + c.dt * src;
        }
        e_new(0) = boundary ? boundary(sim.t + c.dt) : Complex(0.0, 0.0);
    }
    for (int i = 0; i <= nz; ++i) {
        const Complex drive =
            Complex(0.0, c.mu0) * sim.E(i) *
            (backward ? c.grating_conj(i) : c.grating(i));
        for (int j = 0; j < sim.nd; ++j)
            sim.P(i, j) = c.decay(j) * sim.P(i, j) + drive * c.phi(j);
    }
    sim.E = e_new;
    sim.t += c.dt;
}

void check_stability(double& last, long& steps_since, const Sim& sim, double c) {
    const double now = sim.excitation(c);
    if (last > 0.0 && now > last * (1.0 + 1e-6 * steps_since) + 1e-12)
        throw NumericError("time-domain integrator gained energy", now - last);
    last = now;
    steps_since = 0;
}

} // namespace

TimeDomainInput gaussian_input(double width, double t_center) {
    if (!(width > 0.0))
        throw std::invalid_argument("input width must be positive");
    const double n = std::pow(2.0 / (M_PI * width * width), 0.25);
    const double amp = n * width / std::sqrt(2.0);
    TimeDomainInput in;
    in.amplitude = [=](double t) {
        const double tau = t - t_center;
        return Complex(amp * std::exp(-width * width * tau * tau / 4.0), 0.0);
    };
    in.t_center = t_center;
    in.half_window = 12.0 / width;
    return in;
}

SpectralField OracleResult::spectrum(const FrequencyGrid& grid) const {
    SpectralField out(grid);
    if (times.size() < 2) return out;
    const double dt = times(1) - times(0);
    for (int i = 0; i < grid.size(); ++i) {
        const double w = grid.point(i);
        Complex acc(0.0, 0.0);
        for (Eigen::Index k = 0; k < times.size(); ++k)
            acc += std::exp(Complex(0.0, w * times(k))) * boundary_field(k);
        out.amplitude(i) = acc * dt / std::sqrt(2.0 * M_PI);
    }
    out.warnings = warnings;
    return out;
}

double OracleResult::energy() const {
    if (times.size() < 2) return 0.0;
    const double dt = times(1) - times(0);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < times.size(); ++k)
        acc += std::norm(boundary_field(k));
    return acc * dt;
}

void OracleResult::dump(const std::string& path) const {
    std::ofstream out(path);
    out.precision(12);
    out << "# t re im\n";
    for (Eigen::Index k = 0; k < times.size(); ++k)
        out << times(k) << ' ' << boundary_field(k).real() << ' '
            << boundary_field(k).imag() << '\n';
}

OracleResult oracle_storage(const TransitionParams& params,
                            const EmitterDistribution& dist,
                            const TimeDomainInput& input, double t_end,
                            const OracleSettings& settings) {
    Sim sim(dist, settings, params.length);
    PhaseCoeffs c = make_coeffs(sim, params, dist, sim.deltas, settings);
    sim.t = input.t_center - input.half_window;
    if (!(t_end > sim.t))
        throw std::invalid_argument("oracle_storage: empty time window");

    OracleResult result;
    if (settings.n_delta < 64)
        result.warnings.push_back("detuning grid below the cross-check baseline");
    const long n_steps = static_cast<long>(std::ceil((t_end - sim.t) / c.dt));
    std::vector<double> ts;
    std::vector<Complex> es;
    ts.reserve(n_steps);
    es.reserve(n_steps);
    double energy_in = 0.0;
    double transmitted = 0.0;
    double last_excitation = -1.0;
    long since_check = 0;
    for (long n = 0; n < n_steps; ++n) {
        energy_in += c.dt * std::norm(input.amplitude(sim.t + c.dt));
        step(sim, c, true, input.amplitude);
        transmitted += c.dt * std::norm(sim.E(0));
        ts.push_back(sim.t);
        es.push_back(sim.E(0));
        ++since_check;
        if (since_check >= 256) {
            if (std::abs(input.amplitude(sim.t)) < 1e-10) {
                check_stability(last_excitation, since_check, sim, params.c);
            } else {
                // while the drive is active the excitation grows legitimately;
                // restart the no-gain watchdog from scratch afterwards
                since_check = 0;
                last_excitation = -1.0;
            }
        }
    }
    result.times = Eigen::Map<const Eigen::VectorXd>(ts.data(), ts.size());
    result.boundary_field = Eigen::Map<const Eigen::VectorXcd>(es.data(), es.size());
    result.transmitted_fraction = energy_in > 0.0 ? transmitted / energy_in : 0.0;
    result.final_excitation = sim.excitation(params.c);
    return result;
}

OracleResult oracle_crib(const TransitionParams& storage,
                         const TransitionParams& retrieval,
                         const EmitterDistribution& dist,
                         const TimeDomainInput& input, double t0, double delta_t,
                         double t_storage, double record_window,
                         const OracleSettings& settings) {
    Sim sim(dist, settings, storage.length);
    PhaseCoeffs cs = make_coeffs(sim, storage, dist, sim.deltas, settings);

    OracleResult result;
    if (settings.n_delta < 64)
        result.warnings.push_back("detuning grid below the cross-check baseline");

    // --- storage phase: backward field, pi-pulse front sweeping backward.
    sim.t = t0;
    const double t_store_end = t0 + delta_t + storage.length / storage.c_prime;
    if (t_storage < t_store_end)
        throw std::invalid_argument(
            "retrieval must start after the storage pulse has crossed the medium");
    std::vector<bool> swapped(sim.nz + 1, false);
    double energy_in = 0.0;
    while (sim.t < t_store_end) {
        energy_in += cs.dt * std::norm(input.amplitude(sim.t + cs.dt));
        step(sim, cs, true, input.amplitude);
        for (int i = 0; i <= sim.nz; ++i) {
            if (swapped[i]) continue;
            const double cross = t0 + delta_t +
                                 (storage.length - sim.z(i)) / storage.c_prime;
            if (sim.t >= cross) {
                const Complex map =
                    Complex(0.0, -1.0) *
                    std::exp(Complex(0.0, storage.k_prime * sim.z(i)));
                sim.S.row(i) = map * sim.P.row(i);
                sim.P.row(i).setZero();
                swapped[i] = true;
            }
        }
    }
    (void)energy_in;
    for (int i = 0; i <= sim.nz; ++i) {
        if (swapped[i]) continue;
        const Complex map = Complex(0.0, -1.0) *
                            std::exp(Complex(0.0, storage.k_prime * sim.z(i)));
        sim.S.row(i) = map * sim.P.row(i);
        sim.P.row(i).setZero();
    }
    // Residual (unabsorbed) field leaves the medium and plays no further role.
    sim.E.setZero();

    // --- retrieval phase: reversed detunings, forward field and front.
    PhaseCoeffs cr = make_coeffs(sim, retrieval, dist, (-sim.deltas).eval(), settings);
    sim.t = t_storage;
    std::fill(swapped.begin(), swapped.end(), false);
    const double t_ret_end =
        t_storage + retrieval.length / retrieval.c_prime + record_window;
    std::vector<double> ts;
    std::vector<Complex> es;
    double last_excitation = -1.0;
    long since_check = 0;
    while (sim.t < t_ret_end) {
        for (int i = 0; i <= sim.nz; ++i) {
            if (swapped[i]) continue;
            const double cross = t_storage + sim.z(i) / retrieval.c_prime;
            if (sim.t + cr.dt >= cross) {
                const Complex map =
                    Complex(0.0, -1.0) *
                    std::exp(Complex(0.0, retrieval.k_prime * sim.z(i)));
                sim.P.row(i) = map * sim.S.row(i);
                sim.S.row(i).setZero();
                swapped[i] = true;
            }
        }
        step(sim, cr, false, nullptr);
        ts.push_back(sim.t);
        es.push_back(sim.E(sim.nz));
        ++since_check;
        // The pi-pulse front converts the (uncounted) spin wave back into
        // polarization, so the excitation grows until the front has crossed.
        if (since_check >= 256) {
            if (sim.t > t_storage + retrieval.length / retrieval.c_prime) {
                check_stability(last_excitation, since_check, sim, retrieval.c);
            } else {
                since_check = 0;
                last_excitation = -1.0;
            }
        }
    }
    result.times = Eigen::Map<const Eigen::VectorXd>(ts.data(), ts.size());
    result.boundary_field = Eigen::Map<const Eigen::VectorXcd>(es.data(), es.size());
    result.final_excitation = sim.excitation(retrieval.c);
    return result;
}

OracleResult oracle_transduction(const TransitionParams& params,
                                 const EmitterDistribution& dist,
                                 const StoredExcitation& excitation,
                                 double record_window,
                                 const OracleSettings& settings) {
    Sim sim(dist, settings, params.length);
    PhaseCoeffs c = make_coeffs(sim, params, dist, sim.deltas, settings);

    OracleResult result;
    if (settings.n_delta < 64)
        result.warnings.push_back("detuning grid below the cross-check baseline");

    sim.t = 0.0;
    std::vector<bool> injected(sim.nz + 1, false);
    const double t_end = params.length / params.c_prime + record_window;
    std::vector<double> ts;
    std::vector<Complex> es;
    double last_excitation = -1.0;
    long since_check = 0;
    while (sim.t < t_end) {
        for (int i = 0; i <= sim.nz; ++i) {
            if (injected[i]) continue;
            const double cross = sim.z(i) / params.c_prime;
            if (sim.t + c.dt >= cross) {
                const Complex map =
                    std::exp(Complex(0.0, params.k_prime * sim.z(i)));
                for (int j = 0; j < sim.nd; ++j)
                    sim.P(i, j) = map * excitation(sim.deltas(j));
                injected[i] = true;
            }
        }
        step(sim, c, false, nullptr);
        ts.push_back(sim.t);
        es.push_back(sim.E(sim.nz));
        ++since_check;
        // The injection front deposits polarization as it sweeps; only after
        // it has crossed the medium must the excitation be non-increasing.
        if (since_check >= 256) {
            if (sim.t > params.length / params.c_prime) {
                check_stability(last_excitation, since_check, sim, params.c);
            } else {
                since_check = 0;
                last_excitation = -1.0;
            }
        }
    }
    result.times = Eigen::Map<const Eigen::VectorXd>(ts.data(), ts.size());
    result.boundary_field = Eigen::Map<const Eigen::VectorXcd>(es.data(), es.size());
    result.final_excitation = sim.excitation(params.c);
    return result;
}

DeviationReport compare_spectra(const SpectralField& oracle_side,
                                const SpectralField& spectral_side) {
    if (!(oracle_side.grid == spectral_side.grid))
        throw std::invalid_argument("compare_spectra: fields on different grids");
    DeviationReport report;
    report.w_oracle = field_norm(oracle_side);
    report.w_spectral = field_norm(spectral_side);
    report.delta_w = std::abs(report.w_oracle - report.w_spectral);
    const Eigen::VectorXd w = trapezoid_weights(oracle_side.grid);
    double diff2 = 0.0, ref2 = 0.0;
    for (int i = 0; i < oracle_side.grid.size(); ++i) {
        diff2 += w(i) *
                 std::norm(oracle_side.amplitude(i) - spectral_side.amplitude(i));
        ref2 += w(i) * std::norm(spectral_side.amplitude(i));
    }
    report.rel_l2 = ref2 > 0.0 ? std::sqrt(diff2 / ref2)
                               : (diff2 > 0.0 ? 1.0 : 0.0);
    report.warnings = oracle_side.warnings;
    for (const auto& s : spectral_side.warnings) report.warnings.push_back(s);
    return report;
}

} // namespace qmem

#include "qmem/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmem {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

double interp_linear(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, double x) {
    if (x <= xs(0) || x >= xs(xs.size() - 1)) {
        if (x == xs(0)) return ys(0);
        if (x == xs(xs.size() - 1)) return ys(ys.size() - 1);
        return 0.0;
    }
    const auto it = std::upper_bound(xs.data(), xs.data() + xs.size(), x);
    const Eigen::Index i = it - xs.data() - 1;
    const double t = (x - xs(i)) / (xs(i + 1) - xs(i));
    return ys(i) + t * (ys(i + 1) - ys(i));
}

double trapz(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < xs.size(); ++i)
        s += 0.5 * (xs(i + 1) - xs(i)) * (ys(i) + ys(i + 1));
    return s;
}

void check_table(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("tabulated profile: need >= 2 samples");
    for (Eigen::Index i = 0; i + 1 < xs.size(); ++i)
        if (!(xs(i + 1) > xs(i)))
            throw std::invalid_argument("tabulated profile: abscissae must be increasing");
    if ((ys.array() < 0.0).any())
        throw std::invalid_argument("tabulated profile: negative density sample");
    if (ys.maxCoeff() <= 0.0)
        throw std::invalid_argument("tabulated profile: all-zero density");
}

} // namespace

ProfileShape profile_shape_from_string(const std::string& name) {
    if (name == "gaussian") return ProfileShape::gaussian;
    if (name == "sech") return ProfileShape::sech;
    if (name == "lorentzian") return ProfileShape::lorentzian;
    if (name == "uniform") return ProfileShape::uniform;
    if (name == "tabulated") return ProfileShape::tabulated;
    throw std::invalid_argument("unknown profile shape: " + name);
}

std::string to_string(ProfileShape shape) {
    switch (shape) {
        case ProfileShape::gaussian: return "gaussian";
        case ProfileShape::sech: return "sech";
        case ProfileShape::lorentzian: return "lorentzian";
        case ProfileShape::uniform: return "uniform";
        case ProfileShape::tabulated: return "tabulated";
    }
    return "?";
}

SpectralProfile::SpectralProfile(ProfileShape shape, double width, double center)
    : shape_(shape), width_(width), center_(center) {
    if (shape == ProfileShape::tabulated)
        throw std::invalid_argument("use SpectralProfile::tabulated for tables");
    if (!(width > 0.0))
        throw std::invalid_argument("SpectralProfile: width must be positive");
    switch (shape_) {
        case ProfileShape::gaussian:
        case ProfileShape::sech:
        case ProfileShape::uniform:
            norm_ = 1.0 / (kSqrtPi * width_);
            break;
        case ProfileShape::lorentzian:
            // N/(x^2 + a^2) with a = Gamma/sqrt(pi): integral = N pi / a = 1.
            norm_ = width_ / (kSqrtPi * M_PI);
            break;
        default:
            break;
    }
}

SpectralProfile SpectralProfile::tabulated(Eigen::VectorXd deltas, Eigen::VectorXd weights) {
    check_table(deltas, weights);
    const double mass = trapz(deltas, weights);
    if (!(mass > 0.0))
        throw std::invalid_argument("tabulated profile: zero mass");
    SpectralProfile p;
    p.shape_ = ProfileShape::tabulated;
    p.tab_deltas_ = std::move(deltas);
    p.tab_values_ = weights / mass;
    p.width_ = p.tab_deltas_(p.tab_deltas_.size() - 1) - p.tab_deltas_(0);
    p.center_ = 0.0;
    return p;
}

SpectralProfile SpectralProfile::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open profile table: " + path);
    std::vector<double> xs, ys;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x, y;
        if (ss >> x >> y) {
            xs.push_back(x);
            ys.push_back(y);
        }
    }
    Eigen::VectorXd vx = Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size());
    Eigen::VectorXd vy = Eigen::Map<Eigen::VectorXd>(ys.data(), ys.size());
    return tabulated(std::move(vx), std::move(vy));
}

double SpectralProfile::density(double delta) const {
    const double x = delta - center_;
    switch (shape_) {
        case ProfileShape::gaussian:
            return norm_ * std::exp(-x * x / (width_ * width_));
        case ProfileShape::sech:
            return norm_ / std::cosh(kSqrtPi * x / width_);
        case ProfileShape::lorentzian: {
            const double a = width_ / kSqrtPi;
            return norm_ / (x * x + a * a);
        }
        case ProfileShape::uniform:
            return std::abs(x) <= kSqrtPi * width_ / 2.0 ? norm_ : 0.0;
        case ProfileShape::tabulated:
            return interp_linear(tab_deltas_, tab_values_, delta);
    }
    return 0.0;
}

double SpectralProfile::peak_density() const {
    if (shape_ == ProfileShape::tabulated) return tab_values_.maxCoeff();
    return 1.0 / (kSqrtPi * width_);
}

std::pair<double, double> SpectralProfile::support() const {
    switch (shape_) {
        case ProfileShape::uniform:
            return {center_ - kSqrtPi * width_ / 2.0, center_ + kSqrtPi * width_ / 2.0};
        case ProfileShape::lorentzian:
            // heavy tails: the mass beyond +-2000 widths is below 2e-4
            return {center_ - 2000.0 * width_, center_ + 2000.0 * width_};
        case ProfileShape::tabulated:
            return {tab_deltas_(0), tab_deltas_(tab_deltas_.size() - 1)};
        default:
            return {center_ - 10.0 * width_, center_ + 10.0 * width_};
    }
}

std::vector<double> SpectralProfile::breakpoints() const {
    std::vector<double> bp;
    if (shape_ == ProfileShape::uniform) {
        auto [lo, hi] = support();
        bp = {lo, hi};
    } else if (shape_ == ProfileShape::tabulated) {
        bp.assign(tab_deltas_.data(), tab_deltas_.data() + tab_deltas_.size());
    } else {
        bp = {center_ - width_, center_, center_ + width_};
    }
    return bp;
}

std::string SpectralProfile::cache_key() const {
    std::ostringstream ss;
    ss.precision(17);
    ss << to_string(shape_) << ':' << width_ << ':' << center_;
    if (shape_ == ProfileShape::tabulated) {
        ss << ":n" << tab_deltas_.size();
        for (Eigen::Index i = 0; i < tab_deltas_.size(); ++i)
            ss << ',' << tab_deltas_(i) << '=' << tab_values_(i);
    }
    return ss.str();
}

SpectralProfile make_profile(ProfileShape shape, double width, double center) {
    return SpectralProfile(shape, width, center);
}

SpectralProfile compose_broadening(const SpectralProfile& reversible,
                                   const SpectralProfile& irreversible) {
    // Convolution is symmetric; fix which factor is sampled by an
    // order-independent rule so the composition is exactly commutative.
    const SpectralProfile* outer = &reversible;
    const SpectralProfile* inner = &irreversible;
    if (inner->width() > outer->width() ||
        (inner->width() == outer->width() &&
         inner->cache_key() > outer->cache_key()))
        std::swap(outer, inner);

    const auto [a_lo, a_hi] = outer->support();
    const auto [b_lo, b_hi] = inner->support();
    const double lo = a_lo + b_lo, hi = a_hi + b_hi;
    const double res = std::min(outer->width(), inner->width()) / 50.0;
    const int n_out = std::min(4001, std::max(201, (int)std::ceil((hi - lo) / res)) | 1);
    const int n_in = std::min(8001, std::max(401, (int)std::ceil((b_hi - b_lo) / res)) | 1);

    // Integration nodes over the inner factor, snapped to its kinks.
    std::vector<double> nodes;
    nodes.reserve(n_in + 8);
    for (int j = 0; j < n_in; ++j)
        nodes.push_back(b_lo + (b_hi - b_lo) * j / double(n_in - 1));
    for (double b : inner->breakpoints())
        if (b > b_lo && b < b_hi) nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [&](double a, double b) {
                                return std::abs(a - b) < 1e-12 * (b_hi - b_lo);
                            }),
                nodes.end());
    const int m = static_cast<int>(nodes.size());
    Eigen::VectorXd wb(m);
    for (int j = 0; j < m; ++j) wb(j) = inner->density(nodes[j]);

    Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(n_out, lo, hi);
    Eigen::VectorXd conv(n_out);
    for (int i = 0; i < n_out; ++i) {
        double s = 0.0;
        for (int j = 0; j + 1 < m; ++j) {
            const double h = nodes[j + 1] - nodes[j];
            s += 0.5 * h *
                 (outer->density(xs(i) - nodes[j]) * wb(j) +
                  outer->density(xs(i) - nodes[j + 1]) * wb(j + 1));
        }
        conv(i) = s;
    }
    return SpectralProfile::tabulated(std::move(xs), std::move(conv));
}

SpatialProfile SpatialProfile::uniform(double length) {
    if (!(length > 0.0))
        throw std::invalid_argument("SpatialProfile: length must be positive");
    SpatialProfile p;
    p.length_ = length;
    p.uniform_ = true;
    return p;
}

SpatialProfile SpatialProfile::tabulated(double length, Eigen::VectorXd zs,
                                         Eigen::VectorXd weights) {
    if (!(length > 0.0))
        throw std::invalid_argument("SpatialProfile: length must be positive");
    check_table(zs, weights);
    if (zs(0) < 0.0 || zs(zs.size() - 1) > length)
        throw std::invalid_argument("SpatialProfile: samples outside [0, L]");
    const double mass = trapz(zs, weights);
    SpatialProfile p;
    p.length_ = length;
    p.uniform_ = false;
    p.tab_z_ = std::move(zs);
    p.tab_values_ = weights / mass;
    p.tab_cumulative_.resize(p.tab_z_.size());
    p.tab_cumulative_(0) = 0.0;
    for (Eigen::Index i = 1; i < p.tab_z_.size(); ++i)
        p.tab_cumulative_(i) =
            p.tab_cumulative_(i - 1) + 0.5 * (p.tab_z_(i) - p.tab_z_(i - 1)) *
                                           (p.tab_values_(i) + p.tab_values_(i - 1));
    return p;
}

double SpatialProfile::density(double z) const {
    if (z < 0.0 || z > length_)
        throw std::invalid_argument("SpatialProfile: z outside [0, L]");
    if (uniform_) return 1.0 / length_;
    return interp_linear(tab_z_, tab_values_, z);
}

double SpatialProfile::mass_above(double z) const {
    if (uniform_) return (length_ - z) / length_;
    const double total = tab_cumulative_(tab_cumulative_.size() - 1);
    if (z <= tab_z_(0)) return total;
    if (z >= tab_z_(tab_z_.size() - 1)) return 0.0;
    const auto it = std::upper_bound(tab_z_.data(), tab_z_.data() + tab_z_.size(), z);
    const Eigen::Index i = it - tab_z_.data() - 1;
    const double v = interp_linear(tab_z_, tab_values_, z);
    const double below =
        tab_cumulative_(i) + 0.5 * (z - tab_z_(i)) * (tab_values_(i) + v);
    return total - below;
}

EmitterDistribution EmitterDistribution::separable(SpatialProfile spatial,
                                                   SpectralProfile spectral) {
    EmitterDistribution d;
    d.separable_ = true;
    d.spatial_ = std::move(spatial);
    d.spectral_ = std::move(spectral);
    return d;
}

EmitterDistribution EmitterDistribution::tabulated(Eigen::VectorXd zs,
                                                   Eigen::VectorXd deltas,
                                                   Eigen::MatrixXd values) {
    if (values.rows() != zs.size() || values.cols() != deltas.size())
        throw std::invalid_argument("EmitterDistribution: table dimensions mismatch");
    if ((values.array() < 0.0).any())
        throw std::invalid_argument("EmitterDistribution: negative density");
    // Renormalize by the 2D trapezoid mass.
    Eigen::VectorXd row(zs.size());
    for (Eigen::Index i = 0; i < zs.size(); ++i)
        row(i) = trapz(deltas, values.row(i).transpose());
    const double mass = trapz(zs, row);
    if (!(mass > 0.0))
        throw std::invalid_argument("EmitterDistribution: zero mass");
    EmitterDistribution d;
    d.separable_ = false;
    d.tab_z_ = std::move(zs);
    d.tab_delta_ = std::move(deltas);
    d.tab_values_ = values / mass;
    d.spatial_ = SpatialProfile::uniform(d.tab_z_(d.tab_z_.size() - 1) > 0
                                             ? d.tab_z_(d.tab_z_.size() - 1)
                                             : 1.0);
    return d;
}

double EmitterDistribution::evaluate(double z, double delta) const {
    if (z < 0.0 || z > length())
        throw std::invalid_argument("EmitterDistribution: z outside [0, L]");
    if (separable_)
        return spatial_->density(z) * spectral_->density(delta);
    // bilinear interpolation
    if (z < tab_z_(0) || z > tab_z_(tab_z_.size() - 1)) return 0.0;
    if (delta <= tab_delta_(0) || delta >= tab_delta_(tab_delta_.size() - 1)) {
        if (delta != tab_delta_(0) && delta != tab_delta_(tab_delta_.size() - 1)) return 0.0;
    }
    auto locate = [](const Eigen::VectorXd& xs, double x) {
        Eigen::Index i =
            std::upper_bound(xs.data(), xs.data() + xs.size(), x) - xs.data() - 1;
        return std::clamp<Eigen::Index>(i, 0, xs.size() - 2);
    };
    const Eigen::Index i = locate(tab_z_, z);
    const Eigen::Index j = locate(tab_delta_, delta);
    const double tz = (z - tab_z_(i)) / (tab_z_(i + 1) - tab_z_(i));
    const double td = (delta - tab_delta_(j)) / (tab_delta_(j + 1) - tab_delta_(j));
    return (1 - tz) * ((1 - td) * tab_values_(i, j) + td * tab_values_(i, j + 1)) +
           tz * ((1 - td) * tab_values_(i + 1, j) + td * tab_values_(i + 1, j + 1));
}

SpectralProfile EmitterDistribution::marginal_spectral() const {
    if (separable_) return *spectral_;
    Eigen::VectorXd n(tab_delta_.size());
    for (Eigen::Index j = 0; j < tab_delta_.size(); ++j)
        n(j) = trapz(tab_z_, tab_values_.col(j));
    return SpectralProfile::tabulated(tab_delta_, n);
}

SpatialProfile EmitterDistribution::marginal_spatial() const {
    if (separable_) return *spatial_;
    Eigen::VectorXd nt(tab_z_.size());
    for (Eigen::Index i = 0; i < tab_z_.size(); ++i)
        nt(i) = trapz(tab_delta_, tab_values_.row(i).transpose());
    return SpatialProfile::tabulated(tab_z_(tab_z_.size() - 1), tab_z_, nt);
}

double EmitterDistribution::peak_density() const {
    return marginal_spectral().peak_density();
}

const SpatialProfile& EmitterDistribution::spatial() const {
    if (!separable_)
        throw std::logic_error("spatial(): distribution is not separable");
    return *spatial_;
}

const SpectralProfile& EmitterDistribution::spectral() const {
    if (!separable_)
        throw std::logic_error("spectral(): distribution is not separable");
    return *spectral_;
}

double peak_density(const EmitterDistribution& dist) { return dist.peak_density(); }

} // namespace qmem

#include "hfloc/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hfloc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kUnitModulusTol = 1e-9;
}

CVec nf_steering(const SphericalPoint& p, const RisConfig& cfg) {
    const int n_elem = cfg.size();
    const double k = 2.0 * kPi / cfg.wavelength;
    const Eigen::Vector3d x = spherical_to_cartesian(p);
    CVec out(n_elem);
    for (int n = 0; n < n_elem; ++n) {
        const Eigen::Vector2d& e = cfg.element_coords[static_cast<std::size_t>(n)];
        const double dy = x.y() - e.x();
        const double dz = x.z() - e.y();
        const double d = std::sqrt(x.x() * x.x() + dy * dy + dz * dz);
        out[n] = std::polar(1.0, -k * d);
    }
    return out;
}

CVec ff_steering(double polar, double azimuth, const RisConfig& cfg) {
    if (!(polar > 0.0 && polar < kPi) || !(azimuth > 0.0 && azimuth < kPi)) {
        throw std::invalid_argument("ff_steering: angles must lie in (0, pi)");
    }
    const int n_elem = cfg.size();
    const double k = 2.0 * kPi / cfg.wavelength;
    const double u = std::sin(polar) * std::sin(azimuth);
    const double v = std::cos(polar);
    CVec out(n_elem);
    for (int n = 0; n < n_elem; ++n) {
        const Eigen::Vector2d& e = cfg.element_coords[static_cast<std::size_t>(n)];
        out[n] = std::polar(1.0, -k * (-e.x() * u - e.y() * v));
    }
    return out;
}

CVec hybrid_steering(const SphericalPoint& p, const RisConfig& cfg) {
    if (classify_region(p, cfg) == RegionTag::NearField) {
        return nf_steering(p, cfg);
    }
    return ff_steering(p.polar, p.azimuth, cfg);
}

CVec user_ris_channel(const SphericalPoint& user,
                      const std::vector<SphericalPoint>& scatters,
                      Complex direct_gain,
                      const std::vector<Complex>& scatter_gains,
                      const RisConfig& cfg) {
    if (scatters.size() != scatter_gains.size()) {
        throw std::invalid_argument("user_ris_channel: gains list length must match scatter count");
    }
    CVec h = direct_gain * hybrid_steering(user, cfg);
    for (std::size_t l = 0; l < scatters.size(); ++l) {
        h += scatter_gains[l] * hybrid_steering(scatters[l], cfg);
    }
    return h;
}

CVec cascaded_channel(const CVec& h_a, const CVec& h_t) {
    if (h_a.size() != h_t.size()) {
        throw std::invalid_argument("cascaded_channel: length mismatch");
    }
    return h_a.cwiseProduct(h_t);
}

Complex complex_gaussian(double sigma2, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(sigma2 / 2.0));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

Complex received_signal(const CVec& beta, const CVec& h, Complex s, double sigma2,
                        std::mt19937_64& rng) {
    if (beta.size() != h.size()) {
        throw std::invalid_argument("received_signal: length mismatch");
    }
    for (Eigen::Index n = 0; n < beta.size(); ++n) {
        if (std::abs(std::abs(beta[n]) - 1.0) > kUnitModulusTol) {
            throw std::invalid_argument("received_signal: phase shifts must be unit modulus");
        }
    }
    Complex y = beta.transpose() * h;
    y *= s;
    if (sigma2 > 0.0) {
        y += complex_gaussian(sigma2, rng);
    }
    return y;
}

}  // namespace hfloc

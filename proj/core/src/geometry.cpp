#include "hfloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hfloc {

namespace {
constexpr double kPi = std::numbers::pi;
}

SphericalPoint::SphericalPoint(double range_m, double polar_rad, double azimuth_rad)
    : range(range_m), polar(polar_rad), azimuth(azimuth_rad) {
    if (!(range > 0.0)) {
        throw std::invalid_argument("SphericalPoint: range must be positive");
    }
    if (!(polar > 0.0 && polar < kPi)) {
        throw std::invalid_argument("SphericalPoint: polar angle must lie in (0, pi)");
    }
    if (!(azimuth > 0.0 && azimuth < kPi)) {
        throw std::invalid_argument("SphericalPoint: azimuth must lie in (0, pi)");
    }
}

RisConfig RisConfig::uniform(int rows, int cols, double spacing, double wavelength) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("RisConfig: rows and cols must be at least 1");
    }
    if (!(spacing > 0.0) || !(wavelength > 0.0)) {
        throw std::invalid_argument("RisConfig: spacing and wavelength must be positive");
    }
    RisConfig cfg;
    cfg.rows = rows;
    cfg.cols = cols;
    cfg.spacing = spacing;
    cfg.wavelength = wavelength;
    cfg.element_coords = ris_element_positions(cfg);
    return cfg;
}

std::vector<Eigen::Vector2d> ris_element_positions(const RisConfig& cfg) {
    std::vector<Eigen::Vector2d> coords;
    coords.reserve(static_cast<std::size_t>(cfg.rows) * cfg.cols);
    const double y0 = 0.5 * (cfg.rows - 1) * cfg.spacing;
    const double z0 = 0.5 * (cfg.cols - 1) * cfg.spacing;
    for (int r = 0; r < cfg.rows; ++r) {
        for (int c = 0; c < cfg.cols; ++c) {
            coords.emplace_back(r * cfg.spacing - y0, c * cfg.spacing - z0);
        }
    }
    return coords;
}

Eigen::Vector3d spherical_to_cartesian(const SphericalPoint& p) {
    const double st = std::sin(p.polar);
    return {p.range * st * std::cos(p.azimuth),
            p.range * st * std::sin(p.azimuth),
            p.range * std::cos(p.polar)};
}

double distance_to_element(const SphericalPoint& p, int n, const RisConfig& cfg) {
    if (n < 0 || n >= static_cast<int>(cfg.element_coords.size())) {
        throw std::out_of_range("distance_to_element: element index out of bounds");
    }
    const Eigen::Vector3d x = spherical_to_cartesian(p);
    const Eigen::Vector2d& e = cfg.element_coords[static_cast<std::size_t>(n)];
    const double dy = x.y() - e.x();
    const double dz = x.z() - e.y();
    return std::sqrt(x.x() * x.x() + dy * dy + dz * dz);
}

double max_phase_error(const SphericalPoint& p, const RisConfig& cfg) {
    const Eigen::Vector3d x = spherical_to_cartesian(p);
    const double u = std::sin(p.polar) * std::sin(p.azimuth);  // direction cosine on Y
    const double v = std::cos(p.polar);                        // direction cosine on Z
    const double k = 2.0 * kPi / cfg.wavelength;
    double worst = -std::numeric_limits<double>::infinity();
    for (const Eigen::Vector2d& e : cfg.element_coords) {
        const double dy = x.y() - e.x();
        const double dz = x.z() - e.y();
        const double d = std::sqrt(x.x() * x.x() + dy * dy + dz * dz);
        const double planar = p.range - e.x() * u - e.y() * v;
        worst = std::max(worst, k * (d - planar));
    }
    return worst;
}

RegionTag classify_region(const SphericalPoint& p, const RisConfig& cfg) {
    return max_phase_error(p, cfg) > kNearFieldPhaseThreshold ? RegionTag::NearField
                                                              : RegionTag::FarField;
}

}  // namespace hfloc

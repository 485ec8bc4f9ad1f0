#ifndef HFLOC_GEOMETRY_HPP
#define HFLOC_GEOMETRY_HPP

#include <vector>

#include <Eigen/Core>

namespace hfloc {

inline constexpr double kNearFieldPhaseThreshold = 3.14159265358979323846 / 8.0;

/// Location in spherical coordinates: range R [m], polar angle theta and
/// azimuth phi, both restricted to (0, pi). The panel sits on the Y-Z plane,
/// so the admissible angle domain covers the illuminated half-space.
struct SphericalPoint {
    double range;    ///< R > 0, meters
    double polar;    ///< theta in (0, pi), radians
    double azimuth;  ///< phi in (0, pi), radians

    SphericalPoint(double range_m, double polar_rad, double azimuth_rad);
};

/// Rectangular reflecting panel on the Y-Z plane, centered at the origin.
/// Element ordering is row-major over (rows, cols): rows advance along Y,
/// columns along Z. Every matrix in the library whose rows or columns index
/// panel elements uses this ordering.
struct RisConfig {
    int rows = 1;
    int cols = 1;
    double spacing = 0.03;     ///< inter-element pitch, meters
    double wavelength = 0.06;  ///< carrier wavelength, meters

    /// (y, z) coordinates of each element, precomputed row-major.
    std::vector<Eigen::Vector2d> element_coords;

    static RisConfig uniform(int rows, int cols, double spacing, double wavelength);

    int size() const { return rows * cols; }
};

enum class RegionTag { NearField, FarField };

/// Element coordinates for a panel, row-major, grid centered at the origin.
std::vector<Eigen::Vector2d> ris_element_positions(const RisConfig& cfg);

/// x = R sin(theta) cos(phi), y = R sin(theta) sin(phi), z = R cos(theta).
Eigen::Vector3d spherical_to_cartesian(const SphericalPoint& p);

/// Euclidean distance between the point and element n of the panel.
double distance_to_element(const SphericalPoint& p, int n, const RisConfig& cfg);

/// Maximum (signed) phase error of the plane-wave approximation across all
/// elements: max_n (2 pi / lambda) * (d_n - (R - y_n sin t sin f - z_n cos t)).
double max_phase_error(const SphericalPoint& p, const RisConfig& cfg);

/// NearField iff max_phase_error exceeds pi/8; the boundary itself is FarField.
RegionTag classify_region(const SphericalPoint& p, const RisConfig& cfg);

}  // namespace hfloc

#endif

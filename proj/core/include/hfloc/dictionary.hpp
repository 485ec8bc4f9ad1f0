#ifndef HFLOC_DICTIONARY_HPP
#define HFLOC_DICTIONARY_HPP

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hfloc/channel.hpp"
#include "hfloc/geometry.hpp"

namespace hfloc {

/// One candidate location. NF entries carry a range; FF entries are
/// angle-only and their range field is zero.
struct AtomLocation {
    RegionTag region = RegionTag::FarField;
    double range = 0.0;
    double polar = 0.0;
    double azimuth = 0.0;
};

/// Sampled candidate locations and their steering vectors, NF columns first.
/// The index -> location mapping is immutable after construction.
struct AtomDictionary {
    std::vector<AtomLocation> locations;
    Eigen::MatrixXcd atoms;        ///< N x M, columns [F_near, F_far]
    Eigen::Index near_count = 0;   ///< S
    Eigen::Index far_count = 0;    ///< N_theta * N_phi

    Eigen::Index size() const { return atoms.cols(); }
};

/// Parameters of the sampling lattice.
struct GridConfig {
    double r_min = 0.25;     ///< innermost NF range sample, meters
    double range_step = 0.25;
    int n_polar = 10;        ///< angular samples per axis, spacing pi / n
    int n_azimuth = 10;
};

/// NF candidate locations: angular lattice at cell midpoints, ranges from
/// r_min in steps of range_step, clipped per angle at the pi/8 phase-error
/// boundary. Every returned point classifies as NearField.
std::vector<SphericalPoint> sample_nf_grid(const RisConfig& cfg, double r_min,
                                           double range_step, int n_polar, int n_azimuth);

/// FF candidate angles on the same angular lattice as the NF grid.
std::vector<std::pair<double, double>> sample_ff_grid(int n_polar, int n_azimuth);

/// Steering-vector dictionary [F_near, F_far] over the given grids.
AtomDictionary build_atom_channels(const std::vector<SphericalPoint>& grid_nf,
                                   const std::vector<std::pair<double, double>>& grid_ff,
                                   const RisConfig& cfg);

AtomDictionary build_atom_dictionary(const RisConfig& cfg, const GridConfig& grid);

/// Atom signals Lambda^k = B diag(h_A) F s for a full phase history, where B
/// is c x N with one cycle per row.
Eigen::MatrixXcd build_atom_signals(const Eigen::MatrixXcd& phase_rows, const CVec& h_a,
                                    const Eigen::MatrixXcd& atoms, Complex s);

/// Single new row of Lambda^k for one additional cycle.
Eigen::RowVectorXcd atom_signal_row(const CVec& beta, const CVec& h_a,
                                    const Eigen::MatrixXcd& atoms, Complex s);

}  // namespace hfloc

#endif

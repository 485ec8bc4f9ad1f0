#include "hfloc/dictionary.hpp"

#include <numbers>
#include <stdexcept>

namespace hfloc {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<SphericalPoint> sample_nf_grid(const RisConfig& cfg, double r_min,
                                           double range_step, int n_polar, int n_azimuth) {
    if (!(r_min > 0.0) || !(range_step > 0.0)) {
        throw std::invalid_argument("sample_nf_grid: r_min and range_step must be positive");
    }
    if (n_polar < 1 || n_azimuth < 1) {
        throw std::invalid_argument("sample_nf_grid: need at least one angular sample per axis");
    }
    std::vector<SphericalPoint> grid;
    for (int i = 0; i < n_polar; ++i) {
        const double theta = (i + 0.5) * kPi / n_polar;
        for (int j = 0; j < n_azimuth; ++j) {
            const double phi = (j + 0.5) * kPi / n_azimuth;
            // The NF boundary is angle-dependent; walk outward until the
            // plane-wave error drops to pi/8.
            for (double r = r_min;; r += range_step) {
                SphericalPoint p(r, theta, phi);
                if (classify_region(p, cfg) != RegionTag::NearField) {
                    break;
                }
                grid.push_back(p);
            }
        }
    }
    return grid;
}

std::vector<std::pair<double, double>> sample_ff_grid(int n_polar, int n_azimuth) {
    if (n_polar < 1 || n_azimuth < 1) {
        throw std::invalid_argument("sample_ff_grid: need at least one angular sample per axis");
    }
    std::vector<std::pair<double, double>> grid;
    grid.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
    for (int i = 0; i < n_polar; ++i) {
        const double theta = (i + 0.5) * kPi / n_polar;
        for (int j = 0; j < n_azimuth; ++j) {
            const double phi = (j + 0.5) * kPi / n_azimuth;
            grid.emplace_back(theta, phi);
        }
    }
    return grid;
}

AtomDictionary build_atom_channels(const std::vector<SphericalPoint>& grid_nf,
                                   const std::vector<std::pair<double, double>>& grid_ff,
                                   const RisConfig& cfg) {
    if (grid_nf.empty() && grid_ff.empty()) {
        throw std::invalid_argument("build_atom_channels: both grids are empty");
    }
    AtomDictionary dict;
    dict.near_count = static_cast<Eigen::Index>(grid_nf.size());
    dict.far_count = static_cast<Eigen::Index>(grid_ff.size());
    const Eigen::Index m = dict.near_count + dict.far_count;
    dict.atoms.resize(cfg.size(), m);
    dict.locations.reserve(static_cast<std::size_t>(m));
    Eigen::Index col = 0;
    for (const SphericalPoint& p : grid_nf) {
        dict.atoms.col(col++) = nf_steering(p, cfg);
        dict.locations.push_back({RegionTag::NearField, p.range, p.polar, p.azimuth});
    }
    for (const auto& [theta, phi] : grid_ff) {
        dict.atoms.col(col++) = ff_steering(theta, phi, cfg);
        dict.locations.push_back({RegionTag::FarField, 0.0, theta, phi});
    }
    return dict;
}

AtomDictionary build_atom_dictionary(const RisConfig& cfg, const GridConfig& grid) {
    return build_atom_channels(
        sample_nf_grid(cfg, grid.r_min, grid.range_step, grid.n_polar, grid.n_azimuth),
        sample_ff_grid(grid.n_polar, grid.n_azimuth), cfg);
}

Eigen::RowVectorXcd atom_signal_row(const CVec& beta, const CVec& h_a,
                                    const Eigen::MatrixXcd& atoms, Complex s) {
    if (beta.size() != atoms.rows() || h_a.size() != atoms.rows()) {
        throw std::invalid_argument("atom_signal_row: dimension mismatch");
    }
    return (beta.cwiseProduct(h_a).transpose() * atoms) * s;
}

Eigen::MatrixXcd build_atom_signals(const Eigen::MatrixXcd& phase_rows, const CVec& h_a,
                                    const Eigen::MatrixXcd& atoms, Complex s) {
    if (phase_rows.cols() != atoms.rows() || h_a.size() != atoms.rows()) {
        throw std::invalid_argument("build_atom_signals: dimension mismatch");
    }
    Eigen::MatrixXcd lambda(phase_rows.rows(), atoms.cols());
    for (Eigen::Index c = 0; c < phase_rows.rows(); ++c) {
        lambda.row(c) = atom_signal_row(phase_rows.row(c).transpose(), h_a, atoms, s);
    }
    return lambda;
}

}  // namespace hfloc

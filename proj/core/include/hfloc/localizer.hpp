#ifndef HFLOC_LOCALIZER_HPP
#define HFLOC_LOCALIZER_HPP

#include <vector>

#include <Eigen/Core>

#include "hfloc/dictionary.hpp"

namespace hfloc {

struct LocalizerConfig {
    int max_scatters = 3;             ///< L_max
    double residual_fraction = 0.05;  ///< gamma, stop when E^r < gamma * E
};

struct LocalizationResult {
    std::vector<Eigen::Index> coarse_indices;
    std::vector<Complex> coarse_gains;
    std::vector<Eigen::Index> user_indices;  ///< refined, one per user
    std::vector<AtomLocation> user_locations;
    std::vector<Complex> refined_gains;
    std::vector<Eigen::Index> support;       ///< scatter atom indices, selection order
    Eigen::MatrixXcd support_gains;          ///< |support| x K, OLS gains
    std::vector<double> residual_energies;   ///< sum over users, per SIC iteration
    double coarse_loss = 0.0;
    double refined_loss = 0.0;
    bool support_truncated = false;          ///< newest atom dropped on rank deficiency
    int refined_in_support = 0;              ///< refined index collided with a scatter atom
};

/// Strongest-correlation atom and its least-squares gain for one user.
std::pair<Eigen::Index, Complex> coarse_user_estimate(const Eigen::VectorXcd& g,
                                                      const Eigen::MatrixXcd& atom_signals);

/// Residual after removing the selected direct-path component.
Eigen::VectorXcd subtract_direct_path(const Eigen::VectorXcd& g,
                                      const Eigen::MatrixXcd& atom_signals,
                                      Eigen::Index index, Complex gain);

struct ScatterEstimate {
    std::vector<Eigen::Index> support;
    Eigen::MatrixXcd gains;                 ///< |support| x K
    std::vector<Eigen::VectorXcd> residuals;
    std::vector<double> residual_energies;
    bool truncated = false;
};

/// Greedy joint scatter estimation with OLS re-fit against the initial
/// residuals. total_energy is the energy of the original received signals.
ScatterEstimate estimate_scatters(const std::vector<Eigen::VectorXcd>& initial_residuals,
                                  const std::vector<const Eigen::MatrixXcd*>& atom_signals,
                                  double total_energy, const LocalizerConfig& cfg);

/// Projects the received signal onto the orthogonal complement of the
/// scatter atoms, then re-selects the strongest atom.
std::pair<Eigen::Index, Eigen::VectorXcd> refine_user(const Eigen::VectorXcd& g,
                                                      const Eigen::MatrixXcd& atom_signals,
                                                      const std::vector<Eigen::Index>& support);

/// Full three-step localization given per-user received signals (rows of G)
/// and precomputed per-user atom signals.
LocalizationResult localize(const Eigen::MatrixXcd& received,
                            const std::vector<const Eigen::MatrixXcd*>& atom_signals,
                            const AtomDictionary& dict, const LocalizerConfig& cfg);

/// Convenience overload that builds the atom signals from the phase history.
LocalizationResult localize(const Eigen::MatrixXcd& received,
                            const Eigen::MatrixXcd& phase_rows,
                            const AtomDictionary& dict,
                            const std::vector<CVec>& ris_bs_channels,
                            const std::vector<Complex>& tx_symbols,
                            const LocalizerConfig& cfg);

}  // namespace hfloc

#endif

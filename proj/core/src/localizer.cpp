#include "hfloc/localizer.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/QR>

namespace hfloc {

namespace {

Eigen::MatrixXcd select_columns(const Eigen::MatrixXcd& m,
                                const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXcd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = m.col(idx[j]);
    }
    return out;
}

}  // namespace

std::pair<Eigen::Index, Complex> coarse_user_estimate(const Eigen::VectorXcd& g,
                                                      const Eigen::MatrixXcd& atom_signals) {
    if (atom_signals.cols() < 1 || atom_signals.rows() != g.size()) {
        throw std::invalid_argument("coarse_user_estimate: dimension mismatch");
    }
    const Eigen::VectorXd corr = (atom_signals.adjoint() * g).cwiseAbs();
    Eigen::Index best = 0;
    corr.maxCoeff(&best);  // Eigen returns the first index on exact ties
    const double energy = atom_signals.col(best).squaredNorm();
    if (!(energy > 0.0)) {
        throw std::runtime_error("coarse_user_estimate: degenerate zero atom signal");
    }
    const Complex gain = (atom_signals.col(best).adjoint() * g)(0) / energy;
    return {best, gain};
}

Eigen::VectorXcd subtract_direct_path(const Eigen::VectorXcd& g,
                                      const Eigen::MatrixXcd& atom_signals,
                                      Eigen::Index index, Complex gain) {
    return g - gain * atom_signals.col(index);
}

ScatterEstimate estimate_scatters(const std::vector<Eigen::VectorXcd>& initial_residuals,
                                  const std::vector<const Eigen::MatrixXcd*>& atom_signals,
                                  double total_energy, const LocalizerConfig& cfg) {
    const std::size_t n_users = initial_residuals.size();
    if (atom_signals.size() != n_users) {
        throw std::invalid_argument("estimate_scatters: per-user input size mismatch");
    }
    ScatterEstimate est;
    est.residuals = initial_residuals;

    auto residual_energy = [&est]() {
        double e = 0.0;
        for (const auto& r : est.residuals) e += r.squaredNorm();
        return e;
    };

    const double threshold = cfg.residual_fraction * total_energy;
    for (int iter = 0; iter < cfg.max_scatters; ++iter) {
        if (residual_energy() < threshold) {
            break;
        }
        // Joint selection across users, Eq.-(22) style.
        const Eigen::Index m = atom_signals[0]->cols();
        Eigen::VectorXd score = Eigen::VectorXd::Zero(m);
        for (std::size_t k = 0; k < n_users; ++k) {
            score += (atom_signals[k]->adjoint() * est.residuals[k]).cwiseAbs();
        }
        Eigen::Index pick = 0;
        score.maxCoeff(&pick);
        if (std::find(est.support.begin(), est.support.end(), pick) != est.support.end()) {
            break;  // re-selecting an atom cannot reduce the OLS residual
        }
        est.support.push_back(pick);

        // OLS re-fit of all selected gains against the initial residuals.
        const Eigen::Index s = static_cast<Eigen::Index>(est.support.size());
        Eigen::MatrixXcd gains(s, static_cast<Eigen::Index>(n_users));
        bool rank_ok = true;
        for (std::size_t k = 0; k < n_users; ++k) {
            Eigen::MatrixXcd cols = select_columns(*atom_signals[k], est.support);
            Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(cols);
            if (qr.rank() < s) {
                rank_ok = false;
                break;
            }
            gains.col(static_cast<Eigen::Index>(k)) = qr.solve(initial_residuals[k]);
        }
        if (!rank_ok) {
            est.support.pop_back();
            est.truncated = true;
            break;
        }
        est.gains = gains;
        for (std::size_t k = 0; k < n_users; ++k) {
            est.residuals[k] = initial_residuals[k] -
                               select_columns(*atom_signals[k], est.support) *
                                   gains.col(static_cast<Eigen::Index>(k));
        }
        est.residual_energies.push_back(residual_energy());
    }
    return est;
}

std::pair<Eigen::Index, Eigen::VectorXcd> refine_user(const Eigen::VectorXcd& g,
                                                      const Eigen::MatrixXcd& atom_signals,
                                                      const std::vector<Eigen::Index>& support) {
    Eigen::VectorXcd r = g;
    if (!support.empty()) {
        Eigen::MatrixXcd cols = select_columns(atom_signals, support);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(cols);
        if (qr.rank() < static_cast<Eigen::Index>(support.size())) {
            throw std::runtime_error("refine_user: rank-deficient scatter atoms");
        }
        r -= cols * qr.solve(g);
    }
    const Eigen::VectorXd corr = (atom_signals.adjoint() * r).cwiseAbs();
    Eigen::Index best = 0;
    corr.maxCoeff(&best);
    return {best, r};
}

LocalizationResult localize(const Eigen::MatrixXcd& received,
                            const std::vector<const Eigen::MatrixXcd*>& atom_signals,
                            const AtomDictionary& dict, const LocalizerConfig& cfg) {
    const std::size_t n_users = static_cast<std::size_t>(received.rows());
    if (atom_signals.size() != n_users) {
        throw std::invalid_argument("localize: need one atom-signal matrix per user");
    }
    LocalizationResult res;
    res.coarse_indices.resize(n_users);
    res.coarse_gains.resize(n_users);
    res.user_indices.resize(n_users);
    res.refined_gains.resize(n_users);
    res.user_locations.resize(n_users);

    // Step 1: per-user coarse estimates and direct-path removal.
    std::vector<Eigen::VectorXcd> residuals(n_users);
    double total_energy = 0.0;
    for (std::size_t k = 0; k < n_users; ++k) {
        const Eigen::VectorXcd g = received.row(static_cast<Eigen::Index>(k)).transpose();
        total_energy += g.squaredNorm();
        auto [idx, gain] = coarse_user_estimate(g, *atom_signals[k]);
        res.coarse_indices[k] = idx;
        res.coarse_gains[k] = gain;
        residuals[k] = subtract_direct_path(g, *atom_signals[k], idx, gain);
        res.coarse_loss += residuals[k].squaredNorm();
    }

    // Step 2: joint scatter estimation with SIC.
    ScatterEstimate sc = estimate_scatters(residuals, atom_signals, total_energy, cfg);
    res.support = sc.support;
    res.support_gains = sc.gains;
    res.residual_energies = sc.residual_energies;
    res.support_truncated = sc.truncated;

    // Step 3: per-user refinement against the scatter-free projection.
    for (std::size_t k = 0; k < n_users; ++k) {
        const Eigen::VectorXcd g = received.row(static_cast<Eigen::Index>(k)).transpose();
        auto [idx, r] = refine_user(g, *atom_signals[k], res.support);
        if (std::find(res.support.begin(), res.support.end(), idx) != res.support.end()) {
            ++res.refined_in_support;
        }
        res.user_indices[k] = idx;
        res.user_locations[k] = dict.locations[static_cast<std::size_t>(idx)];
        const double energy = atom_signals[k]->col(idx).squaredNorm();
        const Complex gain =
            energy > 0.0 ? Complex((atom_signals[k]->col(idx).adjoint() * r)(0)) / energy
                         : Complex(0.0);
        res.refined_gains[k] = gain;
        res.refined_loss += (r - gain * atom_signals[k]->col(idx)).squaredNorm();
    }
    return res;
}

LocalizationResult localize(const Eigen::MatrixXcd& received,
                            const Eigen::MatrixXcd& phase_rows,
                            const AtomDictionary& dict,
                            const std::vector<CVec>& ris_bs_channels,
                            const std::vector<Complex>& tx_symbols,
                            const LocalizerConfig& cfg) {
    const std::size_t n_users = static_cast<std::size_t>(received.rows());
    if (ris_bs_channels.size() != n_users || tx_symbols.size() != n_users) {
        throw std::invalid_argument("localize: per-user channel/symbol count mismatch");
    }
    std::vector<Eigen::MatrixXcd> lambdas(n_users);
    std::vector<const Eigen::MatrixXcd*> ptrs(n_users);
    for (std::size_t k = 0; k < n_users; ++k) {
        lambdas[k] = build_atom_signals(phase_rows, ris_bs_channels[k], dict.atoms, tx_symbols[k]);
        ptrs[k] = &lambdas[k];
    }
    return localize(received, ptrs, dict, cfg);
}

}  // namespace hfloc

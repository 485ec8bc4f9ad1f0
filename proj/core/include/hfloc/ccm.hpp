#ifndef HFLOC_CCM_HPP
#define HFLOC_CCM_HPP

#include <vector>

#include <Eigen/Core>

#include "hfloc/crb.hpp"

namespace hfloc {

struct CcmConfig {
    double rel_tolerance = 1e-6;   ///< zeta = rel_tolerance * |f_0|
    int max_iterations = 200;      ///< I
    double step_initial = 1.0;
    double step_shrink = 0.5;
    double sufficient_decrease = 1e-4;
    double step_floor = 1e-10;
};

/// Weighted-CRB objective of the next cycle's phase vector. The phase history
/// enters only through fixed per-user FIM contributions; the candidate cycle
/// is the optimization variable.
class CrbPhaseObjective {
public:
    CrbPhaseObjective(const std::vector<CrbUserModel>& users,
                      const Eigen::MatrixXcd& phase_history, const CrbWeights& weights,
                      double sigma2);

    double value(const CVec& beta) const;

    /// Euclidean gradient 2 * df/dbeta^* (conjugate Wirtinger derivative).
    CVec euclidean_gradient(const CVec& beta) const;

    Eigen::Index dim() const { return dim_; }

private:
    struct UserCtx {
        std::vector<CVec> derivatives;  ///< cascaded channel derivatives
        Complex tx_symbol;
        Eigen::MatrixXd fim_history;    ///< contribution of past cycles
        std::vector<double> weights;    ///< per parameter, region-matched
    };

    Eigen::MatrixXd fim_at(const UserCtx& u, const CVec& beta) const;

    std::vector<UserCtx> users_;
    double sigma2_ = 1.0;
    Eigen::Index dim_ = 0;
};

/// Projection onto the tangent space of the unit-modulus manifold at beta:
/// t = v - Re{v^* (.) beta} (.) beta. Sign handling (descent direction) is the
/// caller's concern.
CVec tangent_project(const CVec& v, const CVec& beta);

/// beta + step * direction; generally leaves the manifold.
CVec tangent_update(const CVec& beta, const CVec& direction, double step);

/// Entrywise radial normalization back onto the manifold.
CVec retract(const CVec& beta_off);

struct CcmResult {
    CVec beta;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    int iterations = 0;
    bool failed = false;  ///< objective unusable at the initial point
};

/// Projected-gradient descent with Armijo backtracking and radial retraction.
/// Returns the best-seen iterate; the result never increases the objective.
CcmResult optimize_phase_shifts(const CrbPhaseObjective& objective, const CVec& beta_init,
                                const CcmConfig& cfg);

/// Convenience overload building the objective from estimates.
CcmResult optimize_phase_shifts(const std::vector<CrbUserModel>& users,
                                const Eigen::MatrixXcd& phase_history, const CVec& beta_init,
                                const CrbWeights& weights, double sigma2,
                                const CcmConfig& cfg);

}  // namespace hfloc

#endif

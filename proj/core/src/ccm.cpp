#include "hfloc/ccm.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace hfloc {

namespace {

std::vector<double> region_weights(RegionTag region, const CrbWeights& w) {
    if (region == RegionTag::NearField) {
        return {w.w_range_nf, w.w_polar_nf, w.w_azimuth_nf};
    }
    return {w.w_polar_ff, w.w_azimuth_ff};
}

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& j) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > kFimConditionLimit) {
        throw SingularFimError("ccm: ill-conditioned FIM during phase optimization");
    }
    return j.inverse();
}

}  // namespace

CrbPhaseObjective::CrbPhaseObjective(const std::vector<CrbUserModel>& users,
                                     const Eigen::MatrixXcd& phase_history,
                                     const CrbWeights& weights, double sigma2)
    : sigma2_(sigma2) {
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("CrbPhaseObjective: noise power must be positive");
    }
    users_.reserve(users.size());
    for (const CrbUserModel& u : users) {
        UserCtx ctx;
        ctx.derivatives = u.cascaded_derivatives;
        ctx.tx_symbol = u.tx_symbol;
        ctx.weights = region_weights(u.region, weights);
        if (phase_history.rows() > 0) {
            ctx.fim_history =
                fim(phase_history, u.cascaded_derivatives, u.tx_symbol, sigma2, u.region).matrix;
        } else {
            const auto n_par = static_cast<Eigen::Index>(u.cascaded_derivatives.size());
            ctx.fim_history = Eigen::MatrixXd::Zero(n_par, n_par);
        }
        if (dim_ == 0 && !ctx.derivatives.empty()) {
            dim_ = ctx.derivatives.front().size();
        }
        users_.push_back(std::move(ctx));
    }
}

Eigen::MatrixXd CrbPhaseObjective::fim_at(const UserCtx& u, const CVec& beta) const {
    const auto n_par = static_cast<Eigen::Index>(u.derivatives.size());
    Eigen::VectorXcd t(n_par);
    for (Eigen::Index i = 0; i < n_par; ++i) {
        t[i] = (beta.transpose() * u.derivatives[static_cast<std::size_t>(i)])(0) * u.tx_symbol;
    }
    Eigen::MatrixXd j = u.fim_history;
    j.noalias() += (2.0 / sigma2_) * (t.conjugate() * t.transpose()).real();
    return 0.5 * (j + j.transpose());
}

double CrbPhaseObjective::value(const CVec& beta) const {
    double f = 0.0;
    for (const UserCtx& u : users_) {
        const Eigen::MatrixXd inv = checked_inverse(fim_at(u, beta));
        for (std::size_t i = 0; i < u.weights.size(); ++i) {
            f += u.weights[i] * inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        }
    }
    return f;
}

CVec CrbPhaseObjective::euclidean_gradient(const CVec& beta) const {
    CVec grad = CVec::Zero(beta.size());
    for (const UserCtx& u : users_) {
        const auto n_par = static_cast<Eigen::Index>(u.derivatives.size());
        const Eigen::MatrixXd inv = checked_inverse(fim_at(u, beta));
        const double s2 = std::norm(u.tx_symbol) / sigma2_;
        // tau~_p = beta^T a_p (without the symbol; |s|^2 carried by s2).
        Eigen::VectorXcd tau(n_par);
        for (Eigen::Index p = 0; p < n_par; ++p) {
            tau[p] = (beta.transpose() * u.derivatives[static_cast<std::size_t>(p)])(0);
        }
        for (Eigen::Index i = 0; i < n_par; ++i) {
            // dD_i/dbeta_n^* = -2 s2 conj(c_i[n]) tau_i with
            // c_i = sum_p inv(i,p) a_p and tau_i = sum_q inv(i,q) tau~_q.
            CVec c_i = CVec::Zero(beta.size());
            Complex tau_i = 0.0;
            for (Eigen::Index p = 0; p < n_par; ++p) {
                c_i += inv(i, p) * u.derivatives[static_cast<std::size_t>(p)];
                tau_i += inv(i, p) * tau[p];
            }
            const double w = u.weights[static_cast<std::size_t>(i)];
            grad += 2.0 * w * (-2.0 * s2 * tau_i) * c_i.conjugate();
        }
    }
    return grad;
}

CVec tangent_project(const CVec& v, const CVec& beta) {
    const Eigen::VectorXd radial = (v.conjugate().cwiseProduct(beta)).real();
    return v - radial.cast<Complex>().cwiseProduct(beta);
}

CVec tangent_update(const CVec& beta, const CVec& direction, double step) {
    return beta + step * direction;
}

CVec retract(const CVec& beta_off) {
    CVec out(beta_off.size());
    for (Eigen::Index n = 0; n < beta_off.size(); ++n) {
        const double mag = std::abs(beta_off[n]);
        if (!(mag > 0.0)) {
            throw std::domain_error("retract: zero entry, step size must shrink");
        }
        out[n] = beta_off[n] / mag;
    }
    return out;
}

CcmResult optimize_phase_shifts(const CrbPhaseObjective& objective, const CVec& beta_init,
                                const CcmConfig& cfg) {
    CcmResult res;
    res.beta = beta_init;
    double f;
    try {
        f = objective.value(beta_init);
    } catch (const SingularFimError&) {
        res.failed = true;
        return res;
    }
    res.initial_objective = f;
    res.final_objective = f;

    const double zeta = cfg.rel_tolerance * std::abs(f);
    CVec beta = beta_init;
    double best_f = f;
    CVec best_beta = beta;

    for (int j = 0; j < cfg.max_iterations; ++j) {
        res.iterations = j + 1;
        CVec direction;
        try {
            direction = -tangent_project(objective.euclidean_gradient(beta), beta);
        } catch (const SingularFimError&) {
            break;
        }
        const double dir_norm2 = direction.squaredNorm();
        if (!(dir_norm2 > 0.0)) {
            break;
        }
        // Armijo backtracking; directional derivative along the projected
        // gradient direction is -|direction|^2.
        double step = cfg.step_initial;
        bool accepted = false;
        double f_new = f;
        CVec beta_new;
        while (step >= cfg.step_floor) {
            try {
                beta_new = retract(tangent_update(beta, direction, step));
                f_new = objective.value(beta_new);
            } catch (const std::exception&) {
                step *= cfg.step_shrink;
                continue;
            }
            if (f_new <= f - cfg.sufficient_decrease * step * dir_norm2) {
                accepted = true;
                break;
            }
            step *= cfg.step_shrink;
        }
        if (!accepted) {
            break;
        }
        const double delta = std::abs(f - f_new);
        beta = beta_new;
        f = f_new;
        if (f < best_f) {
            best_f = f;
            best_beta = beta;
        }
        if (delta <= zeta) {
            break;
        }
    }
    res.beta = best_beta;
    res.final_objective = best_f;
    return res;
}

CcmResult optimize_phase_shifts(const std::vector<CrbUserModel>& users,
                                const Eigen::MatrixXcd& phase_history, const CVec& beta_init,
                                const CrbWeights& weights, double sigma2,
                                const CcmConfig& cfg) {
    return optimize_phase_shifts(CrbPhaseObjective(users, phase_history, weights, sigma2),
                                 beta_init, cfg);
}

}  // namespace hfloc

#ifndef HFLOC_CRB_HPP
#define HFLOC_CRB_HPP

#include <array>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "hfloc/channel.hpp"
#include "hfloc/geometry.hpp"

namespace hfloc {

/// Fisher information over the location parameters of one user:
/// 3x3 (range, polar, azimuth) in the NF, 2x2 (polar, azimuth) in the FF.
struct Fim {
    Eigen::MatrixXd matrix;
    RegionTag region = RegionTag::NearField;
};

struct CrbWeights {
    double w_range_nf = 1.0;
    double w_polar_nf = 1.0;
    double w_azimuth_nf = 1.0;
    double w_polar_ff = 1.0;
    double w_azimuth_ff = 1.0;
};

struct SingularFimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kFimConditionLimit = 1e12;

/// mu = beta^T h s.
Complex noise_free_signal(const CVec& beta, const CVec& h, Complex s);

/// Analytic derivatives of the NF direct user-RIS channel alpha * b(p) with
/// respect to (range, polar, azimuth).
std::array<CVec, 3> nf_direct_derivatives(const SphericalPoint& p, Complex alpha,
                                          const RisConfig& cfg);

/// Analytic derivatives of the FF direct user-RIS channel with respect to
/// (polar, azimuth); h_direct already includes the path gain.
std::array<CVec, 2> ff_direct_derivatives(double polar, double azimuth,
                                          const CVec& h_direct, const RisConfig& cfg);

/// FIM from per-cycle phase rows and the cascaded channel derivatives
/// (already multiplied by diag(h_A)). One derivative vector per parameter.
Fim fim(const Eigen::MatrixXcd& phase_rows, const std::vector<CVec>& cascaded_derivatives,
        Complex s, double sigma2, RegionTag region);

/// Diagonal of J^{-1} in parameter order; throws SingularFimError when the
/// condition number exceeds kFimConditionLimit.
std::vector<double> crb_from_fim(const Fim& j);

/// Per-user inputs of the weighted CRB objective, reconstructed from the
/// estimated locations: cascaded derivative vectors and transmit symbol.
struct CrbUserModel {
    RegionTag region = RegionTag::NearField;
    std::vector<CVec> cascaded_derivatives;  ///< 3 (NF) or 2 (FF)
    Complex tx_symbol = 1.0;
};

/// Builders from an estimated location and direct-path gain.
CrbUserModel crb_user_model_nf(const SphericalPoint& p, Complex gain, const CVec& h_a,
                               const RisConfig& cfg, Complex s);
CrbUserModel crb_user_model_ff(double polar, double azimuth, Complex gain, const CVec& h_a,
                               const RisConfig& cfg, Complex s);

/// Sum over users of tr(J^{-1} W) with region-matched weights. phase_rows
/// holds all cycles including the candidate one.
double weighted_crb_objective(const std::vector<CrbUserModel>& users,
                              const Eigen::MatrixXcd& phase_rows, const CrbWeights& weights,
                              double sigma2);

}  // namespace hfloc

#endif

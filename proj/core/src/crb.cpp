#include "hfloc/crb.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace hfloc {

namespace {
constexpr double kPi = std::numbers::pi;
const Complex kJ(0.0, 1.0);
}

Complex noise_free_signal(const CVec& beta, const CVec& h, Complex s) {
    Complex mu = beta.transpose() * h;
    return mu * s;
}

std::array<CVec, 3> nf_direct_derivatives(const SphericalPoint& p, Complex alpha,
                                          const RisConfig& cfg) {
    const int n_elem = cfg.size();
    const double k = 2.0 * kPi / cfg.wavelength;
    const double st = std::sin(p.polar), ct = std::cos(p.polar);
    const double sf = std::sin(p.azimuth), cf = std::cos(p.azimuth);
    const double u = st * sf;
    std::array<CVec, 3> d{CVec(n_elem), CVec(n_elem), CVec(n_elem)};
    for (int n = 0; n < n_elem; ++n) {
        const Eigen::Vector2d& e = cfg.element_coords[static_cast<std::size_t>(n)];
        const double y = e.x(), z = e.y();
        const double dist2 = p.range * p.range - 2.0 * p.range * (y * u + z * ct) + y * y + z * z;
        const double dist = std::sqrt(std::max(dist2, 0.0));
        if (!(dist > 0.0)) {
            throw std::invalid_argument("nf_direct_derivatives: point coincides with an element");
        }
        const Complex common = alpha * (-kJ * k) * std::polar(1.0, -k * dist);
        d[0][n] = common * ((p.range - y * u - z * ct) / dist);
        d[1][n] = common * (p.range * (-y * ct * sf + z * st) / dist);
        d[2][n] = common * (p.range * (-y * st * cf) / dist);
    }
    return d;
}

std::array<CVec, 2> ff_direct_derivatives(double polar, double azimuth,
                                          const CVec& h_direct, const RisConfig& cfg) {
    const int n_elem = cfg.size();
    if (h_direct.size() != n_elem) {
        throw std::invalid_argument("ff_direct_derivatives: channel length mismatch");
    }
    const double k = 2.0 * kPi / cfg.wavelength;
    const double st = std::sin(polar), ct = std::cos(polar);
    const double sf = std::sin(azimuth), cf = std::cos(azimuth);
    std::array<CVec, 2> d{CVec(n_elem), CVec(n_elem)};
    for (int n = 0; n < n_elem; ++n) {
        const Eigen::Vector2d& e = cfg.element_coords[static_cast<std::size_t>(n)];
        const Complex common = h_direct[n] * (-kJ * k);
        d[0][n] = common * (-e.x() * ct * sf + e.y() * st);
        d[1][n] = common * (-e.x() * st * cf);
    }
    return d;
}

Fim fim(const Eigen::MatrixXcd& phase_rows, const std::vector<CVec>& cascaded_derivatives,
        Complex s, double sigma2, RegionTag region) {
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("fim: noise power must be positive");
    }
    const Eigen::Index n_par = static_cast<Eigen::Index>(cascaded_derivatives.size());
    for (const CVec& d : cascaded_derivatives) {
        if (d.size() != phase_rows.cols()) {
            throw std::invalid_argument("fim: derivative length mismatch");
        }
    }
    // dmu(m)/dp_i = beta(m)^T d_i s; stack all cycles at once.
    Eigen::MatrixXcd dmu(phase_rows.rows(), n_par);
    for (Eigen::Index i = 0; i < n_par; ++i) {
        dmu.col(i) = phase_rows * cascaded_derivatives[static_cast<std::size_t>(i)] * s;
    }
    Fim out;
    out.region = region;
    out.matrix = (2.0 / sigma2) * (dmu.adjoint() * dmu).real();
    out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
    return out;
}

std::vector<double> crb_from_fim(const Fim& j) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j.matrix);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || smax / smin > kFimConditionLimit) {
        throw SingularFimError("crb_from_fim: unidentifiable geometry (ill-conditioned FIM)");
    }
    const Eigen::MatrixXd inv = j.matrix.inverse();
    std::vector<double> bounds(static_cast<std::size_t>(j.matrix.rows()));
    for (Eigen::Index i = 0; i < j.matrix.rows(); ++i) {
        bounds[static_cast<std::size_t>(i)] = inv(i, i);
    }
    return bounds;
}

CrbUserModel crb_user_model_nf(const SphericalPoint& p, Complex gain, const CVec& h_a,
                               const RisConfig& cfg, Complex s) {
    CrbUserModel m;
    m.region = RegionTag::NearField;
    m.tx_symbol = s;
    auto d = nf_direct_derivatives(p, gain, cfg);
    m.cascaded_derivatives = {h_a.cwiseProduct(d[0]), h_a.cwiseProduct(d[1]),
                              h_a.cwiseProduct(d[2])};
    return m;
}

CrbUserModel crb_user_model_ff(double polar, double azimuth, Complex gain, const CVec& h_a,
                               const RisConfig& cfg, Complex s) {
    CrbUserModel m;
    m.region = RegionTag::FarField;
    m.tx_symbol = s;
    const CVec h_direct = gain * ff_steering(polar, azimuth, cfg);
    auto d = ff_direct_derivatives(polar, azimuth, h_direct, cfg);
    m.cascaded_derivatives = {h_a.cwiseProduct(d[0]), h_a.cwiseProduct(d[1])};
    return m;
}

double weighted_crb_objective(const std::vector<CrbUserModel>& users,
                              const Eigen::MatrixXcd& phase_rows, const CrbWeights& weights,
                              double sigma2) {
    double f = 0.0;
    for (const CrbUserModel& u : users) {
        const Fim j = fim(phase_rows, u.cascaded_derivatives, u.tx_symbol, sigma2, u.region);
        const std::vector<double> bounds = crb_from_fim(j);
        if (u.region == RegionTag::NearField) {
            f += weights.w_range_nf * bounds[0] + weights.w_polar_nf * bounds[1] +
                 weights.w_azimuth_nf * bounds[2];
        } else {
            f += weights.w_polar_ff * bounds[0] + weights.w_azimuth_ff * bounds[1];
        }
    }
    return f;
}

}  // namespace hfloc

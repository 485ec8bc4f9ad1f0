#ifndef HFLOC_CHANNEL_HPP
#define HFLOC_CHANNEL_HPP

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "hfloc/geometry.hpp"

namespace hfloc {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;

/// Ground truth of one Monte Carlo scenario. Path gains are inputs, not
/// derived from a propagation model; ris_bs_channels holds one RIS-BS channel
/// per user, drawn once per trial and fixed across cycles.
struct ScenarioTruth {
    std::vector<SphericalPoint> users;
    std::vector<SphericalPoint> scatters;
    std::vector<Complex> direct_gains;               ///< alpha_k, per user
    std::vector<std::vector<Complex>> scatter_gains; ///< alpha_kl, [user][scatter]
    std::vector<CVec> ris_bs_channels;               ///< h_k^A, per user
    std::vector<Complex> tx_symbols;                 ///< s_k, per user
    double noise_power = 0.0;                        ///< sigma^2, total complex variance
};

/// Spherical-wave steering vector: entry n = exp(-j 2 pi d_n / lambda).
CVec nf_steering(const SphericalPoint& p, const RisConfig& cfg);

/// Plane-wave steering vector; independent of range.
CVec ff_steering(double polar, double azimuth, const RisConfig& cfg);

/// Region-dispatched steering vector for a single path endpoint.
CVec hybrid_steering(const SphericalPoint& p, const RisConfig& cfg);

/// Multipath user-RIS channel: direct path plus scatter paths, each steered
/// with the NF or FF model according to its own region.
CVec user_ris_channel(const SphericalPoint& user,
                      const std::vector<SphericalPoint>& scatters,
                      Complex direct_gain,
                      const std::vector<Complex>& scatter_gains,
                      const RisConfig& cfg);

/// Hadamard product h_A (.) h_t.
CVec cascaded_channel(const CVec& h_a, const CVec& h_t);

/// One noisy scalar observation: y = beta^T h s + eps, with eps circularly
/// symmetric complex Gaussian of total variance sigma2.
Complex received_signal(const CVec& beta, const CVec& h, Complex s, double sigma2,
                        std::mt19937_64& rng);

/// Circularly symmetric complex Gaussian sample with total variance sigma2.
Complex complex_gaussian(double sigma2, std::mt19937_64& rng);

}  // namespace hfloc

#endif

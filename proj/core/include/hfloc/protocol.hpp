#ifndef HFLOC_PROTOCOL_HPP
#define HFLOC_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hfloc/ccm.hpp"
#include "hfloc/crb.hpp"
#include "hfloc/dictionary.hpp"
#include "hfloc/localizer.hpp"

namespace hfloc {

/// Scenario randomization parameters (Table-style defaults).
struct ScenarioConfig {
    int n_users = 2;
    int n_scatters = 3;
    double radius = 10.0;              ///< localization range, meters
    double min_range = 1.0;            ///< closest sampled user/scatter range
    double scatter_gain_ratio = 0.3;   ///< |alpha_kl| / |alpha_k|
    double ris_bs_variance = 1.0;      ///< rho_A^2 of h_k^A ~ CN(0, rho_A^2 I)
};

struct ProtocolConfig {
    int cycles = 20;                   ///< C
    double snr_db = 0.0;
    LocalizerConfig localizer;
    CcmConfig ccm;
    CrbWeights weights;
    bool optimize_phases = true;       ///< false: random phases every cycle
};

/// Per-cycle snapshot of the localization output.
struct CycleRecord {
    std::vector<AtomLocation> estimates;
    double coarse_loss = 0.0;
    double refined_loss = 0.0;
    double objective_before = 0.0;  ///< CRB objective at the chosen next-cycle phases
    bool optimization_failed = false;
};

struct TrialRecord {
    ScenarioTruth truth;
    std::vector<RegionTag> true_regions;  ///< per user, from the ground truth
    std::vector<CycleRecord> cycles;
    int optimization_failures = 0;

    const std::vector<AtomLocation>& final_estimates() const { return cycles.back().estimates; }
};

struct RmseReport {
    double angle_rmse_nf = 0.0;   ///< radians, sqrt(mean(theta_err^2 + phi_err^2))
    double angle_rmse_ff = 0.0;
    double range_rmse_nf = 0.0;   ///< meters, NF users only
    double position_rmse = 0.0;   ///< meters
    int nf_user_count = 0;
    int ff_user_count = 0;
};

/// Deterministic per-trial random source derived from (master seed, index).
std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t trial_index);

/// Draws a scenario: users split equally between NF and FF regions, scatters
/// uniform in the localization ball, gains and RIS-BS channels randomized.
/// Noise power is left at zero; apply snr_calibration afterwards.
ScenarioTruth scenario_sampler(const ScenarioConfig& cfg, const RisConfig& ris,
                               std::mt19937_64& rng);

/// sigma^2 achieving the target SNR, with signal power averaged over users:
/// P_s = |h_A^T h_direct|^2 under all-ones phase shifts.
double snr_calibration(const ScenarioTruth& truth, const RisConfig& ris, double target_snr_db);

/// Runs the cyclic protocol: transmit, localize on all data so far, optimize
/// the next cycle's phase shifts (skipped in the last cycle).
TrialRecord run_protocol(const ScenarioTruth& truth, const AtomDictionary& dict,
                         const RisConfig& ris, const ProtocolConfig& cfg,
                         std::mt19937_64& rng);

/// RMSE over trials at a given cycle (1-based; 0 selects the final cycle).
/// Angle errors are grouped by the true region of each user; FF position
/// errors use the true range with the estimated angles.
RmseReport compute_rmse(const std::vector<TrialRecord>& records, int cycle = 0);

enum class PhaseMode { RandomUniform, AllOnes, MaxSnr };

/// Empirical mean received power E|h|^2 for i.i.d. Gaussian h_A, h_t.
std::vector<double> power_scaling_experiment(const std::vector<int>& element_counts,
                                             double rho_a, double rho_t, int trials,
                                             PhaseMode mode, std::mt19937_64& rng);

}  // namespace hfloc

#endif

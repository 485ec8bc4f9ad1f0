#include "hfloc/protocol.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hfloc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleMargin = 0.05 * kPi;  // keeps samples away from the poles

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

CVec random_phases(Eigen::Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    CVec beta(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        beta[i] = std::polar(1.0, angle(rng));
    }
    return beta;
}

SphericalPoint sample_point_in_region(const ScenarioConfig& cfg, const RisConfig& ris,
                                      RegionTag target, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(kAngleMargin, kPi - kAngleMargin);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const double theta = angle(rng);
        const double phi = angle(rng);
        const double r = cfg.min_range + (cfg.radius - cfg.min_range) * unit(rng);
        SphericalPoint p(r, theta, phi);
        if (classify_region(p, ris) == target) {
            return p;
        }
    }
    throw std::runtime_error("scenario_sampler: could not place a point in the target region");
}

}  // namespace

std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t trial_index) {
    const std::uint64_t mixed = splitmix64(master_seed ^ splitmix64(trial_index));
    std::seed_seq seq{static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32),
                      static_cast<std::uint32_t>(trial_index),
                      static_cast<std::uint32_t>(master_seed)};
    return std::mt19937_64(seq);
}

ScenarioTruth scenario_sampler(const ScenarioConfig& cfg, const RisConfig& ris,
                               std::mt19937_64& rng) {
    if (cfg.n_users < 1) {
        throw std::invalid_argument("scenario_sampler: need at least one user");
    }
    std::uniform_real_distribution<double> angle(kAngleMargin, kPi - kAngleMargin);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ScenarioTruth truth;
    // Equal split between regions; the first ceil(K/2) users are NF.
    const int nf_users = (cfg.n_users + 1) / 2;
    for (int k = 0; k < cfg.n_users; ++k) {
        const RegionTag target = k < nf_users ? RegionTag::NearField : RegionTag::FarField;
        truth.users.push_back(sample_point_in_region(cfg, ris, target, rng));
    }
    for (int l = 0; l < cfg.n_scatters; ++l) {
        // Volume-uniform radius in the localization ball, floored at min_range.
        double r = cfg.radius * std::cbrt(unit(rng));
        if (r < cfg.min_range) r = cfg.min_range;
        truth.scatters.emplace_back(r, angle(rng), angle(rng));
    }
    for (int k = 0; k < cfg.n_users; ++k) {
        truth.direct_gains.push_back(std::polar(1.0, phase(rng)));
        std::vector<Complex> gains;
        for (int l = 0; l < cfg.n_scatters; ++l) {
            gains.push_back(std::polar(cfg.scatter_gain_ratio, phase(rng)));
        }
        truth.scatter_gains.push_back(std::move(gains));
        CVec h_a(ris.size());
        for (int n = 0; n < ris.size(); ++n) {
            h_a[n] = complex_gaussian(cfg.ris_bs_variance, rng);
        }
        truth.ris_bs_channels.push_back(std::move(h_a));
        truth.tx_symbols.push_back(1.0);
    }
    return truth;
}

double snr_calibration(const ScenarioTruth& truth, const RisConfig& ris, double target_snr_db) {
    if (truth.users.empty()) {
        throw std::invalid_argument("snr_calibration: empty scenario");
    }
    double power = 0.0;
    for (std::size_t k = 0; k < truth.users.size(); ++k) {
        const CVec direct = truth.direct_gains[k] * hybrid_steering(truth.users[k], ris);
        const Complex p = truth.ris_bs_channels[k].transpose() * direct;
        power += std::norm(p);
    }
    power /= static_cast<double>(truth.users.size());
    if (!(power > 0.0)) {
        throw std::invalid_argument("snr_calibration: zero direct-path power");
    }
    return power / std::pow(10.0, target_snr_db / 10.0);
}

TrialRecord run_protocol(const ScenarioTruth& truth, const AtomDictionary& dict,
                         const RisConfig& ris, const ProtocolConfig& cfg,
                         std::mt19937_64& rng) {
    const int n_users = static_cast<int>(truth.users.size());
    const int n_elem = ris.size();
    const Eigen::Index m = dict.size();
    if (cfg.cycles < 1) {
        throw std::invalid_argument("run_protocol: need at least one cycle");
    }

    std::vector<CVec> channels(static_cast<std::size_t>(n_users));
    for (int k = 0; k < n_users; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        channels[ku] = cascaded_channel(
            truth.ris_bs_channels[ku],
            user_ris_channel(truth.users[ku], truth.scatters, truth.direct_gains[ku],
                             truth.scatter_gains[ku], ris));
    }

    TrialRecord record;
    record.truth = truth;

    Eigen::MatrixXcd received(n_users, cfg.cycles);
    Eigen::MatrixXcd phase_rows(cfg.cycles, n_elem);
    std::vector<Eigen::MatrixXcd> lambdas(static_cast<std::size_t>(n_users),
                                          Eigen::MatrixXcd(cfg.cycles, m));

    CVec beta = random_phases(n_elem, rng);
    for (int c = 0; c < cfg.cycles; ++c) {
        phase_rows.row(c) = beta.transpose();
        for (int k = 0; k < n_users; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            received(k, c) =
                received_signal(beta, channels[ku], truth.tx_symbols[ku], truth.noise_power, rng);
            lambdas[ku].row(c) =
                atom_signal_row(beta, truth.ris_bs_channels[ku], dict.atoms, truth.tx_symbols[ku]);
        }

        // Localize on everything received so far.
        const Eigen::MatrixXcd g = received.leftCols(c + 1);
        std::vector<Eigen::MatrixXcd> tops(static_cast<std::size_t>(n_users));
        std::vector<const Eigen::MatrixXcd*> ptrs(static_cast<std::size_t>(n_users));
        for (int k = 0; k < n_users; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            tops[ku] = lambdas[ku].topRows(c + 1);
            ptrs[ku] = &tops[ku];
        }
        const LocalizationResult loc = localize(g, ptrs, dict, cfg.localizer);

        CycleRecord cycle;
        cycle.estimates = loc.user_locations;
        cycle.coarse_loss = loc.coarse_loss;
        cycle.refined_loss = loc.refined_loss;

        if (c + 1 < cfg.cycles) {
            bool ok = false;
            if (cfg.optimize_phases && truth.noise_power > 0.0) {
                try {
                    std::vector<CrbUserModel> models;
                    for (int k = 0; k < n_users; ++k) {
                        const auto ku = static_cast<std::size_t>(k);
                        const AtomLocation& est = loc.user_locations[ku];
                        const Complex gain = loc.refined_gains[ku];
                        if (est.region == RegionTag::NearField) {
                            models.push_back(crb_user_model_nf(
                                SphericalPoint(est.range, est.polar, est.azimuth), gain,
                                truth.ris_bs_channels[ku], ris, truth.tx_symbols[ku]));
                        } else {
                            models.push_back(crb_user_model_ff(est.polar, est.azimuth, gain,
                                                               truth.ris_bs_channels[ku], ris,
                                                               truth.tx_symbols[ku]));
                        }
                    }
                    const CcmResult opt =
                        optimize_phase_shifts(models, phase_rows.topRows(c + 1), beta,
                                              cfg.weights, truth.noise_power, cfg.ccm);
                    if (!opt.failed) {
                        beta = opt.beta;
                        cycle.objective_before = opt.final_objective;
                        ok = true;
                    }
                } catch (const std::exception&) {
                    ok = false;
                }
            }
            if (!ok) {
                beta = random_phases(n_elem, rng);
                if (cfg.optimize_phases && truth.noise_power > 0.0) {
                    cycle.optimization_failed = true;
                    ++record.optimization_failures;
                }
            }
        }
        record.cycles.push_back(std::move(cycle));
    }
    // True region of each user, for report grouping.
    record.true_regions.clear();
    for (int k = 0; k < n_users; ++k) {
        record.true_regions.push_back(
            classify_region(truth.users[static_cast<std::size_t>(k)], ris));
    }
    return record;
}

RmseReport compute_rmse(const std::vector<TrialRecord>& records, int cycle) {
    if (records.empty()) {
        throw std::invalid_argument("compute_rmse: no records");
    }
    double nf_angle_sq = 0.0, ff_angle_sq = 0.0, nf_range_sq = 0.0, pos_sq = 0.0;
    long nf_count = 0, ff_count = 0, nf_range_count = 0, pos_count = 0;
    RmseReport report;
    for (const TrialRecord& rec : records) {
        const std::size_t ci =
            cycle <= 0 ? rec.cycles.size() - 1 : static_cast<std::size_t>(cycle - 1);
        const auto& est = rec.cycles.at(ci).estimates;
        for (std::size_t k = 0; k < rec.truth.users.size(); ++k) {
            const SphericalPoint& p = rec.truth.users[k];
            const AtomLocation& e = est[k];
            const double dth = e.polar - p.polar;
            const double dph = e.azimuth - p.azimuth;
            const bool truly_nf = rec.true_regions[k] == RegionTag::NearField;
            if (truly_nf) {
                nf_angle_sq += dth * dth + dph * dph;
                ++nf_count;
                if (e.region == RegionTag::NearField) {
                    nf_range_sq += (e.range - p.range) * (e.range - p.range);
                    ++nf_range_count;
                }
            } else {
                ff_angle_sq += dth * dth + dph * dph;
                ++ff_count;
            }
            const double est_range = e.region == RegionTag::NearField ? e.range : p.range;
            const Eigen::Vector3d xe =
                spherical_to_cartesian(SphericalPoint(est_range, e.polar, e.azimuth));
            const Eigen::Vector3d xt = spherical_to_cartesian(p);
            pos_sq += (xe - xt).squaredNorm();
            ++pos_count;
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.nf_user_count = static_cast<int>(nf_count);
    report.ff_user_count = static_cast<int>(ff_count);
    report.angle_rmse_nf = nf_count ? std::sqrt(nf_angle_sq / nf_count) : nan;
    report.angle_rmse_ff = ff_count ? std::sqrt(ff_angle_sq / ff_count) : nan;
    report.range_rmse_nf = nf_range_count ? std::sqrt(nf_range_sq / nf_range_count) : nan;
    report.position_rmse = pos_count ? std::sqrt(pos_sq / pos_count) : nan;
    return report;
}

std::vector<double> power_scaling_experiment(const std::vector<int>& element_counts,
                                             double rho_a, double rho_t, int trials,
                                             PhaseMode mode, std::mt19937_64& rng) {
    std::vector<double> means;
    means.reserve(element_counts.size());
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (int n_elem : element_counts) {
        double acc = 0.0;
        for (int t = 0; t < trials; ++t) {
            Complex h = 0.0;
            for (int n = 0; n < n_elem; ++n) {
                const Complex ha = complex_gaussian(rho_a * rho_a, rng);
                const Complex ht = complex_gaussian(rho_t * rho_t, rng);
                switch (mode) {
                    case PhaseMode::AllOnes:
                        h += std::conj(ha) * ht;
                        break;
                    case PhaseMode::RandomUniform:
                        h += std::conj(ha) * ht * std::polar(1.0, angle(rng));
                        break;
                    case PhaseMode::MaxSnr:
                        // beta_n cancels the composite phase: |h| = sum |ha||ht|.
                        h += std::abs(ha) * std::abs(ht);
                        break;
                }
            }
            acc += std::norm(h);
        }
        means.push_back(acc / trials);
    }
    return means;
}

}  // namespace hfloc

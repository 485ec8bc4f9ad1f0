#include <benchmark/benchmark.h>

#include <random>

#include "hfloc/ccm.hpp"
#include "hfloc/dictionary.hpp"
#include "hfloc/localizer.hpp"
#include "hfloc/protocol.hpp"

namespace {

using namespace hfloc;

void BM_NfSteering(benchmark::State& state) {
    const RisConfig ris = RisConfig::uniform(static_cast<int>(state.range(0)),
                                             static_cast<int>(state.range(0)), 0.03, 0.06);
    const SphericalPoint p(3.0, 1.2, 0.9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nf_steering(p, ris));
    }
}
BENCHMARK(BM_NfSteering)->Arg(10)->Arg(20)->Arg(40);

void BM_DictionaryBuild(benchmark::State& state) {
    const RisConfig ris = RisConfig::uniform(10, 10, 0.03, 0.06);
    GridConfig grid;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_atom_dictionary(ris, grid));
    }
}
BENCHMARK(BM_DictionaryBuild);

void BM_Localize(benchmark::State& state) {
    const RisConfig ris = RisConfig::uniform(10, 10, 0.03, 0.06);
    const AtomDictionary dict = build_atom_dictionary(ris, GridConfig{});
    std::mt19937_64 rng = trial_rng(3, 0);
    ScenarioConfig scen;
    const ScenarioTruth truth = scenario_sampler(scen, ris, rng);
    ProtocolConfig cfg;
    cfg.cycles = static_cast<int>(state.range(0));
    cfg.optimize_phases = false;
    for (auto _ : state) {
        std::mt19937_64 local = trial_rng(3, 1);
        benchmark::DoNotOptimize(run_protocol(truth, dict, ris, cfg, local));
    }
}
BENCHMARK(BM_Localize)->Arg(4)->Arg(8);

void BM_CcmIteration(benchmark::State& state) {
    const RisConfig ris = RisConfig::uniform(10, 10, 0.03, 0.06);
    std::mt19937_64 rng = trial_rng(5, 0);
    ScenarioConfig scen;
    const ScenarioTruth truth = scenario_sampler(scen, ris, rng);

    std::vector<CrbUserModel> models;
    for (std::size_t k = 0; k < truth.users.size(); ++k) {
        const auto& u = truth.users[k];
        if (classify_region(u, ris) == RegionTag::NearField) {
            models.push_back(crb_user_model_nf(u, truth.direct_gains[k],
                                               truth.ris_bs_channels[k], ris,
                                               truth.tx_symbols[k]));
        } else {
            models.push_back(crb_user_model_ff(u.polar, u.azimuth, truth.direct_gains[k],
                                               truth.ris_bs_channels[k], ris,
                                               truth.tx_symbols[k]));
        }
    }
    std::uniform_real_distribution<double> phase(0.0, 2 * 3.14159265358979323846);
    Eigen::MatrixXcd history(4, ris.size());
    for (int c = 0; c < 4; ++c) {
        for (int n = 0; n < ris.size(); ++n) {
            history(c, n) = std::polar(1.0, phase(rng));
        }
    }
    CcmConfig cfg;
    cfg.max_iterations = 1;
    CVec init(ris.size());
    for (int n = 0; n < ris.size(); ++n) init[n] = std::polar(1.0, phase(rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            optimize_phase_shifts(models, history, init, CrbWeights{}, 1e-2, cfg));
    }
}
BENCHMARK(BM_CcmIteration);

}  // namespace

BENCHMARK_MAIN();

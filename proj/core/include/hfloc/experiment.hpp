#ifndef HFLOC_EXPERIMENT_HPP
#define HFLOC_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hfloc/protocol.hpp"

namespace hfloc {

enum class SweepAxis { Snr, Cycles, Spacing, RisSize, PowerScaling };

/// Full description of one experiment run; unspecified config fields fall
/// back to the defaults below (10x10 panel at 5 GHz, K=2, L=3, C=20,
/// pi/10 angular grid, 0.25 m range grid, 10 m localization range).
struct ExperimentSpec {
    ScenarioConfig scenario;
    RisConfig ris = RisConfig::uniform(10, 10, 0.03, 0.06);
    GridConfig grid;
    ProtocolConfig protocol;

    SweepAxis axis = SweepAxis::Snr;
    std::vector<double> axis_values = {0.0};

    int trials = 100;
    std::uint64_t seed = 1;
    int workers = 1;
    int failure_budget = 0;
    std::string output_path = "results.csv";
};

struct ResultRow {
    double axis_value = 0.0;
    RmseReport rmse;
    double cpu_seconds = 0.0;  ///< mean per trial
    int trials = 0;
    std::uint64_t seed = 0;
};

struct PowerScalingRow {
    int elements = 0;
    std::string mode;
    double mean_power = 0.0;
    double predicted_power = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
};

const char* axis_name(SweepAxis axis);
SweepAxis axis_from_name(const std::string& name);

/// Parses a JSON config file into a fully-populated spec.
ExperimentSpec load_config(const std::string& path);
ExperimentSpec parse_config(const std::string& json_text);

/// Serializes the effective spec; load(save(spec)) == spec.
std::string serialize_config(const ExperimentSpec& spec);

/// Runs all trials for one fixed configuration.
std::vector<TrialRecord> run_trials(const ExperimentSpec& spec, const AtomDictionary& dict,
                                    int* failures = nullptr);

/// Runs the configured sweep and returns one row per axis value.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

/// Proposition-style power scaling check, two rows per element count
/// (all-ones and max-SNR phase shifts).
std::vector<PowerScalingRow> run_power_scaling(const ExperimentSpec& spec);

std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_csv(const std::vector<PowerScalingRow>& rows);

void write_file(const std::string& path, const std::string& contents);

}  // namespace hfloc

#endif

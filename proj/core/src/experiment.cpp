#include "hfloc/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace hfloc {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void check(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument("config: " + message);
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Snr: return "snr";
        case SweepAxis::Cycles: return "cycles";
        case SweepAxis::Spacing: return "spacing";
        case SweepAxis::RisSize: return "ris-size";
        case SweepAxis::PowerScaling: return "power-scaling";
    }
    return "snr";
}

SweepAxis axis_from_name(const std::string& name) {
    if (name == "snr") return SweepAxis::Snr;
    if (name == "cycles") return SweepAxis::Cycles;
    if (name == "spacing") return SweepAxis::Spacing;
    if (name == "ris-size") return SweepAxis::RisSize;
    if (name == "power-scaling") return SweepAxis::PowerScaling;
    throw std::invalid_argument("config: unknown sweep axis '" + name + "'");
}

ExperimentSpec parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    ExperimentSpec spec;

    if (j.contains("scenario")) {
        const json& s = j["scenario"];
        read_field(s, "users", spec.scenario.n_users);
        read_field(s, "scatters", spec.scenario.n_scatters);
        read_field(s, "radius_m", spec.scenario.radius);
        read_field(s, "min_range_m", spec.scenario.min_range);
        read_field(s, "scatter_gain_ratio", spec.scenario.scatter_gain_ratio);
        read_field(s, "ris_bs_variance", spec.scenario.ris_bs_variance);
    }
    int rows = spec.ris.rows, cols = spec.ris.cols;
    double spacing = spec.ris.spacing, wavelength = spec.ris.wavelength;
    if (j.contains("ris")) {
        const json& r = j["ris"];
        read_field(r, "rows", rows);
        read_field(r, "cols", cols);
        read_field(r, "spacing_m", spacing);
        read_field(r, "wavelength_m", wavelength);
    }
    spec.ris = RisConfig::uniform(rows, cols, spacing, wavelength);
    if (j.contains("grid")) {
        const json& g = j["grid"];
        read_field(g, "r_min_m", spec.grid.r_min);
        read_field(g, "range_step_m", spec.grid.range_step);
        read_field(g, "polar_divisions", spec.grid.n_polar);
        read_field(g, "azimuth_divisions", spec.grid.n_azimuth);
    }
    if (j.contains("protocol")) {
        const json& p = j["protocol"];
        read_field(p, "cycles", spec.protocol.cycles);
        read_field(p, "snr_db", spec.protocol.snr_db);
        read_field(p, "optimize_phases", spec.protocol.optimize_phases);
        read_field(p, "max_scatters", spec.protocol.localizer.max_scatters);
        read_field(p, "residual_fraction", spec.protocol.localizer.residual_fraction);
        if (p.contains("ccm")) {
            const json& c = p["ccm"];
            read_field(c, "rel_tolerance", spec.protocol.ccm.rel_tolerance);
            read_field(c, "max_iterations", spec.protocol.ccm.max_iterations);
            read_field(c, "step_initial", spec.protocol.ccm.step_initial);
            read_field(c, "step_shrink", spec.protocol.ccm.step_shrink);
            read_field(c, "sufficient_decrease", spec.protocol.ccm.sufficient_decrease);
            read_field(c, "step_floor", spec.protocol.ccm.step_floor);
        }
        if (p.contains("weights")) {
            const json& w = p["weights"];
            read_field(w, "range_nf", spec.protocol.weights.w_range_nf);
            read_field(w, "polar_nf", spec.protocol.weights.w_polar_nf);
            read_field(w, "azimuth_nf", spec.protocol.weights.w_azimuth_nf);
            read_field(w, "polar_ff", spec.protocol.weights.w_polar_ff);
            read_field(w, "azimuth_ff", spec.protocol.weights.w_azimuth_ff);
        }
    }
    if (j.contains("axis")) {
        spec.axis = axis_from_name(j["axis"].get<std::string>());
    }
    read_field(j, "axis_values", spec.axis_values);
    read_field(j, "trials", spec.trials);
    read_field(j, "seed", spec.seed);
    read_field(j, "workers", spec.workers);
    read_field(j, "failure_budget", spec.failure_budget);
    read_field(j, "output", spec.output_path);

    check(spec.trials > 0, "trial count must be positive");
    check(spec.protocol.cycles > 0, "cycle count must be positive");
    check(spec.scenario.n_users > 0, "user count must be positive");
    check(spec.scenario.n_scatters >= 0, "scatter count must be nonnegative");
    check(spec.protocol.localizer.max_scatters >= 0, "max_scatters must be nonnegative");
    check(spec.protocol.localizer.residual_fraction > 0.0 &&
              spec.protocol.localizer.residual_fraction < 1.0,
          "residual_fraction must lie in (0, 1)");
    check(!spec.axis_values.empty(), "axis values must be nonempty");
    for (std::size_t i = 1; i < spec.axis_values.size(); ++i) {
        check(spec.axis_values[i] > spec.axis_values[i - 1],
              "axis values must be strictly increasing");
    }
    check(spec.workers >= 1, "workers must be positive");
    return spec;
}

ExperimentSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config: cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentSpec& spec) {
    json j;
    j["scenario"] = {{"users", spec.scenario.n_users},
                     {"scatters", spec.scenario.n_scatters},
                     {"radius_m", spec.scenario.radius},
                     {"min_range_m", spec.scenario.min_range},
                     {"scatter_gain_ratio", spec.scenario.scatter_gain_ratio},
                     {"ris_bs_variance", spec.scenario.ris_bs_variance}};
    j["ris"] = {{"rows", spec.ris.rows},
                {"cols", spec.ris.cols},
                {"spacing_m", spec.ris.spacing},
                {"wavelength_m", spec.ris.wavelength}};
    j["grid"] = {{"r_min_m", spec.grid.r_min},
                 {"range_step_m", spec.grid.range_step},
                 {"polar_divisions", spec.grid.n_polar},
                 {"azimuth_divisions", spec.grid.n_azimuth}};
    j["protocol"] = {{"cycles", spec.protocol.cycles},
                     {"snr_db", spec.protocol.snr_db},
                     {"optimize_phases", spec.protocol.optimize_phases},
                     {"max_scatters", spec.protocol.localizer.max_scatters},
                     {"residual_fraction", spec.protocol.localizer.residual_fraction},
                     {"ccm",
                      {{"rel_tolerance", spec.protocol.ccm.rel_tolerance},
                       {"max_iterations", spec.protocol.ccm.max_iterations},
                       {"step_initial", spec.protocol.ccm.step_initial},
                       {"step_shrink", spec.protocol.ccm.step_shrink},
                       {"sufficient_decrease", spec.protocol.ccm.sufficient_decrease},
                       {"step_floor", spec.protocol.ccm.step_floor}}},
                     {"weights",
                      {{"range_nf", spec.protocol.weights.w_range_nf},
                       {"polar_nf", spec.protocol.weights.w_polar_nf},
                       {"azimuth_nf", spec.protocol.weights.w_azimuth_nf},
                       {"polar_ff", spec.protocol.weights.w_polar_ff},
                       {"azimuth_ff", spec.protocol.weights.w_azimuth_ff}}}};
    j["axis"] = axis_name(spec.axis);
    j["axis_values"] = spec.axis_values;
    j["trials"] = spec.trials;
    j["seed"] = spec.seed;
    j["workers"] = spec.workers;
    j["failure_budget"] = spec.failure_budget;
    j["output"] = spec.output_path;
    return j.dump(2);
}

std::vector<TrialRecord> run_trials(const ExperimentSpec& spec, const AtomDictionary& dict,
                                    int* failures) {
    std::vector<TrialRecord> records(static_cast<std::size_t>(spec.trials));
    std::vector<char> ok(static_cast<std::size_t>(spec.trials), 0);
    std::atomic<int> next{0};
    std::atomic<int> failed{0};

    auto worker = [&]() {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= spec.trials) break;
            try {
                std::mt19937_64 rng = trial_rng(spec.seed, static_cast<std::uint64_t>(t));
                ScenarioTruth truth = scenario_sampler(spec.scenario, spec.ris, rng);
                truth.noise_power = snr_calibration(truth, spec.ris, spec.protocol.snr_db);
                records[static_cast<std::size_t>(t)] =
                    run_protocol(truth, dict, spec.ris, spec.protocol, rng);
                ok[static_cast<std::size_t>(t)] = 1;
            } catch (const std::exception&) {
                failed.fetch_add(1);
            }
        }
    };

    const int n_workers = std::max(1, spec.workers);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }
    if (failures) *failures = failed.load();
    std::vector<TrialRecord> good;
    good.reserve(records.size());
    for (std::size_t t = 0; t < records.size(); ++t) {
        if (ok[t]) good.push_back(std::move(records[t]));
    }
    return good;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
    if (spec.axis == SweepAxis::PowerScaling) {
        throw std::invalid_argument(
            "run_experiment: power-scaling sweeps use run_power_scaling");
    }
    std::vector<ResultRow> rows;
    for (const double value : spec.axis_values) {
        ExperimentSpec point = spec;
        switch (spec.axis) {
            case SweepAxis::Snr:
                point.protocol.snr_db = value;
                break;
            case SweepAxis::Cycles:
                point.protocol.cycles = static_cast<int>(value);
                check(point.protocol.cycles >= 1, "cycles axis values must be >= 1");
                break;
            case SweepAxis::Spacing:
                point.grid.n_polar = static_cast<int>(value);
                point.grid.n_azimuth = static_cast<int>(value);
                check(point.grid.n_polar >= 1, "spacing axis values must be >= 1");
                break;
            case SweepAxis::RisSize: {
                const int side = static_cast<int>(value);
                check(side >= 1, "ris-size axis values must be >= 1");
                point.ris = RisConfig::uniform(side, side, spec.ris.spacing, spec.ris.wavelength);
                break;
            }
            case SweepAxis::PowerScaling:
                break;
        }
        const AtomDictionary dict = build_atom_dictionary(point.ris, point.grid);

        const std::clock_t t0 = std::clock();
        int failures = 0;
        const std::vector<TrialRecord> records = run_trials(point, dict, &failures);
        const double cpu = static_cast<double>(std::clock() - t0) / CLOCKS_PER_SEC;

        if (failures > spec.failure_budget) {
            throw std::runtime_error("run_experiment: " + std::to_string(failures) +
                                     " failed trials exceed the failure budget");
        }
        ResultRow row;
        row.axis_value = value;
        row.rmse = compute_rmse(records);
        row.cpu_seconds = cpu / spec.trials;
        row.trials = static_cast<int>(records.size());
        row.seed = spec.seed;
        rows.push_back(row);
    }
    return rows;
}

std::vector<PowerScalingRow> run_power_scaling(const ExperimentSpec& spec) {
    constexpr double kPi = std::numbers::pi;
    std::vector<int> counts;
    for (double v : spec.axis_values) counts.push_back(static_cast<int>(v));
    const double rho = 1.0;

    std::vector<PowerScalingRow> rows;
    for (auto [mode, name] : {std::pair{PhaseMode::AllOnes, "all-ones"},
                              std::pair{PhaseMode::MaxSnr, "max-snr"}}) {
        std::mt19937_64 rng = trial_rng(spec.seed, mode == PhaseMode::AllOnes ? 0u : 1u);
        const std::vector<double> means =
            power_scaling_experiment(counts, rho, rho, spec.trials, mode, rng);
        for (std::size_t i = 0; i < counts.size(); ++i) {
            PowerScalingRow row;
            row.elements = counts[i];
            row.mode = name;
            row.mean_power = means[i];
            const double n = counts[i];
            row.predicted_power =
                mode == PhaseMode::AllOnes ? n : n * n * kPi * kPi / 16.0;
            row.trials = spec.trials;
            row.seed = spec.seed;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "axis,angle_rmse_nf_rad,angle_rmse_ff_rad,range_rmse_nf_m,position_rmse_m,cpu_s,"
           "trials,seed\n";
    for (const ResultRow& r : rows) {
        out << fmt(r.axis_value) << ',' << fmt(r.rmse.angle_rmse_nf) << ','
            << fmt(r.rmse.angle_rmse_ff) << ',' << fmt(r.rmse.range_rmse_nf) << ','
            << fmt(r.rmse.position_rmse) << ',' << fmt(r.cpu_seconds) << ',' << r.trials << ','
            << r.seed << '\n';
    }
    return out.str();
}

std::string to_csv(const std::vector<PowerScalingRow>& rows) {
    std::ostringstream out;
    out << "elements,mode,mean_power,predicted_power,trials,seed\n";
    for (const PowerScalingRow& r : rows) {
        out << r.elements << ',' << r.mode << ',' << fmt(r.mean_power) << ','
            << fmt(r.predicted_power) << ',' << r.trials << ',' << r.seed << '\n';
    }
    return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << contents;
}

}  // namespace hfloc

// Command line front end: experiment runner for the RIS-aided hybrid
// near/far-field localization simulator.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hfloc/experiment.hpp"

namespace {

int env_workers() {
    if (const char* env = std::getenv("HFLOC_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    return 1;
}

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<std::string> out;
    std::optional<int> workers;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--seed", opts.seed, "Master RNG seed");
    cmd->add_option("--trials", opts.trials, "Number of Monte Carlo trials");
    cmd->add_option("--out", opts.out, "Output CSV path");
    cmd->add_option("--workers", opts.workers, "Worker thread count");
}

hfloc::ExperimentSpec make_spec(const CommonOpts& opts) {
    hfloc::ExperimentSpec spec;
    spec.workers = env_workers();
    if (!opts.config_path.empty()) {
        spec = hfloc::load_config(opts.config_path);
    }
    if (opts.seed) spec.seed = *opts.seed;
    if (opts.trials) spec.trials = *opts.trials;
    if (opts.out) spec.output_path = *opts.out;
    if (opts.workers) spec.workers = *opts.workers;
    return spec;
}

int run_sweep(const hfloc::ExperimentSpec& spec) {
    if (spec.axis == hfloc::SweepAxis::PowerScaling) {
        const auto rows = hfloc::run_power_scaling(spec);
        hfloc::write_file(spec.output_path, hfloc::to_csv(rows));
    } else {
        const auto rows = hfloc::run_experiment(spec);
        hfloc::write_file(spec.output_path, hfloc::to_csv(rows));
    }
    std::cout << "wrote " << spec.output_path << "\n";
    return 0;
}

int run_selftest() {
    using namespace hfloc;
    int failures = 0;
    auto report = [&failures](const char* name, bool ok) {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
        if (!ok) ++failures;
    };

    const RisConfig ris = RisConfig::uniform(10, 10, 0.03, 0.06);

    // Steering vectors stay on the unit circle.
    {
        const SphericalPoint p(3.0, 1.2, 0.8);
        const CVec b = nf_steering(p, ris);
        bool ok = true;
        for (Eigen::Index n = 0; n < b.size(); ++n) {
            ok = ok && std::abs(std::abs(b[n]) - 1.0) < 1e-12;
        }
        report("steering unit modulus", ok);
    }

    // Grid points all classify as near-field.
    {
        const auto grid = sample_nf_grid(ris, 0.25, 0.25, 10, 10);
        bool ok = !grid.empty();
        for (const auto& p : grid) {
            ok = ok && classify_region(p, ris) == RegionTag::NearField;
        }
        report("near-field grid classification", ok);
    }

    // Retraction restores the manifold.
    {
        CVec off(3);
        off << Complex(2.0, 0.0), Complex(1.0, 1.0), Complex(0.0, -0.5);
        const CVec on = retract(off);
        bool ok = true;
        for (Eigen::Index n = 0; n < on.size(); ++n) {
            ok = ok && std::abs(std::abs(on[n]) - 1.0) < 1e-12;
        }
        report("retraction unit modulus", ok);
    }

    // Dictionary consistency: a noiseless on-grid direct-path user produces
    // exactly the corresponding atom-signal column.
    {
        std::mt19937_64 rng = trial_rng(7, 0);
        const AtomDictionary dict = build_atom_dictionary(ris, GridConfig{});
        const auto& loc = dict.locations[42];
        const Complex alpha = std::polar(1.0, 0.7);
        CVec h_a(ris.size());
        for (int n = 0; n < ris.size(); ++n) h_a[n] = complex_gaussian(1.0, rng);
        const CVec h = cascaded_channel(
            h_a, alpha * nf_steering(SphericalPoint(loc.range, loc.polar, loc.azimuth), ris));
        const int cycles = 8;
        Eigen::MatrixXcd phases(cycles, ris.size());
        std::uniform_real_distribution<double> ang(0.0, 2 * 3.14159265358979323846);
        Eigen::VectorXcd g(cycles);
        for (int c = 0; c < cycles; ++c) {
            for (int n = 0; n < ris.size(); ++n) phases(c, n) = std::polar(1.0, ang(rng));
            g[c] = received_signal(phases.row(c).transpose(), h, 1.0, 0.0, rng);
        }
        const Eigen::MatrixXcd lambda = build_atom_signals(phases, h_a, dict.atoms, 1.0);
        report("dictionary consistency",
               (g - alpha * lambda.col(42)).norm() < 1e-9 * g.norm());
    }

    // Power scaling orders of magnitude.
    {
        std::mt19937_64 rng = trial_rng(11, 0);
        const auto ones = power_scaling_experiment({256}, 1.0, 1.0, 2000,
                                                   PhaseMode::AllOnes, rng);
        const auto best = power_scaling_experiment({256}, 1.0, 1.0, 2000,
                                                   PhaseMode::MaxSnr, rng);
        const double pi2 = 3.14159265358979323846 * 3.14159265358979323846;
        report("power scaling trends",
               std::abs(ones[0] / 256.0 - 1.0) < 0.2 &&
                   std::abs(best[0] / (256.0 * 256.0 * pi2 / 16.0) - 1.0) < 0.2);
    }

    std::printf("%s\n", failures == 0 ? "selftest OK" : "selftest FAILED");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-aided hybrid near/far-field localization simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts, sweep_opts, power_opts;
    CLI::App* cmd_run = app.add_subcommand("run", "Single experiment at the configured settings");
    add_common(cmd_run, run_opts);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "Sweep the configured axis");
    add_common(cmd_sweep, sweep_opts);
    CLI::App* cmd_power =
        app.add_subcommand("power-scaling", "Received-power scaling versus panel size");
    add_common(cmd_power, power_opts);
    app.add_subcommand("selftest", "Run the built-in invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            hfloc::ExperimentSpec spec = make_spec(run_opts);
            spec.axis_values = {spec.axis_values.front()};
            return run_sweep(spec);
        }
        if (cmd_sweep->parsed()) {
            return run_sweep(make_spec(sweep_opts));
        }
        if (cmd_power->parsed()) {
            hfloc::ExperimentSpec spec = make_spec(power_opts);
            if (spec.axis != hfloc::SweepAxis::PowerScaling) {
                spec.axis = hfloc::SweepAxis::PowerScaling;
                spec.axis_values = {64, 256};
            }
            const auto rows = hfloc::run_power_scaling(spec);
            hfloc::write_file(spec.output_path, hfloc::to_csv(rows));
            std::cout << "wrote " << spec.output_path << "\n";
            return 0;
        }
        return run_selftest();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

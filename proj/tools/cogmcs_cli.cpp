#include "cogmcs/config.hpp"
#include "cogmcs/errors.hpp"
#include "cogmcs/experiment.hpp"
#include "cogmcs/linkmath.hpp"
#include "cogmcs/qnetwork.hpp"
#include "cogmcs/report.hpp"
#include "cogmcs/selftest.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cogmcs;

namespace {

struct CommonArgs {
    std::string config;
    std::optional<int> trials;
    std::optional<int> frames;
    std::optional<std::uint64_t> seed;
    std::optional<int> phi;
    std::string out_dir = "out";
    int workers = 0;
    bool trial_csv = false;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config, "scenario/agent config file (key = value)")->check(CLI::ExistingFile);
    cmd->add_option("--trials", a.trials, "number of trials (seeds seed..seed+trials-1)")->check(CLI::PositiveNumber);
    cmd->add_option("--frames", a.frames, "frames per trial")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", a.seed, "base seed");
    cmd->add_option("--phi", a.phi, "history length of the DQN state")->check(CLI::PositiveNumber);
    cmd->add_option("--out-dir", a.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--workers", a.workers, "worker threads (default: COGMCS_WORKERS or all cores)");
    cmd->add_flag("--quiet,-q", a.quiet, "no progress output");
}

RunConfig resolve(const CommonArgs& a) {
    RunConfig rc = a.config.empty() ? RunConfig{} : load_config(a.config);
    if (a.trials) rc.scenario.trials = *a.trials;
    if (a.frames) rc.scenario.frames = *a.frames;
    if (a.seed) rc.scenario.seed = *a.seed;
    if (a.phi) rc.agent.phi = *a.phi;
    rc.scenario.validate();
    rc.agent.validate();
    return rc;
}

std::vector<PolicyKind> parse_policies(const std::string& text) {
    if (text == "all") return {std::begin(kAllPolicies), std::end(kAllPolicies)};
    std::vector<PolicyKind> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::size_t end = comma == std::string::npos ? text.size() : comma;
        out.push_back(parse_policy(std::string_view(text).substr(start, end - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

ExperimentOptions experiment_options(const CommonArgs& a, int frames, int trials) {
    ExperimentOptions opt;
    opt.workers = a.workers;
    opt.keep_trials = a.trial_csv;
    if (!a.quiet) {
        opt.progress = [frames, trials](PolicyKind kind, int trial, int frame, double recent) {
            std::fprintf(stderr, "[%s %d/%d] frame %d/%d  last-200 rate %.1f bits/frame\n",
                         policy_name(kind).c_str(), trial + 1, trials, frame, frames, recent);
            std::fflush(stderr);
        };
    }
    return opt;
}

void write_outputs(const fs::path& dir, const RunConfig& rc, const std::vector<PolicySummary>& rows,
                   bool trial_csv) {
    fs::create_directories(dir);
    {
        std::FILE* f = std::fopen((dir / "config.cfg").c_str(), "w");
        if (!f) throw std::runtime_error("cannot write " + (dir / "config.cfg").string());
        const std::string text = format_config(rc);
        std::fwrite(text.data(), 1, text.size(), f);
        std::fclose(f);
    }
    for (const auto& s : rows) {
        const std::string stem = series_stem(s.policy, s.switching_cost);
        write_mean_csv(dir / (stem + "_mean.csv"), s);
        if (trial_csv) {
            for (std::size_t i = 0; i < s.per_trial.size(); ++i) {
                write_trial_csv(dir / (stem + "_trial" + std::to_string(i) + ".csv"), s.per_trial[i]);
            }
        }
    }
    write_summary_csv(dir / "summary.csv", rows);
}

void print_summary(const std::vector<PolicySummary>& rows) {
    std::printf("%-8s %10s %7s %16s %15s\n", "policy", "cost", "trials", "converged_rate", "switching_rate");
    for (const auto& s : rows) {
        std::printf("%-8s %10g %7d %16.2f %15.4f\n", policy_name(s.policy).c_str(), s.switching_cost, s.trials,
                    s.converged_rate, s.switching_rate);
    }
}

int cmd_run(const CommonArgs& a, const std::string& policy_text, std::optional<double> switch_cost,
            const std::string& load_path, const std::string& save_path) {
    RunConfig rc = resolve(a);
    if (switch_cost) rc.scenario.switching_cost = *switch_cost;
    rc.scenario.validate();
    const auto policies = parse_policies(policy_text);

    ExperimentOptions opt = experiment_options(a, rc.scenario.frames, rc.scenario.trials);
    const std::vector<int> sizes = rc.agent.layer_sizes(default_mcs_table().size());
    std::optional<QNetwork> initial;
    if (!load_path.empty()) {
        initial = load_weights(load_path, sizes);
        opt.initial_weights = &*initial;
    }
    QNetwork trained = QNetwork::zeros(sizes);
    const bool save = !save_path.empty();
    if (save) opt.first_dqn_network = &trained;

    const auto rows = run_experiment(rc.scenario, rc.agent, policies, opt);
    write_outputs(a.out_dir, rc, rows, a.trial_csv);
    if (save) {
        bool has_dqn = false;
        for (PolicyKind p : policies) has_dqn = has_dqn || p == PolicyKind::Dqn;
        if (!has_dqn) throw ConfigError("--save-weights needs the dqn policy");
        save_weights(trained, save_path);
    }
    print_summary(rows);
    return 0;
}

int cmd_sweep(const CommonArgs& a, const std::string& policy_text, const std::string& costs_text,
              const std::string& unit) {
    const RunConfig rc = resolve(a);
    std::vector<double> costs = parse_number_list(costs_text);
    if (unit == "kbits") {
        for (double& c : costs) c *= 1000.0;
    }
    const auto policies = parse_policies(policy_text);
    const auto rows = sweep_switching_cost(rc.scenario, rc.agent, costs, policies,
                                           experiment_options(a, rc.scenario.frames, rc.scenario.trials));
    write_outputs(a.out_dir, rc, rows, a.trial_csv);
    print_summary(rows);
    return 0;
}

int cmd_selftest() {
    bool all = true;
    for (const auto& r : run_selftests()) {
        std::printf("%s  %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        all = all && r.passed;
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cogmcs - DQN modulation and coding selection in a cognitive heterogeneous network"};
    app.require_subcommand(1);

    CommonArgs run_args;
    std::string run_policy = "dqn";
    std::optional<double> switch_cost;
    std::string load_path, save_path;
    auto* run = app.add_subcommand("run", "run trials of one or more policies");
    add_common(run, run_args);
    run->add_option("--policy", run_policy, "dqn|oracle|snr|ucb|random, a comma list, or all")
        ->capture_default_str();
    run->add_option("--switch-cost", switch_cost, "switching cost c in bits")->check(CLI::NonNegativeNumber);
    run->add_option("--load-weights", load_path, "initial DQN weights")->check(CLI::ExistingFile);
    run->add_option("--save-weights", save_path, "write the trained DQN of trial 0 here");
    run->add_flag("!--no-trial-csv", run_args.trial_csv, "skip the per-trial CSV files");
    run_args.trial_csv = true;

    CommonArgs sweep_args;
    std::string sweep_policy = "all";
    std::string costs = "0,500,1000,1500,2000,2500,3000,3500,4000,4500,5000,5500,6000";
    std::string unit = "bits";
    auto* sweep = app.add_subcommand("sweep", "sweep the switching cost");
    add_common(sweep, sweep_args);
    sweep->add_option("--policy", sweep_policy, "policies to run")->capture_default_str();
    sweep->add_option("--costs", costs, "comma-separated switching costs")->capture_default_str();
    sweep->add_option("--unit", unit, "unit of --costs")->check(CLI::IsMember({"bits", "kbits"}))
        ->capture_default_str();
    sweep->add_flag("--trial-csv", sweep_args.trial_csv, "also write per-trial CSV files");

    auto* selftest = app.add_subcommand("selftest", "run the numerical invariant checks");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(run_args, run_policy, switch_cost, load_path, save_path);
        if (*sweep) return cmd_sweep(sweep_args, sweep_policy, costs, unit);
        if (*selftest) return cmd_selftest();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}

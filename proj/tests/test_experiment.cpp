#include "cogmcs/config.hpp"
#include "cogmcs/errors.hpp"
#include "cogmcs/experiment.hpp"
#include "cogmcs/report.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

using namespace cogmcs;
namespace fs = std::filesystem;

namespace {

AgentConfig small_agent() {
    AgentConfig a;
    a.hidden = {16, 16};
    return a;
}

ScenarioConfig quasi_static(int frames, int trials) {
    ScenarioConfig c;
    c.avg_inr_db = {5.0, 5.0};
    c.miss_prob = {1.0, 1.0};
    c.rho = 0.99;
    c.frames = frames;
    c.trials = trials;
    return c;
}

ExperimentOptions options(int workers, bool keep_trials) {
    ExperimentOptions o;
    o.workers = workers;
    o.keep_trials = keep_trials;
    return o;
}

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cogmcs_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("moving average examples") {
    const std::vector<double> constant(500, 3.5);
    for (double v : moving_average(constant)) CHECK(v == 3.5);

    const std::vector<double> series{4.0, -1.0, 7.5, 0.0};
    CHECK(moving_average(series, 1) == series);

    std::vector<double> step(300, 0.0);
    for (std::size_t t = 99; t < step.size(); ++t) step[t] = 1.0;  // frame 100 onwards
    const auto ma = moving_average(step, 200);
    CHECK(ma[149] == doctest::Approx(51.0 / 150.0));
    CHECK(ma[0] == 0.0);
    CHECK(ma[299] == doctest::Approx(1.0));  // frames 101..300

    CHECK_THROWS(moving_average(series, 0));
    CHECK(moving_average(std::vector<double>{}).empty());
}

TEST_CASE("moving average uses min(t, window) frames") {
    Rng rng(1);
    std::vector<double> x(700);
    for (double& v : x) v = rng.uniform(0.0, 6000.0);
    const auto ma = moving_average(x, 200);
    for (std::size_t t : {0u, 1u, 198u, 199u, 200u, 450u, 699u}) {
        const std::size_t start = t >= 199 ? t - 199 : 0;
        double sum = 0.0;
        for (std::size_t k = start; k <= t; ++k) sum += x[k];
        CHECK(ma[t] == doctest::Approx(sum / (t - start + 1)).epsilon(1e-14));
    }
}

TEST_CASE("tail metrics use the last 5000 frames") {
    MetricsSeries m;
    m.moving_avg.assign(8000, 1.0);
    m.switched.assign(8000, 1);
    for (std::size_t t = 3000; t < 8000; ++t) {
        m.moving_avg[t] = 2.0;
        m.switched[t] = t % 10 == 0;
    }
    CHECK(m.converged_rate() == 2.0);
    CHECK(m.switching_rate() == doctest::Approx(0.1));
}

TEST_CASE("policy names") {
    for (PolicyKind k : {PolicyKind::Dqn, PolicyKind::Oracle, PolicyKind::Snr, PolicyKind::Ucb, PolicyKind::Random}) {
        CHECK(parse_policy(policy_name(k)) == k);
    }
    CHECK_THROWS_AS(parse_policy("greedy"), ConfigError);
}

TEST_CASE("oracle without interference averages the best rate over fading") {
    ScenarioConfig c;
    c.frames = 1000;
    c.rho = 0.5;
    const auto m = run_trial(c, AgentConfig{}, PolicyKind::Oracle, 8).metrics;
    Environment env(c, default_mcs_table(), 8);
    double expected = 0.0, realised = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const double g = env.advance().gammas.gamma0;
        expected += rate(default_mcs_table()[optimal_mcs(g, 1000, default_mcs_table())], g, 1000);
        env.transmit(0, 0);
        realised += m.bits[static_cast<std::size_t>(t)];
    }
    // Per-frame delivered bits have sd below 3000; 1000 frames.
    CHECK(std::abs(realised - expected) / 1000.0 < 4.0 * 3000.0 / std::sqrt(1000.0));
}

TEST_CASE("random policy at very high SNR delivers 3250 bits per frame on average") {
    ScenarioConfig c;
    c.avg_snr_db = 90.0;
    c.rho = 1.0;
    c.frames = 40000;
    const auto m = run_trial(c, AgentConfig{}, PolicyKind::Random, 2).metrics;
    double sum = 0.0;
    for (double b : m.bits) sum += b;
    const double sd = std::sqrt((1000.0 * 1000 + 2000.0 * 2000 + 4000.0 * 4000 + 6000.0 * 6000) / 4 - 3250.0 * 3250);
    CHECK(std::abs(sum / c.frames - 3250.0) < 4.0 * sd / std::sqrt(c.frames));
}

TEST_CASE("first frame is never charged a switch") {
    ScenarioConfig c = quasi_static(50, 1);
    c.switching_cost = 500.0;
    for (PolicyKind k : {PolicyKind::Random, PolicyKind::Ucb, PolicyKind::Dqn}) {
        const auto m = run_trial(c, small_agent(), k, 1).metrics;
        CHECK(m.switched[0] == 0);
        for (std::size_t t = 1; t < m.frames(); ++t) {
            CHECK(static_cast<bool>(m.switched[t]) == (m.action[t] != m.action[t - 1]));
            CHECK(m.reward[t] == m.bits[t] - (m.switched[t] ? 500.0 : 0.0));
        }
    }
}

TEST_CASE("single-trial report equals the trial series") {
    const ScenarioConfig c = quasi_static(600, 1);
    const PolicyKind policies[] = {PolicyKind::Ucb};
    const auto rows = run_experiment(c, small_agent(), policies, options(1, true));
    const auto m = run_trial(c, small_agent(), PolicyKind::Ucb, c.seed).metrics;
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean_moving_avg == m.moving_avg);
    CHECK(rows[0].converged_rate == m.converged_rate());
    CHECK(rows[0].switching_rate == doctest::Approx(m.switching_rate()));
}

TEST_CASE("trial-averaged curve is the pointwise mean of trials") {
    const ScenarioConfig c = quasi_static(400, 3);
    const PolicyKind policies[] = {PolicyKind::Snr, PolicyKind::Dqn};
    const auto rows = run_experiment(c, small_agent(), policies, options(1, true));
    for (const auto& s : rows) {
        REQUIRE(s.per_trial.size() == 3);
        for (std::size_t t = 0; t < 400; ++t) {
            double sum = 0.0;
            for (const auto& m : s.per_trial) sum += m.moving_avg[t];
            CHECK(s.mean_moving_avg[t] == sum / 3.0);
        }
    }
}

TEST_CASE("trials with identical seeds give identical curves") {
    ScenarioConfig c = quasi_static(500, 1);
    const auto a = run_trial(c, small_agent(), PolicyKind::Dqn, 77).metrics;
    const auto b = run_trial(c, small_agent(), PolicyKind::Dqn, 77).metrics;
    CHECK(a.moving_avg == b.moving_avg);
    CHECK(a.action == b.action);
}

TEST_CASE("results do not depend on the worker count") {
    const ScenarioConfig c = quasi_static(300, 4);
    const PolicyKind policies[] = {PolicyKind::Dqn, PolicyKind::Ucb};
    const auto serial = run_experiment(c, small_agent(), policies, options(1, false));
    const auto parallel = run_experiment(c, small_agent(), policies, options(3, false));
    for (std::size_t p = 0; p < 2; ++p) {
        CHECK(serial[p].mean_moving_avg == parallel[p].mean_moving_avg);
        CHECK(serial[p].switch_fraction == parallel[p].switch_fraction);
    }
}

TEST_CASE("zero trials is a configuration error") {
    ScenarioConfig c = quasi_static(10, 1);
    c.trials = 0;
    const PolicyKind policies[] = {PolicyKind::Oracle};
    CHECK_THROWS_AS(run_experiment(c, small_agent(), policies), ConfigError);
}

TEST_CASE("cost sweep keeps oracle and SNR-based rows constant") {
    const ScenarioConfig c = quasi_static(300, 2);
    const PolicyKind policies[] = {PolicyKind::Oracle, PolicyKind::Snr, PolicyKind::Ucb};
    const double costs[] = {0.0, 1000.0, 6000.0};
    const auto rows = sweep_switching_cost(c, small_agent(), costs, policies, options(1, false));
    REQUIRE(rows.size() == 9);
    for (std::size_t k = 1; k < 3; ++k) {
        for (std::size_t p = 0; p < 2; ++p) {
            CHECK(rows[3 * k + p].switching_cost == costs[k]);
            CHECK(rows[3 * k + p].converged_rate == rows[p].converged_rate);
            CHECK(rows[3 * k + p].switching_rate == rows[p].switching_rate);
        }
    }
    const double bad[] = {-1.0};
    CHECK_THROWS_AS(sweep_switching_cost(c, small_agent(), bad, policies), ConfigError);
}

TEST_CASE("CSV output round-trips the metrics exactly") {
    const fs::path dir = temp_dir("csv");
    const ScenarioConfig c = quasi_static(6000, 2);
    const PolicyKind policies[] = {PolicyKind::Ucb};
    const auto rows = run_experiment(c, small_agent(), policies, options(1, true));
    const auto& m = rows[0].per_trial[0];
    write_trial_csv(dir / "trial.csv", m);
    write_mean_csv(dir / "mean.csv", rows[0]);
    write_summary_csv(dir / "summary.csv", rows);

    const auto ma = read_csv_column(dir / "trial.csv", "moving_avg");
    const auto sw = read_csv_column(dir / "trial.csv", "switched");
    CHECK(ma.size() == 6000);
    CHECK(read_csv_column(dir / "trial.csv", "frame").back() == 6000.0);
    CHECK(read_csv_column(dir / "trial.csv", "reward") == m.bits);
    CHECK(tail_mean(ma) == m.converged_rate());
    CHECK(tail_mean(sw) == m.switching_rate());

    CHECK(tail_mean(read_csv_column(dir / "mean.csv", "moving_avg")) == rows[0].converged_rate);
    CHECK(tail_mean(read_csv_column(dir / "mean.csv", "switch_fraction")) == rows[0].switching_rate);
    CHECK(read_csv_column(dir / "summary.csv", "converged_rate")[0] == rows[0].converged_rate);
    CHECK(read_csv_column(dir / "summary.csv", "switching_rate")[0] == rows[0].switching_rate);

    const std::string header = slurp(dir / "trial.csv").substr(0, slurp(dir / "trial.csv").find('\n'));
    CHECK(header == "frame,reward,moving_avg,action,switched,gamma0_db,gamma_bar_db");
    CHECK_THROWS_AS(read_csv_column(dir / "trial.csv", "nope"), FormatError);
    fs::remove_all(dir);
}

TEST_CASE("identical runs write byte-identical CSV files") {
    const fs::path dir = temp_dir("determinism");
    const ScenarioConfig c = quasi_static(800, 2);
    const PolicyKind policies[] = {PolicyKind::Dqn, PolicyKind::Ucb};
    for (const char* run : {"a", "b"}) {
        const auto rows = run_experiment(c, small_agent(), policies, options(2, true));
        for (const auto& s : rows) {
            write_trial_csv(dir / run / (series_stem(s.policy, 0) + ".csv"), s.per_trial[1]);
            write_mean_csv(dir / run / (series_stem(s.policy, 0) + "_mean.csv"), s);
        }
    }
    for (const char* f : {"dqn_c0.csv", "dqn_c0_mean.csv", "ucb_c0.csv", "ucb_c0_mean.csv"}) {
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    fs::remove_all(dir);
}

TEST_CASE("initial weights and network capture") {
    ScenarioConfig c = quasi_static(200, 1);
    c.seed = 3;
    const AgentConfig a = small_agent();
    TrialOptions keep;
    keep.keep_network = true;
    const TrialResult r = run_trial(c, a, PolicyKind::Dqn, 3, keep);
    REQUIRE(r.network.has_value());
    CHECK(r.network->layer_sizes() == a.layer_sizes(4));

    TrialOptions warm;
    warm.initial_weights = &*r.network;
    const auto warm_run = run_trial(c, a, PolicyKind::Dqn, 3, warm).metrics;
    const auto cold_run = run_trial(c, a, PolicyKind::Dqn, 3).metrics;
    CHECK(warm_run.action != cold_run.action);
    CHECK_THROWS_AS(run_trial(c, a, PolicyKind::Oracle, 3, warm), ConfigError);

    QNetwork captured;
    ExperimentOptions opt;
    opt.workers = 1;
    opt.first_dqn_network = &captured;
    const PolicyKind policies[] = {PolicyKind::Dqn};
    run_experiment(c, a, policies, opt);
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK(captured.forward(x) == r.network->forward(x));
}

TEST_CASE("progress callback fires every 1000 frames") {
    const ScenarioConfig c = quasi_static(3500, 2);
    ExperimentOptions opt;
    opt.workers = 2;
    std::vector<int> frames;
    opt.progress = [&frames](PolicyKind, int, int frame, double) { frames.push_back(frame); };
    const PolicyKind policies[] = {PolicyKind::Oracle};
    run_experiment(c, small_agent(), policies, opt);
    CHECK(frames.size() == 6);
}

TEST_CASE("config parsing") {
    const RunConfig rc = parse_config(
        "# dynamic preset\n"
        "avg_snr_db = 20\n"
        "avg_inr_db = 5, 5, 5\n"
        "miss_prob = 1, 1, 0.5   # third ST leaks half the time\n"
        "rho = 0\n"
        "phi = 10\n"
        "hidden = 64, 32\n");
    CHECK(rc.scenario.avg_inr_db == std::vector<double>{5, 5, 5});
    CHECK(rc.scenario.miss_prob == std::vector<double>{1, 1, 0.5});
    CHECK(rc.scenario.rho == 0.0);
    CHECK(rc.scenario.frames == 20000);
    CHECK(rc.agent.phi == 10);
    CHECK(rc.agent.hidden == std::vector<int>{64, 32});

    const RunConfig back = parse_config(format_config(rc));
    CHECK(format_config(back) == format_config(rc));

    CHECK_THROWS_AS(parse_config("colour = blue\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("rho = fast\n"), FormatError);
    CHECK_THROWS_AS(parse_config("rho 0.5\n"), FormatError);
    CHECK_THROWS_AS(parse_config("rho = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("avg_inr_db = 5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("hidden = 10.5\n"), FormatError);
    CHECK_THROWS_AS(load_config("/nonexistent/cogmcs.cfg"), ConfigError);
    CHECK(parse_number_list("0,500, 1000") == std::vector<double>{0, 500, 1000});
    CHECK_THROWS_AS(parse_number_list("0,,1"), FormatError);
}

TEST_CASE("shipped presets load") {
    const fs::path root = COGMCS_SOURCE_DIR;
    const RunConfig q = load_config(root / "configs" / "quasi_static.cfg");
    CHECK(q.scenario.secondary_count() == 2);
    CHECK(q.scenario.rho == 0.99);
    const RunConfig d = load_config(root / "configs" / "dynamic.cfg");
    CHECK(d.scenario.miss_prob == std::vector<double>{1, 1, 0.5});
    CHECK(d.scenario.rho == 0.0);
}

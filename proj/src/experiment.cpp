#include "cogmcs/experiment.hpp"

#include "cogmcs/baselines.hpp"
#include "cogmcs/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace cogmcs {

PolicyKind parse_policy(std::string_view name) {
    if (name == "dqn") return PolicyKind::Dqn;
    if (name == "oracle") return PolicyKind::Oracle;
    if (name == "snr") return PolicyKind::Snr;
    if (name == "ucb") return PolicyKind::Ucb;
    if (name == "random") return PolicyKind::Random;
    throw ConfigError("unknown policy '" + std::string(name) + "'");
}

std::string policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Dqn: return "dqn";
        case PolicyKind::Oracle: return "oracle";
        case PolicyKind::Snr: return "snr";
        case PolicyKind::Ucb: return "ucb";
        case PolicyKind::Random: return "random";
    }
    return "unknown";
}

std::vector<double> moving_average(std::span<const double> series, int window) {
    if (window < 1) throw std::invalid_argument("moving average window must be >= 1");
    std::vector<double> out(series.size());
    const auto w = static_cast<std::size_t>(window);
    for (std::size_t t = 0; t < series.size(); ++t) {
        const std::size_t start = t + 1 > w ? t + 1 - w : 0;
        double sum = 0.0;
        for (std::size_t k = start; k <= t; ++k) sum += series[k];
        out[t] = sum / static_cast<double>(t + 1 - start);
    }
    return out;
}

double tail_mean(std::span<const double> series, int window) {
    if (series.empty()) return 0.0;
    const std::size_t n = std::min(series.size(), static_cast<std::size_t>(std::max(window, 1)));
    double sum = 0.0;
    for (std::size_t k = series.size() - n; k < series.size(); ++k) sum += series[k];
    return sum / static_cast<double>(n);
}

double MetricsSeries::switching_rate() const {
    if (switched.empty()) return 0.0;
    const std::size_t n = std::min<std::size_t>(switched.size(), kConvergedWindow);
    long count = 0;
    for (std::size_t k = switched.size() - n; k < switched.size(); ++k) count += switched[k];
    return static_cast<double>(count) / static_cast<double>(n);
}

// --- policies -------------------------------------------------------------

namespace {

class OraclePolicy final : public Policy {
public:
    OraclePolicy(const McsTable& table, int n) : table_(table), n_(n) {}
    std::size_t select(const FrameObservation& obs, Rng&) override {
        return oracle_select(obs.gammas.gamma_bar, n_, table_);
    }
    void feedback(const FrameOutcome&, Rng&) override {}

private:
    McsTable table_;
    int n_;
};

class SnrPolicy final : public Policy {
public:
    SnrPolicy(const McsTable& table, int n) : table_(table), n_(n) {}
    std::size_t select(const FrameObservation& obs, Rng&) override {
        return snr_select(obs.gammas.gamma0, n_, table_);
    }
    void feedback(const FrameOutcome&, Rng&) override {}

private:
    McsTable table_;
    int n_;
};

class UcbPolicy final : public Policy {
public:
    explicit UcbPolicy(std::size_t arms) : state_(arms) {}
    std::size_t select(const FrameObservation&, Rng&) override { return ucb_select(state_); }
    void feedback(const FrameOutcome& outcome, Rng&) override {
        ucb_update(state_, outcome.action, outcome.reward);
    }

private:
    UcbState state_;
};

class RandomPolicy final : public Policy {
public:
    explicit RandomPolicy(std::size_t arms) : arms_(arms) {}
    std::size_t select(const FrameObservation&, Rng& rng) override { return random_select(arms_, rng); }
    void feedback(const FrameOutcome&, Rng&) override {}

private:
    std::size_t arms_;
};

} // namespace

DqnPolicy::DqnPolicy(const ScenarioConfig& scenario, const AgentConfig& agent, const McsTable& table,
                     std::uint64_t seed)
    : agent_(agent, table.size(), seed),
      encoding_{table.size(), static_cast<double>(max_bits_per_symbol(table)) * scenario.symbols_per_frame},
      history_(static_cast<std::size_t>(agent.phi)) {}

std::size_t DqnPolicy::select(const FrameObservation& obs, Rng& rng) {
    std::vector<double> state = build_state(history_, agent_.config().phi, obs.gammas.gamma0, encoding_);
    if (have_prev_) agent_.observe({std::move(state_), action_, reward_, state});
    state_ = std::move(state);
    action_ = agent_.select_action(state_, rng);
    return action_;
}

void DqnPolicy::feedback(const FrameOutcome& outcome, Rng& rng) {
    std::rotate(history_.begin(), history_.begin() + 1, history_.end());
    history_.back() = outcome;
    reward_ = encoding_.reward(outcome.reward);
    have_prev_ = true;
    agent_.learn(rng);
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, const ScenarioConfig& scenario,
                                    const AgentConfig& agent, const McsTable& table,
                                    std::uint64_t seed) {
    switch (kind) {
        case PolicyKind::Dqn: return std::make_unique<DqnPolicy>(scenario, agent, table, seed);
        case PolicyKind::Oracle: return std::make_unique<OraclePolicy>(table, scenario.symbols_per_frame);
        case PolicyKind::Snr: return std::make_unique<SnrPolicy>(table, scenario.symbols_per_frame);
        case PolicyKind::Ucb: return std::make_unique<UcbPolicy>(table.size());
        case PolicyKind::Random: return std::make_unique<RandomPolicy>(table.size());
    }
    throw ConfigError("unknown policy");
}

// --- trials ---------------------------------------------------------------

TrialResult run_trial(const ScenarioConfig& config, const AgentConfig& agent, PolicyKind kind,
                      std::uint64_t seed, const TrialOptions& options) {
    config.validate();
    const McsTable table = default_mcs_table();
    Environment env(config, table, seed);
    Rng policy_rng(seed, Stream::Policy);
    auto policy = make_policy(kind, config, agent, table, seed);
    auto* dqn = dynamic_cast<DqnPolicy*>(policy.get());
    if (options.initial_weights) {
        if (!dqn) throw ConfigError("initial weights only apply to the dqn policy");
        dqn->agent().set_network(*options.initial_weights);
    }

    TrialResult result;
    MetricsSeries& m = result.metrics;
    const auto frames = static_cast<std::size_t>(config.frames);
    m.bits.reserve(frames);
    m.reward.reserve(frames);
    m.switched.reserve(frames);
    m.action.reserve(frames);
    m.gamma0_db.reserve(frames);
    m.gamma_bar_db.reserve(frames);

    std::size_t prev_action = 0;
    for (int t = 1; t <= config.frames; ++t) {
        const FrameObservation& obs = env.advance();
        const std::size_t action = policy->select(obs, policy_rng);
        // No switch is charged on the first frame.
        const FrameOutcome outcome = env.transmit(action, t == 1 ? action : prev_action);
        policy->feedback(outcome, policy_rng);
        prev_action = action;

        m.bits.push_back(outcome.bits);
        m.reward.push_back(outcome.reward);
        m.switched.push_back(outcome.switched ? 1 : 0);
        m.action.push_back(table[action].index);
        m.gamma0_db.push_back(linear_to_db(outcome.gamma0));
        m.gamma_bar_db.push_back(linear_to_db(outcome.gamma_bar));
        if (options.progress && options.progress_every > 0 && t % options.progress_every == 0) {
            options.progress(t, m);
        }
    }
    m.moving_avg = moving_average(m.bits);
    if (options.keep_network && dqn) result.network = dqn->agent().network();
    return result;
}

// --- experiments ----------------------------------------------------------

int default_workers() {
    if (const char* env = std::getenv("COGMCS_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    const auto n_threads = static_cast<std::size_t>(std::max(1, workers));
    if (n_threads == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < std::min(n_threads, count); ++k) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

std::vector<PolicySummary> run_experiment(const ScenarioConfig& config, const AgentConfig& agent,
                                          std::span<const PolicyKind> policies,
                                          const ExperimentOptions& options) {
    if (config.trials < 1) throw ConfigError("an experiment needs at least one trial");
    config.validate();
    agent.validate();
    const auto trials = static_cast<std::size_t>(config.trials);
    const int workers = options.workers > 0 ? options.workers : default_workers();

    // Results are keyed by (policy, trial) so aggregation does not depend on
    // completion order.
    std::vector<MetricsSeries> results(policies.size() * trials);
    std::mutex progress_mutex;
    parallel_for(results.size(), workers, [&](std::size_t job) {
        const PolicyKind kind = policies[job / trials];
        const std::size_t trial = job % trials;
        TrialOptions topt;
        topt.initial_weights = kind == PolicyKind::Dqn ? options.initial_weights : nullptr;
        topt.keep_network = kind == PolicyKind::Dqn && trial == 0 && options.first_dqn_network;
        if (options.progress) {
            topt.progress = [&, kind, trial](int frame, const MetricsSeries& m) {
                const double recent = tail_mean(m.bits, kMovingAverageWindow);
                std::lock_guard lock(progress_mutex);
                options.progress(kind, static_cast<int>(trial), frame, recent);
            };
        }
        TrialResult r = run_trial(config, agent, kind, config.seed + trial, topt);
        if (topt.keep_network && r.network) *options.first_dqn_network = std::move(*r.network);
        results[job] = std::move(r.metrics);
    });

    std::vector<PolicySummary> out;
    const auto frames = static_cast<std::size_t>(config.frames);
    for (std::size_t p = 0; p < policies.size(); ++p) {
        PolicySummary s;
        s.policy = policies[p];
        s.switching_cost = config.switching_cost;
        s.trials = config.trials;
        s.mean_moving_avg.assign(frames, 0.0);
        s.switch_fraction.assign(frames, 0.0);
        for (std::size_t i = 0; i < trials; ++i) {
            const MetricsSeries& m = results[p * trials + i];
            for (std::size_t t = 0; t < frames; ++t) {
                s.mean_moving_avg[t] += m.moving_avg[t];
                s.switch_fraction[t] += m.switched[t];
            }
        }
        for (std::size_t t = 0; t < frames; ++t) {
            s.mean_moving_avg[t] /= static_cast<double>(trials);
            s.switch_fraction[t] /= static_cast<double>(trials);
        }
        s.converged_rate = tail_mean(s.mean_moving_avg);
        s.switching_rate = tail_mean(s.switch_fraction);
        if (options.keep_trials) {
            for (std::size_t i = 0; i < trials; ++i) s.per_trial.push_back(std::move(results[p * trials + i]));
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<PolicySummary> sweep_switching_cost(const ScenarioConfig& config, const AgentConfig& agent,
                                                std::span<const double> costs,
                                                std::span<const PolicyKind> policies,
                                                const ExperimentOptions& options) {
    std::vector<PolicySummary> rows;
    for (double c : costs) {
        if (!(c >= 0.0)) throw ConfigError("switching costs must be >= 0");
        ScenarioConfig cfg = config;
        cfg.switching_cost = c;
        auto summaries = run_experiment(cfg, agent, policies, options);
        for (auto& s : summaries) rows.push_back(std::move(s));
    }
    return rows;
}

} // namespace cogmcs

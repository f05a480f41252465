#pragma once

#include "cogmcs/dqn_agent.hpp"
#include "cogmcs/envsim.hpp"
#include "cogmcs/linkmath.hpp"
#include "cogmcs/qnetwork.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cogmcs {

enum class PolicyKind { Dqn, Oracle, Snr, Ucb, Random };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::Oracle, PolicyKind::Dqn, PolicyKind::Ucb,
                                              PolicyKind::Snr};

// Throws ConfigError for an unknown name.
PolicyKind parse_policy(std::string_view name);
std::string policy_name(PolicyKind kind);

inline constexpr int kMovingAverageWindow = 200;
inline constexpr int kConvergedWindow = 5000;

// Trailing mean; the first window-1 entries average over what exists so far.
std::vector<double> moving_average(std::span<const double> series, int window = kMovingAverageWindow);

// Mean of the last `window` values (all of them if the series is shorter).
double tail_mean(std::span<const double> series, int window = kConvergedWindow);

// Per-frame record of one trial.
struct MetricsSeries {
    std::vector<double> bits;          // delivered bits (0 on failure)
    std::vector<double> reward;        // bits minus switching cost, as seen by learners
    std::vector<double> moving_avg;    // moving average of `bits`
    std::vector<std::uint8_t> switched;
    std::vector<int> action;           // 1-based MCS index
    std::vector<double> gamma0_db;
    std::vector<double> gamma_bar_db;

    std::size_t frames() const { return bits.size(); }

    // Mean of the last 5000 moving-average values.
    double converged_rate() const { return tail_mean(moving_avg); }

    // Switches among the last 5000 frames divided by 5000.
    double switching_rate() const;
};

// Decides the MCS of each frame and learns from the result.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::size_t select(const FrameObservation& obs, Rng& rng) = 0;
    virtual void feedback(const FrameOutcome& outcome, Rng& rng) = 0;
};

// DQN policy: wraps the agent with the frame history and experience assembly.
class DqnPolicy final : public Policy {
public:
    DqnPolicy(const ScenarioConfig& scenario, const AgentConfig& agent, const McsTable& table,
              std::uint64_t seed);

    std::size_t select(const FrameObservation& obs, Rng& rng) override;
    void feedback(const FrameOutcome& outcome, Rng& rng) override;

    DqnAgent& agent() { return agent_; }
    const DqnAgent& agent() const { return agent_; }
    const std::vector<double>& last_state() const { return state_; }

private:
    DqnAgent agent_;
    StateEncoding encoding_;
    std::vector<std::optional<FrameOutcome>> history_;  // oldest first
    std::vector<double> state_;
    std::size_t action_ = 0;
    double reward_ = 0.0;
    bool have_prev_ = false;
};

std::unique_ptr<Policy> make_policy(PolicyKind kind, const ScenarioConfig& scenario,
                                    const AgentConfig& agent, const McsTable& table,
                                    std::uint64_t seed);

struct TrialOptions {
    const QNetwork* initial_weights = nullptr;  // DQN only
    bool keep_network = false;                  // return the trained DQN network
    // Called every `progress_every` frames with the frame number.
    std::function<void(int frame, const MetricsSeries&)> progress;
    int progress_every = 1000;
};

struct TrialResult {
    MetricsSeries metrics;
    std::optional<QNetwork> network;
};

// Runs config.frames frames: advance fading and activity, let the policy
// choose (the oracle sees the true bit-average SINR), transmit, feed back.
TrialResult run_trial(const ScenarioConfig& config, const AgentConfig& agent, PolicyKind policy,
                      std::uint64_t seed, const TrialOptions& options = {});

struct PolicySummary {
    PolicyKind policy = PolicyKind::Oracle;
    double switching_cost = 0.0;
    int trials = 0;
    std::vector<double> mean_moving_avg;   // pointwise mean across trials
    std::vector<double> switch_fraction;   // share of trials that switched, per frame
    double converged_rate = 0.0;           // tail_mean(mean_moving_avg)
    double switching_rate = 0.0;           // tail_mean(switch_fraction)
    std::vector<MetricsSeries> per_trial;  // empty unless requested
};

struct ExperimentOptions {
    int workers = 0;            // 0: COGMCS_WORKERS or hardware concurrency
    bool keep_trials = false;
    const QNetwork* initial_weights = nullptr;
    // Receives the trained network of the first DQN trial when set.
    QNetwork* first_dqn_network = nullptr;
    // Called from worker threads (serialised) every 1000 frames of each trial.
    std::function<void(PolicyKind, int trial, int frame, double moving_avg)> progress;
};

// Worker count from COGMCS_WORKERS, falling back to the hardware concurrency.
int default_workers();

// Runs trials i = 0..trials-1 with seed config.seed + i for every policy.
// Throws ConfigError when config.trials < 1.
std::vector<PolicySummary> run_experiment(const ScenarioConfig& config, const AgentConfig& agent,
                                          std::span<const PolicyKind> policies,
                                          const ExperimentOptions& options = {});

// run_experiment for each switching cost; rows ordered by cost, then policy.
std::vector<PolicySummary> sweep_switching_cost(const ScenarioConfig& config, const AgentConfig& agent,
                                                std::span<const double> costs,
                                                std::span<const PolicyKind> policies,
                                                const ExperimentOptions& options = {});

// Calls task(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

} // namespace cogmcs

#pragma once

#include "cogmcs/envsim.hpp"
#include "cogmcs/qnetwork.hpp"
#include "cogmcs/rng.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cogmcs {

struct AgentConfig {
    int phi = 1;                   // history length in frames
    int batch_size = 32;           // Z
    int memory_capacity = 500;     // N_E
    int sync_period = 100;         // L, frames between target syncs
    int warmup_frames = 32;        // frames of uniformly random action
    double discount = 0.5;         // eta
    double learning_rate = 0.01;
    double rms_decay = 0.9;
    double rms_epsilon = 1e-8;
    double epsilon_start = 0.3;
    double epsilon_min = 0.005;
    double epsilon_decay = 1e-4;   // lambda_eps
    std::vector<int> hidden = {100, 100};

    int state_size() const { return 4 * phi + 1; }
    std::vector<int> layer_sizes(std::size_t num_actions) const;

    // Throws ConfigError when any field is out of range.
    void validate() const;
};

// Maps raw frame quantities onto the network input scale.
//   action  -> position / (M - 1)
//   reward  -> reward / (r_max N)
//   SNR     -> max(dB, -40) / 40
// Frames before the first real one are padded with action 0, reward 0 and
// -1 for both SNR entries.
struct StateEncoding {
    std::size_t num_actions = 4;
    double max_frame_bits = 6000.0;

    static constexpr double kSnrFloorDb = -40.0;
    static constexpr double kSnrScaleDb = 40.0;
    static constexpr double kPadSnr = -1.0;

    double action(std::size_t position) const;
    double reward(double bits) const { return bits / max_frame_bits; }
    static double snr(double linear);
};

// Builds s(t) = [a, r, gamma0, gamma_bar] for each of the last `phi` frames
// (oldest first, nullopt for padding) followed by gamma0(t).
// Throws ShapeError unless history.size() == phi.
std::vector<double> build_state(std::span<const std::optional<FrameOutcome>> history, int phi,
                                double gamma0_now, const StateEncoding& enc);

// FIFO replay memory with fixed capacity.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void push(Experience e);

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return slots_.size(); }

    // i = 0 is the oldest stored experience.
    const Experience& at(std::size_t i) const;

    // `count` distinct positions drawn uniformly. Requires count <= size().
    std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

private:
    std::vector<Experience> slots_;
    std::size_t head_ = 0;  // next slot to write
    std::size_t size_ = 0;
};

// eps(t+1) = max(eps_min, (1 - lambda) eps(t))
struct EpsilonSchedule {
    double eps = 0.3;
    double eps_min = 0.005;
    double decay = 1e-4;

    void step() { eps = std::max(eps_min, (1.0 - decay) * eps); }
};

// Greedy choice with ties broken toward the lowest index.
std::size_t argmax_lowest(std::span<const double> values);

// DQN with experience replay and a periodically synchronised target network.
// The caller drives one frame at a time:
//   select_action -> (environment) -> observe -> learn
class DqnAgent {
public:
    DqnAgent(AgentConfig config, std::size_t num_actions, std::uint64_t seed);

    // Starts a new frame and returns its action: uniform during warmup,
    // otherwise epsilon-greedy on the trained network. Epsilon decays once
    // per call.
    std::size_t select_action(std::span<const double> state, Rng& rng);

    void observe(Experience e) { memory_.push(std::move(e)); }

    // One mini-batch update if the memory holds at least Z experiences, then
    // a target sync when the frame counter is a multiple of L. Returns the
    // pre-update loss, or nullopt when no update was made.
    std::optional<double> learn(Rng& rng);

    // Replaces both networks (e.g. with loaded weights) and resets the optimiser.
    void set_network(QNetwork net);

    const AgentConfig& config() const { return config_; }
    const QNetwork& network() const { return online_; }
    const QNetwork& target_network() const { return target_; }
    const ReplayMemory& memory() const { return memory_; }
    double epsilon() const { return schedule_.eps; }
    long frame() const { return frame_; }
    std::size_t num_actions() const { return num_actions_; }

private:
    AgentConfig config_;
    std::size_t num_actions_;
    QNetwork online_;
    QNetwork target_;
    RmsProp optimizer_;
    ReplayMemory memory_;
    EpsilonSchedule schedule_;
    long frame_ = 0;
    std::vector<Experience> batch_;
};

} // namespace cogmcs

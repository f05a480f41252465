#include "cogmcs/dqn_agent.hpp"

#include "cogmcs/errors.hpp"
#include "cogmcs/linkmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cogmcs {

std::vector<int> AgentConfig::layer_sizes(std::size_t num_actions) const {
    std::vector<int> sizes{state_size()};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(static_cast<int>(num_actions));
    return sizes;
}

void AgentConfig::validate() const {
    if (phi < 1) throw ConfigError("phi must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (memory_capacity < batch_size) throw ConfigError("memory_capacity must be >= batch_size");
    if (sync_period < 1) throw ConfigError("sync_period must be >= 1");
    if (warmup_frames < 0) throw ConfigError("warmup_frames must be >= 0");
    if (!(discount >= 0.0 && discount <= 1.0)) throw ConfigError("discount must lie in [0, 1]");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(rms_decay >= 0.0 && rms_decay < 1.0)) throw ConfigError("rms_decay must lie in [0, 1)");
    if (!(epsilon_min >= 0.0 && epsilon_min <= epsilon_start && epsilon_start <= 1.0)) {
        throw ConfigError("need 0 <= epsilon_min <= epsilon_start <= 1");
    }
    if (!(epsilon_decay >= 0.0 && epsilon_decay <= 1.0)) throw ConfigError("epsilon_decay must lie in [0, 1]");
    for (int h : hidden) {
        if (h < 1) throw ConfigError("hidden layer widths must be positive");
    }
}

double StateEncoding::action(std::size_t position) const {
    if (num_actions < 2) return 0.0;
    return static_cast<double>(position) / static_cast<double>(num_actions - 1);
}

double StateEncoding::snr(double linear) {
    const double db = linear > 0.0 ? linear_to_db(linear) : kSnrFloorDb;
    return std::max(db, kSnrFloorDb) / kSnrScaleDb;
}

std::vector<double> build_state(std::span<const std::optional<FrameOutcome>> history, int phi,
                                double gamma0_now, const StateEncoding& enc) {
    if (phi < 1 || history.size() != static_cast<std::size_t>(phi)) {
        throw ShapeError("state history must hold exactly phi = " + std::to_string(phi) + " frames");
    }
    std::vector<double> s;
    s.reserve(4 * history.size() + 1);
    for (const auto& frame : history) {
        if (frame) {
            s.push_back(enc.action(frame->action));
            s.push_back(enc.reward(frame->reward));
            s.push_back(StateEncoding::snr(frame->gamma0));
            s.push_back(StateEncoding::snr(frame->gamma_bar));
        } else {
            s.insert(s.end(), {0.0, 0.0, StateEncoding::kPadSnr, StateEncoding::kPadSnr});
        }
    }
    s.push_back(StateEncoding::snr(gamma0_now));
    return s;
}

ReplayMemory::ReplayMemory(std::size_t capacity) : slots_(capacity) {
    if (capacity == 0) throw ConfigError("replay memory capacity must be positive");
}

void ReplayMemory::push(Experience e) {
    slots_[head_] = std::move(e);
    head_ = (head_ + 1) % slots_.size();
    size_ = std::min(size_ + 1, slots_.size());
}

const Experience& ReplayMemory::at(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("replay memory index out of range");
    const std::size_t oldest = (head_ + slots_.size() - size_) % slots_.size();
    return slots_[(oldest + i) % slots_.size()];
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t count, Rng& rng) const {
    if (count > size_) throw std::invalid_argument("cannot sample more experiences than stored");
    std::vector<std::size_t> idx(size_);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates shuffle.
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t j = k + rng.uniform_index(size_ - k);
        std::swap(idx[k], idx[j]);
    }
    idx.resize(count);
    return idx;
}

std::size_t argmax_lowest(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

DqnAgent::DqnAgent(AgentConfig config, std::size_t num_actions, std::uint64_t seed)
    : config_(std::move(config)),
      num_actions_(num_actions),
      memory_(static_cast<std::size_t>(std::max(config_.memory_capacity, 1))),
      schedule_{config_.epsilon_start, config_.epsilon_min, config_.epsilon_decay} {
    config_.validate();
    if (num_actions_ == 0) throw ConfigError("agent needs at least one action");
    online_ = QNetwork(config_.layer_sizes(num_actions_), seed);
    target_ = online_;
    optimizer_ = RmsProp(online_, config_.learning_rate, config_.rms_decay, config_.rms_epsilon);
}

std::size_t DqnAgent::select_action(std::span<const double> state, Rng& rng) {
    ++frame_;
    std::size_t action = 0;
    if (frame_ <= config_.warmup_frames || rng.uniform() < schedule_.eps) {
        action = rng.uniform_index(num_actions_);
    } else {
        const auto q = online_.forward(state);
        action = argmax_lowest(q);
    }
    schedule_.step();
    return action;
}

std::optional<double> DqnAgent::learn(Rng& rng) {
    std::optional<double> loss;
    const auto z = static_cast<std::size_t>(config_.batch_size);
    if (memory_.size() >= z) {
        batch_.clear();
        for (std::size_t i : memory_.sample_indices(z, rng)) batch_.push_back(memory_.at(i));
        loss = train_batch(online_, target_, batch_, config_.discount, optimizer_);
    }
    if (frame_ > 0 && frame_ % config_.sync_period == 0) sync_target(online_, target_);
    return loss;
}

void DqnAgent::set_network(QNetwork net) {
    if (net.layer_sizes() != config_.layer_sizes(num_actions_)) {
        throw ShapeError("network does not match the agent configuration");
    }
    online_ = std::move(net);
    target_ = online_;
    optimizer_ = RmsProp(online_, config_.learning_rate, config_.rms_decay, config_.rms_epsilon);
}

} // namespace cogmcs

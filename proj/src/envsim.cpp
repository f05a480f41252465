#include "cogmcs/envsim.hpp"

#include "cogmcs/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace cogmcs {

FadingProcess initial_fading(double rho, Rng& rng) {
    return {rng.complex_normal(1.0), rho};
}

FadingProcess fading_step(const FadingProcess& fp, Rng& rng) {
    const double innovation_var = 1.0 - fp.rho * fp.rho;
    // Always draw so the stream position does not depend on rho.
    const std::complex<double> delta = rng.complex_normal(innovation_var);
    return {fp.rho * fp.h + delta, fp.rho};
}

void ScenarioConfig::validate() const {
    if (avg_inr_db.size() != miss_prob.size()) {
        throw ConfigError("avg_inr_db and miss_prob must have the same length");
    }
    for (double a : miss_prob) {
        if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("miss_prob entries must lie in [0, 1]");
    }
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
    if (symbols_per_frame < 1) throw ConfigError("symbols_per_frame must be >= 1");
    if (!(sensing_fraction >= 0.0 && sensing_fraction <= 1.0)) {
        throw ConfigError("sensing_fraction must lie in [0, 1]");
    }
    if (!(switching_cost >= 0.0)) throw ConfigError("switching_cost must be >= 0");
    if (frames < 1) throw ConfigError("frames must be >= 1");
    if (trials < 1) throw ConfigError("trials must be >= 1");
}

ActiveSet sample_active_set(const ScenarioConfig& config, Rng& rng) {
    ActiveSet active;
    for (std::size_t k = 0; k < config.miss_prob.size(); ++k) {
        if (rng.bernoulli(config.miss_prob[k])) active.push_back(k);
    }
    return active;
}

Gammas compute_gammas(std::complex<double> h_primary,
                      std::span<const std::complex<double>> h_secondary,
                      const ActiveSet& active,
                      const ScenarioConfig& config) {
    Gammas g;
    g.gamma0 = db_to_linear(config.avg_snr_db) * std::norm(h_primary);
    double interference = 0.0;
    for (std::size_t k : active) {
        interference += db_to_linear(config.avg_inr_db.at(k)) * std::norm(h_secondary[k]);
    }
    g.gamma1 = g.gamma0 / (1.0 + interference);
    const double w0 = config.sensing_fraction;
    g.gamma_bar = w0 * g.gamma0 + (1.0 - w0) * g.gamma1;
    return g;
}

double switching_reward(double frame_bits, bool success, bool switched, double cost) {
    const double base = success ? frame_bits : 0.0;
    return switched ? base - cost : base;
}

Environment::Environment(ScenarioConfig config, McsTable table, std::uint64_t trial_seed)
    : config_(std::move(config)),
      table_(std::move(table)),
      fading_rng_(trial_seed, Stream::Fading),
      activity_rng_(trial_seed, Stream::Activity),
      packet_rng_(trial_seed, Stream::Packet) {
    config_.validate();
    if (table_.empty()) throw ConfigError("MCS table must not be empty");
    primary_ = initial_fading(config_.rho, fading_rng_);
    for (std::size_t k = 0; k < config_.secondary_count(); ++k) {
        secondary_.push_back(initial_fading(config_.rho, fading_rng_));
    }
    secondary_h_.resize(secondary_.size());
}

const FrameObservation& Environment::advance() {
    primary_ = fading_step(primary_, fading_rng_);
    for (std::size_t k = 0; k < secondary_.size(); ++k) {
        secondary_[k] = fading_step(secondary_[k], fading_rng_);
        secondary_h_[k] = secondary_[k].h;
    }
    obs_.frame += 1;
    obs_.active = sample_active_set(config_, activity_rng_);
    obs_.gammas = compute_gammas(primary_.h, secondary_h_, obs_.active, config_);
    transmitted_ = false;
    return obs_;
}

FrameOutcome Environment::transmit(std::size_t action, std::size_t prev_action) {
    if (action >= table_.size()) {
        throw std::domain_error("MCS index " + std::to_string(action) + " outside the table");
    }
    if (transmitted_) throw std::logic_error("transmit() called twice without advance()");
    transmitted_ = true;

    const McsSpec& mcs = table_[action];
    const int n = config_.symbols_per_frame;
    const double packet_error = per(mcs, obs_.gammas.gamma_bar, n);
    const double frame_bits = static_cast<double>(mcs.bits_per_symbol) * n;

    FrameOutcome out;
    out.frame = obs_.frame;
    out.gamma0 = obs_.gammas.gamma0;
    out.gamma_bar = obs_.gammas.gamma_bar;
    out.active_set = obs_.active;
    out.action = action;
    out.success = packet_rng_.uniform() < 1.0 - packet_error;
    out.switched = action != prev_action;
    out.bits = out.success ? frame_bits : 0.0;
    out.reward = switching_reward(frame_bits, out.success, out.switched, config_.switching_cost);
    return out;
}

} // namespace cogmcs

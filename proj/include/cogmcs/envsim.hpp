#pragma once

#include "cogmcs/linkmath.hpp"
#include "cogmcs/rng.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cogmcs {

// First-order Gauss-Markov block fading: h(t) = rho h(t-1) + delta,
// delta ~ CN(0, 1 - rho^2), h(0) ~ CN(0, 1).
struct FadingProcess {
    std::complex<double> h{};
    double rho = 0.0;

    double power() const { return std::norm(h); }
};

FadingProcess initial_fading(double rho, Rng& rng);
FadingProcess fading_step(const FadingProcess& fp, Rng& rng);

struct ScenarioConfig {
    double avg_snr_db = 20.0;              // primary average received SNR
    std::vector<double> avg_inr_db;        // one average INR per secondary transmitter
    std::vector<double> miss_prob;         // per-frame activity probability per ST
    double rho = 0.99;
    int symbols_per_frame = 1000;
    double sensing_fraction = 0.1;
    double switching_cost = 0.0;           // in delivered-bit units
    int frames = 20000;
    int trials = 20;
    std::uint64_t seed = 1;

    std::size_t secondary_count() const { return avg_inr_db.size(); }
    LinkParams link() const { return {symbols_per_frame, sensing_fraction}; }

    // Throws ConfigError when any field is out of range.
    void validate() const;
};

// 0-based indices of secondary transmitters active in a frame.
using ActiveSet = std::vector<std::size_t>;

ActiveSet sample_active_set(const ScenarioConfig& config, Rng& rng);

struct Gammas {
    double gamma0 = 0.0;     // interference-free SNR
    double gamma1 = 0.0;     // SINR while the active set transmits
    double gamma_bar = 0.0;  // bit-average SINR
};

Gammas compute_gammas(std::complex<double> h_primary,
                      std::span<const std::complex<double>> h_secondary,
                      const ActiveSet& active,
                      const ScenarioConfig& config);

// Reward of one frame with switching cost c:
//   success, same MCS -> bits;  success, switched -> bits - c;
//   failure, same MCS -> 0;     failure, switched -> -c.
double switching_reward(double frame_bits, bool success, bool switched, double cost);

// What the base station (or a genie) knows at the start of a frame.
struct FrameObservation {
    int frame = 0;  // 1-based
    Gammas gammas;
    ActiveSet active;
};

struct FrameOutcome {
    int frame = 0;
    double gamma0 = 0.0;
    double gamma_bar = 0.0;
    ActiveSet active_set;
    std::size_t action = 0;    // position in the MCS table
    bool success = false;
    double bits = 0.0;         // delivered bits: r_m N on success, else 0
    double reward = 0.0;       // bits minus the switching cost, if charged
    bool switched = false;
};

// One trial's stochastic environment. Fading, activity and packet draws use
// separate streams derived from the trial seed.
class Environment {
public:
    Environment(ScenarioConfig config, McsTable table, std::uint64_t trial_seed);

    // Starts the next frame: evolves every fading process, draws the active
    // set and computes the SNR/SINR values.
    const FrameObservation& advance();

    // Transmits the current frame with `action`. Throws std::domain_error for
    // an index outside the MCS table.
    FrameOutcome transmit(std::size_t action, std::size_t prev_action);

    const FrameObservation& current() const { return obs_; }
    const ScenarioConfig& config() const { return config_; }
    const McsTable& table() const { return table_; }

    std::complex<double> primary_gain() const { return primary_.h; }
    std::span<const std::complex<double>> secondary_gains() const { return secondary_h_; }

private:
    ScenarioConfig config_;
    McsTable table_;
    Rng fading_rng_;
    Rng activity_rng_;
    Rng packet_rng_;
    FadingProcess primary_;
    std::vector<FadingProcess> secondary_;
    std::vector<std::complex<double>> secondary_h_;
    FrameObservation obs_;
    bool transmitted_ = true;
};

} // namespace cogmcs

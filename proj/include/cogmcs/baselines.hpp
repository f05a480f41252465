#pragma once

#include "cogmcs/linkmath.hpp"
#include "cogmcs/rng.hpp"

#include <cstddef>
#include <vector>

namespace cogmcs {

// Genie-aided upper bound: knows the frame's true bit-average SINR.
std::size_t oracle_select(double gamma_bar_true, int n, const McsTable& table);

// Treats the interference-free SNR as if it were the bit-average SINR.
std::size_t snr_select(double gamma0, int n, const McsTable& table);

std::size_t random_select(std::size_t num_actions, Rng& rng);

// UCB1 over the MCS levels. Rewards are in bits.
struct UcbState {
    std::vector<double> means;       // mu_m
    std::vector<long> counts;        // Gamma_m
    long frame = 1;                  // t of the next selection

    explicit UcbState(std::size_t arms = 0) : means(arms, 0.0), counts(arms, 0) {}

    long selections() const { return frame - 1; }
};

// Plays the lowest-index unplayed arm first; afterwards
// argmax_m mu_m + sqrt(2 ln t / Gamma_m), ties to the lowest index.
std::size_t ucb_select(const UcbState& u);

// Gamma_m += 1; mu_m += (r - mu_m) / Gamma_m; t += 1.
void ucb_update(UcbState& u, std::size_t arm, double reward);

} // namespace cogmcs

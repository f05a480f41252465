#include "cogmcs/baselines.hpp"

#include "cogmcs/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace cogmcs {

std::size_t oracle_select(double gamma_bar_true, int n, const McsTable& table) {
    return optimal_mcs(gamma_bar_true, n, table);
}

std::size_t snr_select(double gamma0, int n, const McsTable& table) {
    return optimal_mcs(gamma0, n, table);
}

std::size_t random_select(std::size_t num_actions, Rng& rng) {
    if (num_actions == 0) throw ConfigError("no actions to choose from");
    return rng.uniform_index(num_actions);
}

std::size_t ucb_select(const UcbState& u) {
    if (u.means.empty()) throw ConfigError("UCB needs at least one arm");
    for (std::size_t m = 0; m < u.counts.size(); ++m) {
        if (u.counts[m] == 0) return m;
    }
    const double log_t = std::log(static_cast<double>(u.frame));
    std::size_t best = 0;
    double best_index = -INFINITY;
    for (std::size_t m = 0; m < u.means.size(); ++m) {
        const double index = u.means[m] + std::sqrt(2.0 * log_t / static_cast<double>(u.counts[m]));
        if (index > best_index) {
            best = m;
            best_index = index;
        }
    }
    return best;
}

void ucb_update(UcbState& u, std::size_t arm, double reward) {
    if (arm >= u.means.size()) throw std::domain_error("UCB arm out of range");
    u.counts[arm] += 1;
    u.means[arm] += (reward - u.means[arm]) / static_cast<double>(u.counts[arm]);
    u.frame += 1;
}

} // namespace cogmcs

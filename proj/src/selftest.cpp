#include "cogmcs/selftest.hpp"

#include "cogmcs/envsim.hpp"
#include "cogmcs/experiment.hpp"
#include "cogmcs/linkmath.hpp"
#include "cogmcs/qnetwork.hpp"
#include "cogmcs/rng.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace cogmcs {

namespace {

SelftestResult check_gradients() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed, Stream::Policy);
        const std::vector<int> sizes{3 + static_cast<int>(seed % 3), 6, 5, 3};
        QNetwork net(sizes, seed);
        const QNetwork target(sizes, seed + 1000);
        // Nonzero biases keep pre-activations off the ReLU kink at exactly 0,
        // where the central difference sees half the slope.
        for (auto& layer : net.layers()) {
            for (double& b : layer.bias) b = rng.uniform(-0.1, 0.1);
        }
        std::vector<Experience> batch(4);
        for (auto& e : batch) {
            for (int i = 0; i < sizes.front(); ++i) {
                e.state.push_back(rng.uniform(-1.0, 1.0));
                e.next_state.push_back(rng.uniform(-1.0, 1.0));
            }
            e.action = rng.uniform_index(3);
            e.reward = rng.uniform();
        }
        worst = std::max(worst, gradient_check(net, target, batch, 0.5));
    }
    std::ostringstream d;
    d << "max relative error " << worst << " over 100 networks";
    return {"gradient check", worst < 1e-4, d.str()};
}

// Symbol-by-symbol simulation with independent errors; a packet fails on its
// first symbol error.
SelftestResult check_packet_errors() {
    const McsTable table = default_mcs_table();
    const int n = 100;
    const int packets = 100000;
    // Three SINRs per MCS, chosen so the packet error rate is neither ~0 nor ~1.
    const double grid[4][3] = {{3.0, 4.0, 5.0}, {6.0, 8.0, 10.0}, {30.0, 40.0, 50.0}, {120.0, 160.0, 200.0}};
    Rng rng(7, Stream::Packet);
    double worst_sigmas = 0.0;
    for (std::size_t m = 0; m < table.size() && m < 4; ++m) {
        for (double g : grid[m]) {
            const double s = ser(table[m], g);
            const double p = per(table[m], g, n);
            long failures = 0;
            for (int k = 0; k < packets; ++k) {
                for (int sym = 0; sym < n; ++sym) {
                    if (rng.uniform() < s) {
                        ++failures;
                        break;
                    }
                }
            }
            const double sd = std::sqrt(std::max(p * (1.0 - p), 1e-12) / packets);
            worst_sigmas = std::max(worst_sigmas, std::abs(static_cast<double>(failures) / packets - p) / sd);
        }
    }
    std::ostringstream d;
    d << "worst deviation " << worst_sigmas << " sigma over 12 points, 1e5 packets each";
    return {"packet error Monte Carlo", worst_sigmas <= 3.0, d.str()};
}

SelftestResult check_fading() {
    const int steps = 100000;
    bool ok = true;
    std::ostringstream d;
    for (double rho : {0.0, 0.5, 0.9}) {
        Rng rng(11, Stream::Fading);
        FadingProcess fp = initial_fading(rho, rng);
        double power = 0.0;
        std::complex<double> lag{};
        for (int t = 0; t < steps; ++t) {
            const FadingProcess next = fading_step(fp, rng);
            power += next.power();
            lag += next.h * std::conj(fp.h);
            fp = next;
        }
        power /= steps;
        const double corr = lag.real() / steps / power;
        ok = ok && std::abs(power - 1.0) <= 0.02 && std::abs(corr - rho) <= 0.02;
        d << "rho " << rho << ": E|h|^2 " << power << ", lag-1 " << corr << "; ";
    }
    return {"fading statistics", ok, d.str()};
}

SelftestResult check_reward_table() {
    const bool ok = switching_reward(2000, true, false, 3) == 2000 &&
                    switching_reward(2000, true, true, 3) == 1997 &&
                    switching_reward(2000, false, false, 3) == 0 &&
                    switching_reward(2000, false, true, 3) == -3;
    return {"switching-cost reward table", ok, "four cases"};
}

SelftestResult check_determinism() {
    ScenarioConfig cfg;
    cfg.avg_inr_db = {5.0, 5.0};
    cfg.miss_prob = {1.0, 0.5};
    cfg.frames = 300;
    AgentConfig agent;
    agent.hidden = {16, 16};
    const auto a = run_trial(cfg, agent, PolicyKind::Dqn, 42).metrics;
    const auto b = run_trial(cfg, agent, PolicyKind::Dqn, 42).metrics;
    const bool same = a.bits == b.bits && a.action == b.action && a.gamma_bar_db == b.gamma_bar_db;
    return {"trial determinism", same, "two 300-frame DQN trials, same seed"};
}

} // namespace

std::vector<SelftestResult> run_selftests() {
    return {check_gradients(), check_packet_errors(), check_fading(), check_reward_table(),
            check_determinism()};
}

} // namespace cogmcs

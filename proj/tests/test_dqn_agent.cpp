#include "cogmcs/dqn_agent.hpp"
#include "cogmcs/errors.hpp"
#include "cogmcs/linkmath.hpp"

#include <doctest.h>

#include <cmath>
#include <optional>
#include <set>
#include <vector>

using namespace cogmcs;

namespace {

const StateEncoding kEnc{4, 6000.0};

FrameOutcome outcome(std::size_t action, double reward, double g0_db, double gbar_db) {
    FrameOutcome f;
    f.action = action;
    f.reward = reward;
    f.bits = std::max(reward, 0.0);
    f.gamma0 = db_to_linear(g0_db);
    f.gamma_bar = db_to_linear(gbar_db);
    return f;
}

Experience tagged(double tag) { return {{tag}, 0, tag, {tag}}; }

AgentConfig small_agent() {
    AgentConfig a;
    a.hidden = {8, 8};
    return a;
}

} // namespace

TEST_CASE("state example with one frame of history") {
    const std::vector<std::optional<FrameOutcome>> h{outcome(3, 6000, 20.0, 20.0)};
    const auto s = build_state(h, 1, db_to_linear(20.0), kEnc);
    REQUIRE(s.size() == 5);
    const double expected[] = {1.0, 1.0, 0.5, 0.5, 0.5};
    for (std::size_t i = 0; i < 5; ++i) CHECK(s[i] == doctest::Approx(expected[i]));
}

TEST_CASE("state padding before the first frame") {
    const std::vector<std::optional<FrameOutcome>> h(1);
    const auto s = build_state(h, 1, db_to_linear(10.0), kEnc);
    REQUIRE(s.size() == 5);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == 0.0);
    CHECK(s[2] == -1.0);
    CHECK(s[3] == -1.0);
    CHECK(s[4] == doctest::Approx(0.25));
}

TEST_CASE("state length and ordering with longer history") {
    std::vector<std::optional<FrameOutcome>> h(10);
    h[8] = outcome(1, 2000, 10.0, 0.0);
    h[9] = outcome(2, -500, 30.0, 20.0);
    const auto s = build_state(h, 10, 1.0, kEnc);
    CHECK(s.size() == 41);
    for (std::size_t i = 0; i < 32; i += 4) CHECK(s[i + 2] == -1.0);
    CHECK(s[32] == doctest::Approx(1.0 / 3.0));
    CHECK(s[33] == doctest::Approx(2000.0 / 6000.0));
    CHECK(s[34] == doctest::Approx(0.25));
    CHECK(s[35] == doctest::Approx(0.0));
    CHECK(s[36] == doctest::Approx(2.0 / 3.0));
    CHECK(s[37] == doctest::Approx(-500.0 / 6000.0));
    CHECK(s[40] == 0.0);
    CHECK_THROWS_AS(build_state(h, 9, 1.0, kEnc), ShapeError);
}

TEST_CASE("SNR encoding floor") {
    CHECK(StateEncoding::snr(0.0) == -1.0);
    CHECK(StateEncoding::snr(1e-9) == -1.0);
    CHECK(StateEncoding::snr(1.0) == 0.0);
    CHECK(StateEncoding::snr(1e4) == doctest::Approx(1.0));
}

TEST_CASE("epsilon schedule examples") {
    EpsilonSchedule e{0.3, 0.005, 1e-4};
    e.step();
    CHECK(e.eps == doctest::Approx(0.29997).epsilon(1e-12));

    EpsilonSchedule floor{0.005, 0.005, 1e-4};
    floor.step();
    CHECK(floor.eps == 0.005);

    EpsilonSchedule long_run{0.3, 0.005, 1e-4};
    double prev = long_run.eps;
    for (int i = 0; i < 1000000; ++i) {
        long_run.step();
        REQUIRE(long_run.eps <= prev);
        REQUIRE(long_run.eps >= 0.005);
        prev = long_run.eps;
    }
    CHECK(long_run.eps == 0.005);
}

TEST_CASE("replay memory is FIFO with bounded size") {
    ReplayMemory m(500);
    for (int i = 0; i < 501; ++i) m.push(tagged(i));
    CHECK(m.size() == 500);
    CHECK(m.capacity() == 500);
    CHECK(m.at(0).reward == 1.0);
    CHECK(m.at(499).reward == 500.0);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(m.at(i).reward == static_cast<double>(i + 1));
    CHECK_THROWS_AS(m.at(500), std::out_of_range);
    CHECK_THROWS_AS(ReplayMemory(0), ConfigError);
}

TEST_CASE("replay sampling") {
    Rng rng(1);
    ReplayMemory one(10);
    one.push(tagged(7));
    const auto s1 = one.sample_indices(1, rng);
    REQUIRE(s1.size() == 1);
    CHECK(one.at(s1[0]).reward == 7.0);
    CHECK_THROWS(one.sample_indices(2, rng));

    ReplayMemory m(500);
    for (int i = 0; i < 500; ++i) m.push(tagged(i));
    std::vector<int> hits(500, 0);
    for (int draw = 0; draw < 2000; ++draw) {
        const auto idx = m.sample_indices(32, rng);
        CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 32);
        for (std::size_t i : idx) {
            REQUIRE(i < 500);
            ++hits[i];
        }
    }
    // 2000 * 32 / 500 = 128 expected hits per slot.
    for (int h : hits) CHECK(std::abs(h - 128) < 6 * std::sqrt(128.0));
}

TEST_CASE("argmax ties and shift invariance") {
    CHECK(argmax_lowest(std::vector<double>{1.0, 3.0, 3.0, 2.0}) == 1);
    CHECK(argmax_lowest(std::vector<double>{0.0, 0.0, 0.0, 0.0}) == 0);
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> q(4);
        for (double& v : q) v = std::round(rng.uniform(-3.0, 3.0) * 2.0) / 2.0;
        std::vector<double> shifted = q;
        for (double& v : shifted) v += 7.0;
        CHECK(argmax_lowest(q) == argmax_lowest(shifted));
    }
}

TEST_CASE("greedy choice with epsilon 0 follows the network") {
    AgentConfig a = small_agent();
    a.warmup_frames = 0;
    a.epsilon_start = 0.0;
    a.epsilon_min = 0.0;
    DqnAgent agent(a, 4, 3);
    Rng rng(4);
    const std::vector<double> s{0.1, 0.2, 0.3, 0.4, 0.5};
    const std::size_t expected = argmax_lowest(agent.network().forward(s));
    for (int i = 0; i < 50; ++i) CHECK(agent.select_action(s, rng) == expected);
}

TEST_CASE("epsilon 1 explores uniformly") {
    AgentConfig a = small_agent();
    a.warmup_frames = 0;
    a.epsilon_start = 1.0;
    a.epsilon_min = 1.0;
    DqnAgent agent(a, 4, 3);
    Rng rng(5);
    const std::vector<double> s(5, 0.2);
    const int n = 100000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < n; ++i) ++counts[agent.select_action(s, rng)];
    const double sd = std::sqrt(n * 0.25 * 0.75);
    for (int c : counts) CHECK(std::abs(c - n / 4) <= 3.0 * sd);
}

TEST_CASE("warmup frames are uniform regardless of epsilon") {
    AgentConfig a = small_agent();
    a.epsilon_start = 0.0;
    a.epsilon_min = 0.0;
    a.warmup_frames = 32;
    std::vector<int> counts(4, 0);
    const std::vector<double> s(5, 0.2);
    // 32 warmup frames from each of 1000 fresh agents.
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        DqnAgent agent(a, 4, 1);
        Rng rng(seed, Stream::Policy);
        for (int t = 0; t < 32; ++t) ++counts[agent.select_action(s, rng)];
    }
    const int n = 32000;
    const double sd = std::sqrt(n * 0.25 * 0.75);
    for (int c : counts) CHECK(std::abs(c - n / 4) <= 3.0 * sd);
}

TEST_CASE("epsilon decays once per frame from the first frame") {
    DqnAgent agent(small_agent(), 4, 1);
    Rng rng(1);
    const std::vector<double> s(5, 0.0);
    agent.select_action(s, rng);
    CHECK(agent.epsilon() == doctest::Approx(0.29997).epsilon(1e-12));
    CHECK(agent.frame() == 1);
}

TEST_CASE("learn is a no-op until Z experiences and syncs every L frames") {
    AgentConfig a = small_agent();
    a.sync_period = 100;
    DqnAgent agent(a, 4, 9);
    Rng rng(3);
    const std::vector<double> x{0.3, -0.2, 0.1, 0.7, -0.4};
    for (int t = 1; t <= 250; ++t) {
        std::vector<double> s(5);
        for (double& v : s) v = rng.uniform(-1.0, 1.0);
        const std::size_t act = agent.select_action(s, rng);
        agent.observe({s, act, rng.uniform(), s});
        const auto loss = agent.learn(rng);
        if (t < 32) {
            CHECK_FALSE(loss.has_value());
        } else {
            CHECK(loss.has_value());
        }
        if (t % 100 == 0) {
            CHECK(agent.network().forward(x) == agent.target_network().forward(x));
        } else if (t > 32) {
            CHECK(agent.network().forward(x) != agent.target_network().forward(x));
        }
    }
    CHECK(agent.memory().size() == 250);
    CHECK(agent.network().all_finite());
}

TEST_CASE("agent actions are reproducible for a seed") {
    auto run = [](std::uint64_t seed) {
        DqnAgent agent(small_agent(), 4, seed);
        Rng rng(seed, Stream::Policy);
        std::vector<std::size_t> actions;
        for (int t = 0; t < 300; ++t) {
            const std::vector<double> s{t / 300.0, 0.5, -0.5, 0.1, 0.2};
            actions.push_back(agent.select_action(s, rng));
            agent.observe({s, actions.back(), static_cast<double>(actions.back() == 2), s});
            agent.learn(rng);
        }
        return actions;
    };
    CHECK(run(5) == run(5));
    CHECK(run(5) != run(6));
}

TEST_CASE("agent configuration validation") {
    AgentConfig a;
    CHECK(a.state_size() == 5);
    CHECK(a.layer_sizes(4) == std::vector<int>{5, 100, 100, 4});
    a.phi = 10;
    CHECK(a.state_size() == 41);
    a.phi = 0;
    CHECK_THROWS_AS(a.validate(), ConfigError);
    a.phi = 1;
    a.memory_capacity = 16;
    CHECK_THROWS_AS(a.validate(), ConfigError);
    a.memory_capacity = 500;
    a.discount = 1.5;
    CHECK_THROWS_AS(a.validate(), ConfigError);
    a.discount = 0.5;
    a.sync_period = 0;
    CHECK_THROWS_AS(a.validate(), ConfigError);
    a.sync_period = 100;
    CHECK_NOTHROW(a.validate());

    DqnAgent agent(small_agent(), 4, 1);
    CHECK_THROWS_AS(agent.set_network(QNetwork({41, 8, 8, 4}, 1)), ShapeError);
    CHECK_NOTHROW(agent.set_network(QNetwork({5, 8, 8, 4}, 2)));
}

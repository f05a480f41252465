#pragma once

#include <string>
#include <vector>

namespace cogmcs {

struct SelftestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Fast numerical invariant checks run by `cogmcs selftest`: gradient check on
// random small networks, packet-error Monte Carlo, fading statistics, reward
// table and determinism.
std::vector<SelftestResult> run_selftests();

} // namespace cogmcs

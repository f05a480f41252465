#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>

namespace cogmcs {

// Named random streams of one trial. Each stream is seeded independently from
// the trial seed so that, for instance, a policy that consumes exploration
// randomness does not shift the channel realisation seen by another policy.
enum class Stream : std::uint64_t {
    Fading = 1,
    Activity = 2,
    Packet = 3,
    Policy = 4,
    NetworkInit = 5,
};

std::uint64_t derive_seed(std::uint64_t base, Stream stream);

// Portable random source. The standard distributions are implementation
// defined, so every draw used by the simulator is derived here from the raw
// 64-bit output of mt19937_64, whose sequence is fixed by the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t base_seed, Stream stream) : engine_(derive_seed(base_seed, stream)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform();

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [0, n), n > 0, without modulo bias.
    std::size_t uniform_index(std::size_t n);

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via the Marsaglia polar method.
    double normal();

    // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace cogmcs

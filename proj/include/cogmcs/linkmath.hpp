#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cogmcs {

// One modulation level of the uncoded primary link.
struct McsSpec {
    int index = 1;              // 1-based label, ordered by bits_per_symbol
    int bits_per_symbol = 1;    // log2(constellation_size)
    int constellation_size = 2;
    std::string name;
};

using McsTable = std::vector<McsSpec>;

// BPSK, QPSK, 16QAM, 64QAM.
McsTable default_mcs_table();

// Builds a table from constellation sizes (each a power of two >= 2, strictly
// increasing). Throws ConfigError otherwise.
McsTable make_mcs_table(std::span<const int> constellation_sizes);

int max_bits_per_symbol(const McsTable& table);

// Frame geometry as seen by the rate model.
struct LinkParams {
    int symbols_per_frame = 1000;
    // Share of each frame's bits received before secondary transmitters may
    // start, i.e. the weight of the interference-free SNR in the bit average.
    double sensing_fraction = 0.1;

    double data_fraction() const { return 1.0 - sensing_fraction; }
};

// Complementary error function, accurate to ~1e-14 relative over x >= 0.
// Series for small arguments, continued fraction for the tail.
double erfc_accurate(double x);

// Gaussian tail probability P(Z > x). Throws std::domain_error on NaN/inf.
double q_function(double x);

// Symbol error rate at linear SINR gamma. Throws std::domain_error for
// gamma < 0 or NaN.
double ser(const McsSpec& mcs, double gamma);

// Packet error rate for independent symbol errors over n symbols.
double per(const McsSpec& mcs, double gamma, int n);

// Expected delivered bits per frame.
double rate(const McsSpec& mcs, double gamma, int n);

// Position in `table` of the rate-maximising MCS; ties go to the lowest
// position. Throws ConfigError for an empty table.
std::size_t optimal_mcs(double gamma, int n, const McsTable& table);

// Expected rate of every table entry at gamma.
std::vector<double> rates(double gamma, int n, const McsTable& table);

double db_to_linear(double db);
double linear_to_db(double linear);

} // namespace cogmcs

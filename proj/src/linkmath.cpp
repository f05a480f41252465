#include "cogmcs/linkmath.hpp"

#include "cogmcs/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cogmcs {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.0)) {
        throw std::domain_error("linear SINR must be non-negative, got " + std::to_string(gamma));
    }
}

void check_symbols(int n) {
    if (n < 1) throw std::domain_error("symbols per frame must be >= 1");
}

// erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (1*3*...*(2n+1)).
// All terms are positive, so there is no cancellation for moderate x.
double erf_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x2) * sum;
}

// erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// evaluated with the modified Lentz method.
double erfc_continued_fraction(double x) {
    constexpr double tiny = 1e-300;
    double f = x;
    double c = f;
    double d = 0.0;
    for (int n = 1; n < 5000; ++n) {
        const double a = 0.5 * n;
        d = x + a * d;
        if (d == 0.0) d = tiny;
        d = 1.0 / d;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x * x) / (std::sqrt(std::numbers::pi) * f);
}

} // namespace

McsTable default_mcs_table() {
    static constexpr int sizes[] = {2, 4, 16, 64};
    return make_mcs_table(sizes);
}

McsTable make_mcs_table(std::span<const int> constellation_sizes) {
    if (constellation_sizes.empty()) throw ConfigError("MCS table must not be empty");
    McsTable table;
    int prev_bits = 0;
    for (std::size_t i = 0; i < constellation_sizes.size(); ++i) {
        const int size = constellation_sizes[i];
        if (size < 2 || (size & (size - 1)) != 0) {
            throw ConfigError("constellation size must be a power of two >= 2");
        }
        const int bits = std::countr_zero(static_cast<unsigned>(size));
        if (bits <= prev_bits) throw ConfigError("MCS table must be ordered by bits per symbol");
        prev_bits = bits;
        std::string name = size == 2 ? "BPSK" : size == 4 ? "QPSK" : std::to_string(size) + "QAM";
        table.push_back({static_cast<int>(i) + 1, bits, size, std::move(name)});
    }
    return table;
}

int max_bits_per_symbol(const McsTable& table) {
    if (table.empty()) throw ConfigError("MCS table must not be empty");
    return table.back().bits_per_symbol;
}

double erfc_accurate(double x) {
    if (std::isnan(x)) return x;
    if (x < 0.0) return 2.0 - erfc_accurate(-x);
    if (x < 2.0) return 1.0 - erf_series(x);
    return erfc_continued_fraction(x);
}

double q_function(double x) {
    if (!std::isfinite(x)) throw std::domain_error("q_function argument must be finite");
    const double q = 0.5 * erfc_accurate(x / std::numbers::sqrt2);
    return std::clamp(q, 0.0, 1.0);
}

double ser(const McsSpec& mcs, double gamma) {
    check_gamma(gamma);
    if (std::isinf(gamma)) return 0.0;
    double s = 0.0;
    if (mcs.constellation_size == 2) {
        s = q_function(std::sqrt(2.0 * gamma));
    } else {
        const double m = mcs.constellation_size;
        const double arg = 3.0 * mcs.bits_per_symbol * gamma / (m - 1.0);
        s = 2.0 * (1.0 - 1.0 / std::sqrt(m)) * q_function(std::sqrt(arg));
    }
    return std::clamp(s, 0.0, 1.0);
}

double per(const McsSpec& mcs, double gamma, int n) {
    check_symbols(n);
    const double s = ser(mcs, gamma);
    if (s >= 1.0) return 1.0;
    return std::clamp(-std::expm1(n * std::log1p(-s)), 0.0, 1.0);
}

double rate(const McsSpec& mcs, double gamma, int n) {
    return mcs.bits_per_symbol * (1.0 - per(mcs, gamma, n)) * n;
}

std::vector<double> rates(double gamma, int n, const McsTable& table) {
    std::vector<double> out;
    out.reserve(table.size());
    for (const auto& mcs : table) out.push_back(rate(mcs, gamma, n));
    return out;
}

std::size_t optimal_mcs(double gamma, int n, const McsTable& table) {
    if (table.empty()) throw ConfigError("MCS table must not be empty");
    std::size_t best = 0;
    double best_rate = rate(table[0], gamma, n);
    for (std::size_t m = 1; m < table.size(); ++m) {
        const double r = rate(table[m], gamma, n);
        if (r > best_rate) {
            best = m;
            best_rate = r;
        }
    }
    return best;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

} // namespace cogmcs

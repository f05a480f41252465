#pragma once

#include "cogmcs/experiment.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace cogmcs {

// Per-trial frame log. Columns:
//   frame, reward, moving_avg, action, switched, gamma0_db, gamma_bar_db
// `reward` is the delivered bits of the frame (the transmission rate sample);
// the learning reward is reward - switching_cost * switched.
void write_trial_csv(const std::filesystem::path& path, const MetricsSeries& m);

// Trial-averaged curve. Columns: frame, moving_avg, switch_fraction.
void write_mean_csv(const std::filesystem::path& path, const PolicySummary& s);

// Columns: policy, switch_cost, trials, converged_rate, switching_rate.
void write_summary_csv(const std::filesystem::path& path, std::span<const PolicySummary> rows);

// "<policy>_c<cost>", e.g. "dqn_c500".
std::string series_stem(PolicyKind policy, double cost);

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// Reads one numeric column of a CSV with a header row. Throws FormatError.
std::vector<double> read_csv_column(const std::filesystem::path& path, const std::string& column);

} // namespace cogmcs

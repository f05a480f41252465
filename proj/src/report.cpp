#include "cogmcs/report.hpp"

#include "cogmcs/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace cogmcs {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string series_stem(PolicyKind policy, double cost) {
    return policy_name(policy) + "_c" + format_double(cost);
}

void write_trial_csv(const std::filesystem::path& path, const MetricsSeries& m) {
    std::string out = "frame,reward,moving_avg,action,switched,gamma0_db,gamma_bar_db\n";
    out.reserve(m.frames() * 64);
    for (std::size_t t = 0; t < m.frames(); ++t) {
        out += std::to_string(t + 1);
        out += ',';
        out += format_double(m.bits[t]);
        out += ',';
        out += format_double(m.moving_avg[t]);
        out += ',';
        out += std::to_string(m.action[t]);
        out += ',';
        out += m.switched[t] ? '1' : '0';
        out += ',';
        out += format_double(m.gamma0_db[t]);
        out += ',';
        out += format_double(m.gamma_bar_db[t]);
        out += '\n';
    }
    write_file(path, out);
}

void write_mean_csv(const std::filesystem::path& path, const PolicySummary& s) {
    std::string out = "frame,moving_avg,switch_fraction\n";
    for (std::size_t t = 0; t < s.mean_moving_avg.size(); ++t) {
        out += std::to_string(t + 1);
        out += ',';
        out += format_double(s.mean_moving_avg[t]);
        out += ',';
        out += format_double(s.switch_fraction[t]);
        out += '\n';
    }
    write_file(path, out);
}

void write_summary_csv(const std::filesystem::path& path, std::span<const PolicySummary> rows) {
    std::string out = "policy,switch_cost,trials,converged_rate,switching_rate\n";
    for (const auto& r : rows) {
        out += policy_name(r.policy) + ',' + format_double(r.switching_cost) + ',' +
               std::to_string(r.trials) + ',' + format_double(r.converged_rate) + ',' +
               format_double(r.switching_rate) + '\n';
    }
    write_file(path, out);
}

std::vector<double> read_csv_column(const std::filesystem::path& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header");

    std::size_t index = 0;
    bool found = false;
    {
        std::istringstream header(line);
        std::string name;
        for (std::size_t k = 0; std::getline(header, name, ','); ++k) {
            if (name == column) {
                index = k;
                found = true;
                break;
            }
        }
    }
    if (!found) throw FormatError(path.string() + ": no column '" + column + "'");

    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t start = 0;
        for (std::size_t k = 0; k < index; ++k) {
            start = line.find(',', start);
            if (start == std::string::npos) throw FormatError(path.string() + ": short row");
            ++start;
        }
        std::size_t end = line.find(',', start);
        if (end == std::string::npos) end = line.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + end, v);
        if (ec != std::errc{} || ptr != line.data() + end) {
            throw FormatError(path.string() + ": bad number in column '" + column + "'");
        }
        values.push_back(v);
    }
    return values;
}

} // namespace cogmcs

#include "cogmcs/config.hpp"

#include "cogmcs/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace cogmcs {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view text, std::string_view key) {
    text = trim(text);
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw FormatError("bad value '" + std::string(text) + "' for key '" + std::string(key) + "'");
    }
    return value;
}

std::vector<int> parse_int_list(std::string_view text, std::string_view key) {
    std::vector<int> out;
    for (double v : parse_number_list(text)) {
        if (v != static_cast<int>(v)) throw FormatError("key '" + std::string(key) + "' needs integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, values[i]);
        out.append(buf, end);
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

} // namespace

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    text = trim(text);
    if (text.empty()) return out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        out.push_back(parse_number<double>(item, "list"));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    ScenarioConfig& s = cfg.scenario;
    AgentConfig& a = cfg.agent;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw FormatError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));

        if (key == "avg_snr_db") s.avg_snr_db = parse_number<double>(value, key);
        else if (key == "avg_inr_db") s.avg_inr_db = parse_number_list(value);
        else if (key == "miss_prob") s.miss_prob = parse_number_list(value);
        else if (key == "rho") s.rho = parse_number<double>(value, key);
        else if (key == "symbols_per_frame") s.symbols_per_frame = parse_number<int>(value, key);
        else if (key == "sensing_fraction") s.sensing_fraction = parse_number<double>(value, key);
        else if (key == "switching_cost") s.switching_cost = parse_number<double>(value, key);
        else if (key == "frames") s.frames = parse_number<int>(value, key);
        else if (key == "trials") s.trials = parse_number<int>(value, key);
        else if (key == "seed") s.seed = parse_number<std::uint64_t>(value, key);
        else if (key == "phi") a.phi = parse_number<int>(value, key);
        else if (key == "batch_size") a.batch_size = parse_number<int>(value, key);
        else if (key == "memory_capacity") a.memory_capacity = parse_number<int>(value, key);
        else if (key == "sync_period") a.sync_period = parse_number<int>(value, key);
        else if (key == "warmup_frames") a.warmup_frames = parse_number<int>(value, key);
        else if (key == "discount") a.discount = parse_number<double>(value, key);
        else if (key == "learning_rate") a.learning_rate = parse_number<double>(value, key);
        else if (key == "rms_decay") a.rms_decay = parse_number<double>(value, key);
        else if (key == "rms_epsilon") a.rms_epsilon = parse_number<double>(value, key);
        else if (key == "epsilon_start") a.epsilon_start = parse_number<double>(value, key);
        else if (key == "epsilon_min") a.epsilon_min = parse_number<double>(value, key);
        else if (key == "epsilon_decay") a.epsilon_decay = parse_number<double>(value, key);
        else if (key == "hidden") a.hidden = parse_int_list(value, key);
        else throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    s.validate();
    a.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const RunConfig& config) {
    const ScenarioConfig& s = config.scenario;
    const AgentConfig& a = config.agent;
    std::vector<double> hidden(a.hidden.begin(), a.hidden.end());
    std::ostringstream out;
    out << "avg_snr_db = " << num(s.avg_snr_db) << '\n'
        << "avg_inr_db = " << join(s.avg_inr_db) << '\n'
        << "miss_prob = " << join(s.miss_prob) << '\n'
        << "rho = " << num(s.rho) << '\n'
        << "symbols_per_frame = " << s.symbols_per_frame << '\n'
        << "sensing_fraction = " << num(s.sensing_fraction) << '\n'
        << "switching_cost = " << num(s.switching_cost) << '\n'
        << "frames = " << s.frames << '\n'
        << "trials = " << s.trials << '\n'
        << "seed = " << s.seed << '\n'
        << "phi = " << a.phi << '\n'
        << "batch_size = " << a.batch_size << '\n'
        << "memory_capacity = " << a.memory_capacity << '\n'
        << "sync_period = " << a.sync_period << '\n'
        << "warmup_frames = " << a.warmup_frames << '\n'
        << "discount = " << num(a.discount) << '\n'
        << "learning_rate = " << num(a.learning_rate) << '\n'
        << "rms_decay = " << num(a.rms_decay) << '\n'
        << "rms_epsilon = " << num(a.rms_epsilon) << '\n'
        << "epsilon_start = " << num(a.epsilon_start) << '\n'
        << "epsilon_min = " << num(a.epsilon_min) << '\n'
        << "epsilon_decay = " << num(a.epsilon_decay) << '\n'
        << "hidden = " << join(hidden) << '\n';
    return out.str();
}

} // namespace cogmcs

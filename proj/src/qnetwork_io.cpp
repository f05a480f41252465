#include "cogmcs/errors.hpp"
#include "cogmcs/qnetwork.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

namespace cogmcs {

namespace {

constexpr const char* kMagic = "cogmcs-qnetwork";
constexpr int kVersion = 1;

void append_number(std::string& out, double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, end);
}

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw FormatError("cannot open weights file " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        text_ = ss.str();
    }

    std::string_view token() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("unexpected end of file");
        return std::string_view(text_).substr(start, pos_ - start);
    }

    void expect(std::string_view word) {
        if (token() != word) fail("expected '" + std::string(word) + "'");
    }

    template <class T>
    T number() {
        const std::string_view tok = token();
        T value{};
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            fail("malformed number '" + std::string(tok) + "'");
        }
        return value;
    }

    bool at_end() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return pos_ == text_.size();
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw FormatError(path_.string() + ": " + what);
    }

private:
    std::filesystem::path path_;
    std::string text_;
    std::size_t pos_ = 0;
};

} // namespace

void save_weights(const QNetwork& net, const std::filesystem::path& path) {
    std::string out;
    out += kMagic;
    out += ' ' + std::to_string(kVersion) + '\n';
    out += "sizes";
    for (int n : net.layer_sizes()) out += ' ' + std::to_string(n);
    out += '\n';
    const auto& layers = net.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        out += "layer " + std::to_string(l) + '\n';
        const auto& layer = layers[l];
        for (int i = 0; i < layer.inputs; ++i) {
            for (int o = 0; o < layer.outputs; ++o) {
                if (o) out += ' ';
                append_number(out, layer.w(i, o));
            }
            out += '\n';
        }
        for (int o = 0; o < layer.outputs; ++o) {
            if (o) out += ' ';
            append_number(out, layer.bias[o]);
        }
        out += '\n';
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write weights file " + path.string());
    file << out;
    if (!file) throw std::runtime_error("failed writing weights file " + path.string());
}

QNetwork load_weights(const std::filesystem::path& path) {
    Reader in(path);
    in.expect(kMagic);
    if (in.number<int>() != kVersion) in.fail("unsupported version");
    in.expect("sizes");

    std::vector<int> sizes;
    // The sizes line ends where the first "layer" keyword begins.
    for (;;) {
        const std::string_view tok = in.token();
        if (tok == "layer") break;
        int n = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
        if (ec != std::errc{} || ptr != tok.data() + tok.size() || n < 1) in.fail("bad layer size");
        sizes.push_back(n);
    }
    if (sizes.size() < 2) in.fail("need at least two layer sizes");

    QNetwork net = QNetwork::zeros(sizes);
    auto& layers = net.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (l > 0) in.expect("layer");
        if (in.number<std::size_t>() != l) in.fail("layers out of order");
        for (double& w : layers[l].weights) w = in.number<double>();
        for (double& b : layers[l].bias) b = in.number<double>();
    }
    if (!in.at_end()) in.fail("trailing data after last layer");
    return net;
}

QNetwork load_weights(const std::filesystem::path& path, const std::vector<int>& expected_sizes) {
    QNetwork net = load_weights(path);
    if (net.layer_sizes() != expected_sizes) {
        std::string got, want;
        for (int n : net.layer_sizes()) got += std::to_string(n) + ' ';
        for (int n : expected_sizes) want += std::to_string(n) + ' ';
        throw ShapeError("weights file has layer sizes [" + got + "], configuration needs [" + want + "]");
    }
    return net;
}

} // namespace cogmcs

#include "cogmcs/qnetwork.hpp"

#include "cogmcs/errors.hpp"
#include "cogmcs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cogmcs {

namespace {

void check_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw ShapeError("network needs at least an input and an output layer");
    for (int n : sizes) {
        if (n < 1) throw ShapeError("layer widths must be positive");
    }
}

// Post-activation values of every layer for a batch, row-major [batch][width].
// acts[0] is the input itself.
struct BatchActivations {
    int batch = 0;
    std::vector<std::vector<double>> acts;
};

// Zero inputs are skipped: they are frequent after ReLU and contribute
// nothing to the sums.
void layer_forward(const DenseLayer& layer, std::span<const double> in, std::span<double> out,
                   int batch, bool relu) {
    const int n_in = layer.inputs;
    const int n_out = layer.outputs;
    for (int b = 0; b < batch; ++b) {
        const double* x = in.data() + static_cast<std::size_t>(b) * n_in;
        double* z = out.data() + static_cast<std::size_t>(b) * n_out;
        std::copy(layer.bias.begin(), layer.bias.end(), z);
        for (int i = 0; i < n_in; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            const double* w = layer.weights.data() + static_cast<std::size_t>(i) * n_out;
            for (int o = 0; o < n_out; ++o) z[o] += xi * w[o];
        }
        if (relu) {
            for (int o = 0; o < n_out; ++o) z[o] = z[o] > 0.0 ? z[o] : 0.0;
        }
    }
}

BatchActivations forward_batch(const QNetwork& net, std::vector<double> inputs, int batch) {
    BatchActivations out;
    out.batch = batch;
    out.acts.reserve(net.layers().size() + 1);
    out.acts.push_back(std::move(inputs));
    const auto& layers = net.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        std::vector<double> next(static_cast<std::size_t>(batch) * layers[l].outputs);
        layer_forward(layers[l], out.acts.back(), next, batch, l + 1 < layers.size());
        out.acts.push_back(std::move(next));
    }
    return out;
}

std::vector<double> stack(std::span<const Experience> batch, bool next, int width) {
    std::vector<double> flat;
    flat.reserve(batch.size() * static_cast<std::size_t>(width));
    for (const auto& e : batch) {
        const auto& v = next ? e.next_state : e.state;
        if (static_cast<int>(v.size()) != width) {
            throw ShapeError("experience state has " + std::to_string(v.size()) +
                             " entries, network expects " + std::to_string(width));
        }
        flat.insert(flat.end(), v.begin(), v.end());
    }
    return flat;
}

struct TdForward {
    BatchActivations acts;
    std::vector<double> errors;  // Q(s,a) - y per sample
    double loss = 0.0;
};

TdForward td_forward(const QNetwork& net, const QNetwork& target,
                     std::span<const Experience> batch, double discount) {
    if (batch.empty()) throw std::domain_error("training batch must not be empty");
    if (!net.same_architecture(target)) throw ShapeError("target network architecture differs");
    const int z = static_cast<int>(batch.size());
    const int m = net.output_size();

    const BatchActivations next = forward_batch(target, stack(batch, true, net.input_size()), z);
    TdForward fw;
    fw.acts = forward_batch(net, stack(batch, false, net.input_size()), z);
    const auto& q_next = next.acts.back();
    const auto& q = fw.acts.acts.back();

    fw.errors.resize(batch.size());
    double sum_sq = 0.0;
    for (int b = 0; b < z; ++b) {
        const auto& e = batch[b];
        if (e.action >= static_cast<std::size_t>(m)) throw ShapeError("experience action out of range");
        const double* row = q_next.data() + static_cast<std::size_t>(b) * m;
        const double y = e.reward + discount * *std::max_element(row, row + m);
        const double err = q[static_cast<std::size_t>(b) * m + e.action] - y;
        fw.errors[b] = err;
        sum_sq += err * err;
    }
    fw.loss = sum_sq / (2.0 * z);
    return fw;
}

} // namespace

QNetwork::QNetwork(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    check_sizes(sizes_);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        DenseLayer layer;
        layer.inputs = sizes_[l];
        layer.outputs = sizes_[l + 1];
        layer.weights.assign(static_cast<std::size_t>(layer.inputs) * layer.outputs, 0.0);
        layer.bias.assign(layer.outputs, 0.0);
        layers_.push_back(std::move(layer));
    }
}

QNetwork::QNetwork(std::vector<int> layer_sizes, std::uint64_t seed) : QNetwork(std::move(layer_sizes)) {
    Rng rng(seed, Stream::NetworkInit);
    for (auto& layer : layers_) {
        const double limit = std::sqrt(6.0 / (layer.inputs + layer.outputs));
        for (double& w : layer.weights) w = rng.uniform(-limit, limit);
    }
}

QNetwork QNetwork::zeros(std::vector<int> layer_sizes) { return QNetwork(std::move(layer_sizes)); }

std::vector<double> QNetwork::forward(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_size()) {
        throw ShapeError("input has " + std::to_string(x.size()) + " entries, network expects " +
                         std::to_string(input_size()));
    }
    auto acts = forward_batch(*this, std::vector<double>(x.begin(), x.end()), 1);
    return std::move(acts.acts.back());
}

std::size_t QNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
    return n;
}

bool QNetwork::all_finite() const {
    for (const auto& layer : layers_) {
        for (double w : layer.weights) if (!std::isfinite(w)) return false;
        for (double b : layer.bias) if (!std::isfinite(b)) return false;
    }
    return true;
}

Gradients Gradients::like(const QNetwork& net) {
    Gradients g;
    for (const auto& layer : net.layers()) {
        g.weights.emplace_back(layer.weights.size(), 0.0);
        g.bias.emplace_back(layer.bias.size(), 0.0);
    }
    return g;
}

double td_loss(const QNetwork& net, const QNetwork& target, std::span<const Experience> batch,
               double discount) {
    return td_forward(net, target, batch, discount).loss;
}

LossGradient td_loss_gradient(const QNetwork& net, const QNetwork& target,
                              std::span<const Experience> batch, double discount) {
    TdForward fw = td_forward(net, target, batch, discount);
    const int z = static_cast<int>(batch.size());
    const auto& layers = net.layers();

    LossGradient out;
    out.loss = fw.loss;
    out.grad = Gradients::like(net);

    // dL/dQ(s,a) = (Q - y) / Z on the taken action only.
    std::vector<double> delta(static_cast<std::size_t>(z) * net.output_size(), 0.0);
    for (int b = 0; b < z; ++b) {
        delta[static_cast<std::size_t>(b) * net.output_size() + batch[b].action] = fw.errors[b] / z;
    }

    for (std::size_t l = layers.size(); l-- > 0;) {
        const DenseLayer& layer = layers[l];
        const auto& input = fw.acts.acts[l];
        auto& gw = out.grad.weights[l];
        auto& gb = out.grad.bias[l];
        const int n_in = layer.inputs;
        const int n_out = layer.outputs;

        for (int b = 0; b < z; ++b) {
            const double* x = input.data() + static_cast<std::size_t>(b) * n_in;
            const double* d = delta.data() + static_cast<std::size_t>(b) * n_out;
            for (int o = 0; o < n_out; ++o) gb[o] += d[o];
            for (int i = 0; i < n_in; ++i) {
                const double xi = x[i];
                if (xi == 0.0) continue;
                double* g = gw.data() + static_cast<std::size_t>(i) * n_out;
                for (int o = 0; o < n_out; ++o) g[o] += xi * d[o];
            }
        }
        if (l == 0) break;

        // Back through the ReLU of the previous layer: inputs that are zero
        // after ReLU had non-positive pre-activation and pass no gradient.
        std::vector<double> prev(static_cast<std::size_t>(z) * n_in, 0.0);
        for (int b = 0; b < z; ++b) {
            const double* x = input.data() + static_cast<std::size_t>(b) * n_in;
            const double* d = delta.data() + static_cast<std::size_t>(b) * n_out;
            double* p = prev.data() + static_cast<std::size_t>(b) * n_in;
            for (int i = 0; i < n_in; ++i) {
                if (x[i] <= 0.0) continue;
                const double* w = layer.weights.data() + static_cast<std::size_t>(i) * n_out;
                double s = 0.0;
                for (int o = 0; o < n_out; ++o) s += w[o] * d[o];
                p[i] = s;
            }
        }
        delta = std::move(prev);
    }
    return out;
}

RmsProp::RmsProp(const QNetwork& net, double learning_rate, double decay, double epsilon)
    : lr_(learning_rate), decay_(decay), eps_(epsilon), acc_(Gradients::like(net)) {}

namespace {
constexpr double kAccumulatorFloor = 1e-200;
}

void RmsProp::apply(QNetwork& net, const Gradients& grad) {
    auto& layers = net.layers();
    if (acc_.weights.size() != layers.size() || grad.weights.size() != layers.size()) {
        throw ShapeError("optimizer state does not match the network");
    }
    auto step = [this](std::vector<double>& params, const std::vector<double>& g, std::vector<double>& acc) {
        if (params.size() != g.size() || params.size() != acc.size()) {
            throw ShapeError("optimizer state does not match the network");
        }
        for (std::size_t k = 0; k < params.size(); ++k) {
            acc[k] = decay_ * acc[k] + (1.0 - decay_) * g[k] * g[k];
            // Accumulators of parameters without gradient decay geometrically
            // into the subnormal range, where arithmetic is very slow. Far
            // below epsilon^2 they have no effect on the step.
            if (acc[k] < kAccumulatorFloor) acc[k] = 0.0;
            params[k] -= lr_ * g[k] / (std::sqrt(acc[k]) + eps_);
        }
    };
    for (std::size_t l = 0; l < layers.size(); ++l) {
        step(layers[l].weights, grad.weights[l], acc_.weights[l]);
        step(layers[l].bias, grad.bias[l], acc_.bias[l]);
    }
}

double train_batch(QNetwork& net, const QNetwork& target, std::span<const Experience> batch,
                   double discount, RmsProp& optimizer) {
    LossGradient lg = td_loss_gradient(net, target, batch, discount);
    optimizer.apply(net, lg.grad);
    return lg.loss;
}

double gradient_check(const QNetwork& net, const QNetwork& target, std::span<const Experience> batch,
                      double discount, double step) {
    const LossGradient analytic = td_loss_gradient(net, target, batch, discount);
    QNetwork probe = net;
    double worst = 0.0;

    auto compare = [&](double& param, double a) {
        const double saved = param;
        param = saved + step;
        const double up = td_loss(probe, target, batch, discount);
        param = saved - step;
        const double down = td_loss(probe, target, batch, discount);
        param = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(a - numeric) / denom);
    };

    auto& layers = probe.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        for (std::size_t k = 0; k < layers[l].weights.size(); ++k) {
            compare(layers[l].weights[k], analytic.grad.weights[l][k]);
        }
        for (std::size_t k = 0; k < layers[l].bias.size(); ++k) {
            compare(layers[l].bias[k], analytic.grad.bias[l][k]);
        }
    }
    return worst;
}

void sync_target(const QNetwork& net, QNetwork& target) {
    if (!net.same_architecture(target)) throw ShapeError("cannot sync networks of different shape");
    target = net;
}

} // namespace cogmcs

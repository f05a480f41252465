#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cogmcs {

// Fully connected layer. Weights are stored input-major: weights[i * outputs + o]
// connects input i to output o.
struct DenseLayer {
    int inputs = 0;
    int outputs = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    double& w(int i, int o) { return weights[static_cast<std::size_t>(i) * outputs + o]; }
    double w(int i, int o) const { return weights[static_cast<std::size_t>(i) * outputs + o]; }
};

// Feed-forward action-value network: ReLU on hidden layers, identity output.
class QNetwork {
public:
    QNetwork() = default;

    // Glorot-uniform weights (+-sqrt(6 / (fan_in + fan_out))), zero biases.
    QNetwork(std::vector<int> layer_sizes, std::uint64_t seed);

    static QNetwork zeros(std::vector<int> layer_sizes);

    // Throws ShapeError if x.size() != input_size().
    std::vector<double> forward(std::span<const double> x) const;

    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    const std::vector<int>& layer_sizes() const { return sizes_; }
    std::size_t parameter_count() const;

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    bool same_architecture(const QNetwork& other) const { return sizes_ == other.sizes_; }

    // Every weight and bias is finite.
    bool all_finite() const;

private:
    explicit QNetwork(std::vector<int> layer_sizes);

    std::vector<int> sizes_;
    std::vector<DenseLayer> layers_;
};

// One replay tuple <s, a, r, s'>. `action` is a 0-based output index.
struct Experience {
    std::vector<double> state;
    std::size_t action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
};

// Gradient buffers with the same shape as a network's layers.
struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> bias;

    static Gradients like(const QNetwork& net);
};

struct LossGradient {
    double loss = 0.0;
    Gradients grad;
};

// Batched TD loss (1/2Z) sum (y - Q(s,a))^2 with y = r + discount * max Q_target(s').
// The gradient is taken only through Q(s,a) of `net`; the target is constant.
double td_loss(const QNetwork& net, const QNetwork& target,
               std::span<const Experience> batch, double discount);

LossGradient td_loss_gradient(const QNetwork& net, const QNetwork& target,
                              std::span<const Experience> batch, double discount);

class RmsProp {
public:
    RmsProp() = default;
    RmsProp(const QNetwork& net, double learning_rate = 0.01, double decay = 0.9,
            double epsilon = 1e-8);

    // acc <- decay acc + (1 - decay) g^2;  w <- w - lr g / (sqrt(acc) + eps)
    void apply(QNetwork& net, const Gradients& grad);

    double learning_rate() const { return lr_; }
    const Gradients& accumulator() const { return acc_; }

private:
    double lr_ = 0.01;
    double decay_ = 0.9;
    double eps_ = 1e-8;
    Gradients acc_;
};

// One optimiser step on `net`. Returns the loss before the step.
// Throws std::domain_error for an empty batch, ShapeError on mismatched nets.
double train_batch(QNetwork& net, const QNetwork& target, std::span<const Experience> batch,
                   double discount, RmsProp& optimizer);

// Maximum relative deviation between the analytic TD-loss gradient and
// central finite differences with the given step. Relative error is
// |a - n| / max(|a|, |n|, 1e-6), so parameters whose gradients are both
// vanishingly small are compared on an absolute scale.
double gradient_check(const QNetwork& net, const QNetwork& target,
                      std::span<const Experience> batch, double discount, double step = 1e-5);

// target <- deep copy of net. Throws ShapeError on architecture mismatch.
void sync_target(const QNetwork& net, QNetwork& target);

// Text weight file:
//   cogmcs-qnetwork 1
//   sizes <n0> <n1> ... <nL>
//   then per layer: `layer <k>`, one line per input row holding the outgoing
//   weights (input-major), and a final line with the output biases.
// Values are shortest round-trip decimal, so save/load is bit-exact.
void save_weights(const QNetwork& net, const std::filesystem::path& path);

// Throws FormatError on a malformed or truncated file.
QNetwork load_weights(const std::filesystem::path& path);

// As above, and throws ShapeError unless the stored sizes equal `expected_sizes`.
QNetwork load_weights(const std::filesystem::path& path, const std::vector<int>& expected_sizes);

} // namespace cogmcs

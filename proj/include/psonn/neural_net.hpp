#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "psonn/dataset.hpp"
#include "psonn/util.hpp"

namespace psonn {

// Layer sizes from input to output. The toolkit's classifiers use
// [features, hidden..., 1]; smaller shapes are allowed for composing tests.
struct Topology {
    std::vector<std::size_t> layer_sizes;

    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }
    std::size_t layer_pairs() const { return layer_sizes.size() - 1; }

    void validate() const {
        if (layer_sizes.size() < 2) throw TrainingError("topology needs at least 2 layers");
        for (std::size_t s : layer_sizes)
            if (s == 0) throw TrainingError("topology layer sizes must be positive");
    }

    bool operator==(const Topology&) const = default;
};

// Canonical flat layout: all weight matrices first (layer-major, row-major
// with one row per output neuron), then all bias vectors in layer order.
using ParamVector = std::vector<double>;

inline std::size_t param_count(const Topology& t) {
    t.validate();
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < t.layer_sizes.size(); ++l)
        n += t.layer_sizes[l] * t.layer_sizes[l + 1] + t.layer_sizes[l + 1];
    return n;
}

namespace detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Start of layer l's weight block / bias block in the canonical layout.
inline std::size_t weight_offset(const Topology& t, std::size_t layer) {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) off += t.layer_sizes[l] * t.layer_sizes[l + 1];
    return off;
}

inline std::size_t bias_offset(const Topology& t, std::size_t layer) {
    std::size_t total_weights = 0;
    for (std::size_t l = 0; l + 1 < t.layer_sizes.size(); ++l)
        total_weights += t.layer_sizes[l] * t.layer_sizes[l + 1];
    std::size_t off = total_weights;
    for (std::size_t l = 0; l < layer; ++l) off += t.layer_sizes[l + 1];
    return off;
}

}  // namespace detail

// Feedforward network with a logistic sigmoid on every non-input layer.
struct Network {
    Topology topology;
    ParamVector params;

    // Output probability in (0, 1).
    double forward(const std::vector<double>& features) const {
        if (features.size() != topology.input_size())
            throw DataError("input has " + std::to_string(features.size()) + " features, network expects " +
                            std::to_string(topology.input_size()));
        std::vector<double> activation = features;
        std::vector<double> next;
        for (std::size_t l = 0; l + 1 < topology.layer_sizes.size(); ++l) {
            const std::size_t in = topology.layer_sizes[l];
            const std::size_t out = topology.layer_sizes[l + 1];
            const double* w = params.data() + detail::weight_offset(topology, l);
            const double* b = params.data() + detail::bias_offset(topology, l);
            next.assign(out, 0.0);
            for (std::size_t j = 0; j < out; ++j) {
                double z = b[j];
                const double* row = w + j * in;
                for (std::size_t i = 0; i < in; ++i) z += row[i] * activation[i];
                next[j] = detail::sigmoid(z);
            }
            activation.swap(next);
        }
        return activation[0];
    }

    // 1 iff forward(features) >= threshold; the tie goes to positive.
    int predict_label(const std::vector<double>& features, double threshold = 0.5) const {
        return forward(features) >= threshold ? 1 : 0;
    }

    bool operator==(const Network&) const = default;
};

inline ParamVector flatten(const Network& net) { return net.params; }

inline Network unflatten(const Topology& topology, ParamVector params) {
    const std::size_t expected = param_count(topology);
    if (params.size() != expected)
        throw TrainingError("parameter vector has " + std::to_string(params.size()) +
                            " entries, topology needs " + std::to_string(expected));
    for (double p : params)
        if (!std::isfinite(p)) throw TrainingError("parameter vector holds a non-finite entry");
    return Network{topology, std::move(params)};
}

// Mean squared error of the forward output against the 0/1 labels.
inline double mse_loss(const Network& net, const Dataset& data) {
    if (data.empty()) throw DataError("cannot score an empty dataset");
    double sum = 0;
    for (const auto& rec : data.records) {
        const double d = net.forward(rec.features) - static_cast<double>(rec.label);
        sum += d * d;
    }
    return sum / static_cast<double>(data.size());
}

// Exact gradient of mse_loss with respect to every parameter, reverse-mode,
// emitted in the canonical flat layout.
inline ParamVector gradient(const Network& net, const Dataset& data) {
    if (data.empty()) throw DataError("cannot differentiate over an empty dataset");
    const Topology& t = net.topology;
    const std::size_t pairs = t.layer_pairs();
    ParamVector grad(net.params.size(), 0.0);

    std::vector<std::vector<double>> activations(pairs + 1);
    std::vector<double> delta, prev_delta;
    const double inv_n = 1.0 / static_cast<double>(data.size());

    for (const auto& rec : data.records) {
        activations[0] = rec.features;
        for (std::size_t l = 0; l < pairs; ++l) {
            const std::size_t in = t.layer_sizes[l];
            const std::size_t out = t.layer_sizes[l + 1];
            const double* w = net.params.data() + detail::weight_offset(t, l);
            const double* b = net.params.data() + detail::bias_offset(t, l);
            activations[l + 1].assign(out, 0.0);
            for (std::size_t j = 0; j < out; ++j) {
                double z = b[j];
                const double* row = w + j * in;
                for (std::size_t i = 0; i < in; ++i) z += row[i] * activations[l][i];
                activations[l + 1][j] = detail::sigmoid(z);
            }
        }

        const double output = activations[pairs][0];
        delta.assign(1, 2.0 * inv_n * (output - static_cast<double>(rec.label)) * output * (1.0 - output));

        for (std::size_t l = pairs; l-- > 0;) {
            const std::size_t in = t.layer_sizes[l];
            const std::size_t out = t.layer_sizes[l + 1];
            double* gw = grad.data() + detail::weight_offset(t, l);
            double* gb = grad.data() + detail::bias_offset(t, l);
            const double* w = net.params.data() + detail::weight_offset(t, l);
            for (std::size_t j = 0; j < out; ++j) {
                gb[j] += delta[j];
                double* grow = gw + j * in;
                for (std::size_t i = 0; i < in; ++i) grow[i] += delta[j] * activations[l][i];
            }
            if (l == 0) break;
            prev_delta.assign(in, 0.0);
            for (std::size_t i = 0; i < in; ++i) {
                double sum = 0;
                for (std::size_t j = 0; j < out; ++j) sum += w[j * in + i] * delta[j];
                const double a = activations[l][i];
                prev_delta[i] = sum * a * (1.0 - a);
            }
            delta.swap(prev_delta);
        }
    }
    return grad;
}

struct BackpropConfig {
    double learning_rate = 0.5;
    std::size_t epochs = 500;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(learning_rate > 0.0)) throw TrainingError("learning_rate must be positive");
        if (epochs == 0) throw TrainingError("epochs must be at least 1");
    }
};

// Seeded uniform [-0.5, 0.5] initialization, shared by both trainers' tests.
inline ParamVector init_params(const Topology& topology, std::uint64_t seed) {
    ParamVector params(param_count(topology));
    Rng rng(seed);
    for (double& p : params) p = rng.uniform(-0.5, 0.5);
    return params;
}

struct BackpropResult {
    Network network;
    std::vector<double> loss_history;  // entry 0 is the loss at initialization
};

// Full-batch gradient descent on the training MSE.
inline BackpropResult backprop_train(const Topology& topology, const Dataset& train,
                                     const BackpropConfig& cfg) {
    cfg.validate();
    if (train.empty()) throw TrainingError("cannot train on an empty dataset");
    if (topology.input_size() != train.n_features())
        throw TrainingError("topology input size " + std::to_string(topology.input_size()) +
                            " does not match feature count " + std::to_string(train.n_features()));

    BackpropResult result;
    result.network = Network{topology, init_params(topology, cfg.seed)};
    result.loss_history.reserve(cfg.epochs + 1);
    result.loss_history.push_back(mse_loss(result.network, train));
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const ParamVector g = gradient(result.network, train);
        for (std::size_t i = 0; i < g.size(); ++i)
            result.network.params[i] -= cfg.learning_rate * g[i];
        result.loss_history.push_back(mse_loss(result.network, train));
    }
    return result;
}

}  // namespace psonn

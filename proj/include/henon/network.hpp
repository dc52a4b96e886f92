#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "henon/common.hpp"

namespace henon {

struct NetworkTopology {
    std::vector<int> widths;  // first = input dim (2N), last = 2 output classes

    int input_dim() const { return widths.front(); }
    int output_dim() const { return widths.back(); }
    int trainable_layers() const { return static_cast<int>(widths.size()) - 1; }
};

// widths (2N, 32, 32, 25, 20, 18, 16, 2) used throughout as the reference net
NetworkTopology baseline_topology(int history_length);

void validate_topology(const NetworkTopology& topology);

struct ParameterCounts {
    std::size_t weights = 0;
    std::size_t biases = 0;
    std::size_t total() const { return weights + biases; }
};

ParameterCounts count_parameters(const NetworkTopology& topology);

// All weights and biases in one flat vector: for each trainable layer, the
// weight matrix (out x in, row-major) followed by the bias vector. This layout
// is also the checkpoint wire format.
struct NetworkParameters {
    NetworkTopology topology;
    std::vector<double> values;

    struct LayerView {
        int in = 0, out = 0;
        std::size_t weight_offset = 0, bias_offset = 0;
    };
    std::vector<LayerView> layers;

    std::span<double> weights(int layer) {
        const auto& l = layers[layer];
        return {values.data() + l.weight_offset, static_cast<std::size_t>(l.in) * l.out};
    }
    std::span<const double> weights(int layer) const {
        const auto& l = layers[layer];
        return {values.data() + l.weight_offset, static_cast<std::size_t>(l.in) * l.out};
    }
    std::span<double> biases(int layer) {
        const auto& l = layers[layer];
        return {values.data() + l.bias_offset, static_cast<std::size_t>(l.out)};
    }
    std::span<const double> biases(int layer) const {
        const auto& l = layers[layer];
        return {values.data() + l.bias_offset, static_cast<std::size_t>(l.out)};
    }
};

NetworkParameters zero_parameters(const NetworkTopology& topology);

// Scaled uniform init, limit sqrt(6 / (fan_in + fan_out)) per layer, zero biases.
NetworkParameters initialize_parameters(const NetworkTopology& topology, std::uint64_t seed);

// Column-major (in x out) copies of the weight matrices; lets the forward pass
// run stride-1 over the output dimension. Refresh after every optimizer step.
struct TransposedWeights {
    std::vector<std::vector<double>> wt;  // wt[l][k*out + o]

    explicit TransposedWeights(const NetworkTopology& topology);
    void refresh(const NetworkParameters& params);
};

struct ActivationCache {
    std::vector<std::vector<double>> activations;  // post-activation per layer; [0] = input
    std::array<double, 2> probabilities{};
};

// Single-sample forward pass: ReLU hidden layers, softmax output. Returns the
// two class probabilities; fills `cache` for inspection when given.
std::array<double, 2> forward_pass(const NetworkParameters& params, std::span<const double> input,
                                   ActivationCache* cache = nullptr);

struct BatchView {
    const double* features = nullptr;
    const std::uint8_t* labels = nullptr;
    std::size_t count = 0;
    std::size_t dim = 0;

    std::span<const double> row(std::size_t i) const { return {features + i * dim, dim}; }
};

inline constexpr double kProbabilityClip = 1e-9;

// Owns the per-batch scratch state (transposed weights, activations, deltas)
// so the training loop does not allocate per step.
class BatchWorkspace {
public:
    explicit BatchWorkspace(const NetworkTopology& topology);

    // Refreshes the transposed weights and runs one forward sweep over the
    // batch; with a non-empty grad also accumulates the exact gradient of the
    // mean loss (softmax and cross-entropy combined analytically). Returns the
    // mean batch loss.
    double sweep(const NetworkParameters& params, const BatchView& batch, std::span<double> grad);

private:
    TransposedWeights wt_;
    std::vector<std::vector<double>> acts_;
    std::vector<double> delta_, delta_prev_;
};

// Mean binary cross-entropy over the batch, minimized form (negated
// log-likelihood), probabilities clipped to [kProbabilityClip, 1 - kProbabilityClip].
double loss(const NetworkParameters& params, const BatchView& batch);

// Exact gradient of `loss` w.r.t. every weight and bias. grad must have
// params.values.size() entries; returns the batch loss from the same sweep.
double backward_pass(const NetworkParameters& params, const BatchView& batch,
                     std::span<double> grad);

// Argmax class per sample (logit comparison; ties resolve to class 0).
namespace detail {

// scratch buffers big enough for any layer of the topology
struct SampleScratch {
    std::vector<double> a, b;
    explicit SampleScratch(const NetworkTopology& topology);
};

int predict_one(const NetworkParameters& params, const TransposedWeights& wt,
                const double* input, SampleScratch& scratch);

}  // namespace detail

}  // namespace henon

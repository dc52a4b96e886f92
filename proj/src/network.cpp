#include "henon/network.hpp"

#include <algorithm>
#include <cmath>

namespace henon {

NetworkTopology baseline_topology(int history_length) {
    return {{2 * history_length, 32, 32, 25, 20, 18, 16, 2}};
}

void validate_topology(const NetworkTopology& topology) {
    if (topology.widths.size() < 3) throw ConfigError("topology needs at least 3 layers");
    if (topology.widths.back() != 2) throw ConfigError("output layer must have width 2");
    for (const int w : topology.widths) {
        if (w < 1) throw ConfigError("layer widths must be >= 1");
    }
}

ParameterCounts count_parameters(const NetworkTopology& topology) {
    ParameterCounts counts;
    for (std::size_t i = 1; i < topology.widths.size(); ++i) {
        counts.weights += static_cast<std::size_t>(topology.widths[i]) * topology.widths[i - 1];
        counts.biases += static_cast<std::size_t>(topology.widths[i]);
    }
    return counts;
}

namespace {

std::vector<NetworkParameters::LayerView> build_layout(const NetworkTopology& topology) {
    std::vector<NetworkParameters::LayerView> layers;
    std::size_t offset = 0;
    for (std::size_t i = 1; i < topology.widths.size(); ++i) {
        NetworkParameters::LayerView l;
        l.in = topology.widths[i - 1];
        l.out = topology.widths[i];
        l.weight_offset = offset;
        offset += static_cast<std::size_t>(l.in) * l.out;
        l.bias_offset = offset;
        offset += static_cast<std::size_t>(l.out);
        layers.push_back(l);
    }
    return layers;
}

}  // namespace

NetworkParameters zero_parameters(const NetworkTopology& topology) {
    validate_topology(topology);
    NetworkParameters params;
    params.topology = topology;
    params.layers = build_layout(topology);
    params.values.assign(count_parameters(topology).total(), 0.0);
    return params;
}

NetworkParameters initialize_parameters(const NetworkTopology& topology, std::uint64_t seed) {
    NetworkParameters params = zero_parameters(topology);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& layer = params.layers[l];
        const double limit = std::sqrt(6.0 / (layer.in + layer.out));
        for (double& w : params.weights(static_cast<int>(l))) {
            w = uniform_range(rng, -limit, limit);
        }
        // biases stay zero
    }
    return params;
}

TransposedWeights::TransposedWeights(const NetworkTopology& topology) {
    wt.resize(topology.widths.size() - 1);
    for (std::size_t i = 1; i < topology.widths.size(); ++i) {
        wt[i - 1].resize(static_cast<std::size_t>(topology.widths[i]) * topology.widths[i - 1]);
    }
}

void TransposedWeights::refresh(const NetworkParameters& params) {
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& layer = params.layers[l];
        const auto w = params.weights(static_cast<int>(l));
        double* t = wt[l].data();
        for (int o = 0; o < layer.out; ++o) {
            for (int k = 0; k < layer.in; ++k) {
                t[static_cast<std::size_t>(k) * layer.out + o] = w[static_cast<std::size_t>(o) * layer.in + k];
            }
        }
    }
}

namespace detail {

SampleScratch::SampleScratch(const NetworkTopology& topology) {
    const int max_width = *std::max_element(topology.widths.begin(), topology.widths.end());
    a.resize(static_cast<std::size_t>(max_width));
    b.resize(static_cast<std::size_t>(max_width));
}

// z[o] = bias[o] + sum_k y_in[k] * wt[k*out + o]; stride-1 over o, so the
// compiler vectorizes without reassociating any reduction. Zero inputs (about
// half of all ReLU outputs) skip their row entirely; the skipped contribution
// is an exact +0.
inline void dense_forward(const double* wt, const double* bias, int in_dim, int out_dim,
                          const double* y_in, double* z) {
    for (int o = 0; o < out_dim; ++o) z[o] = bias[o];
    for (int k = 0; k < in_dim; ++k) {
        const double yk = y_in[k];
        if (yk == 0.0) continue;
        const double* row = wt + static_cast<std::size_t>(k) * out_dim;
        for (int o = 0; o < out_dim; ++o) z[o] += row[o] * yk;
    }
}

inline void relu_in_place(double* z, int n) {
    for (int i = 0; i < n; ++i) z[i] = z[i] > 0.0 ? z[i] : 0.0;
}

inline std::array<double, 2> softmax2(double z0, double z1) {
    const double m = std::max(z0, z1);
    const double e0 = std::exp(z0 - m);
    const double e1 = std::exp(z1 - m);
    const double sum = e0 + e1;
    return {e0 / sum, e1 / sum};
}

// forward to the output logits; scratch.a holds the current activation
inline void forward_logits(const NetworkParameters& params, const TransposedWeights& wt,
                           const double* input, SampleScratch& scratch, double* logits) {
    const int n_layers = static_cast<int>(params.layers.size());
    const double* current = input;
    for (int l = 0; l < n_layers; ++l) {
        const auto& layer = params.layers[l];
        double* out = (l == n_layers - 1) ? logits : scratch.b.data();
        dense_forward(wt.wt[l].data(), params.values.data() + layer.bias_offset, layer.in,
                      layer.out, current, out);
        if (l < n_layers - 1) {
            relu_in_place(out, layer.out);
            std::swap(scratch.a, scratch.b);
            current = scratch.a.data();
        }
    }
}

int predict_one(const NetworkParameters& params, const TransposedWeights& wt,
                const double* input, SampleScratch& scratch) {
    double logits[2];
    forward_logits(params, wt, input, scratch, logits);
    return logits[1] > logits[0] ? 1 : 0;
}

}  // namespace detail

std::array<double, 2> forward_pass(const NetworkParameters& params, std::span<const double> input,
                                   ActivationCache* cache) {
    if (static_cast<int>(input.size()) != params.topology.input_dim()) {
        throw ConfigError("forward_pass: input dimension mismatch");
    }
    TransposedWeights wt(params.topology);
    wt.refresh(params);

    const int n_layers = static_cast<int>(params.layers.size());
    std::vector<double> current(input.begin(), input.end());
    if (cache) {
        cache->activations.clear();
        cache->activations.push_back(current);
    }
    std::vector<double> next;
    for (int l = 0; l < n_layers; ++l) {
        const auto& layer = params.layers[l];
        next.assign(static_cast<std::size_t>(layer.out), 0.0);
        detail::dense_forward(wt.wt[l].data(), params.values.data() + layer.bias_offset, layer.in,
                              layer.out, current.data(), next.data());
        if (l < n_layers - 1) detail::relu_in_place(next.data(), layer.out);
        current = next;
        if (cache) cache->activations.push_back(current);
    }
    if (!std::isfinite(current[0]) || !std::isfinite(current[1])) {
        throw TrainingDivergedError(-1);
    }
    const auto probs = detail::softmax2(current[0], current[1]);
    if (cache) cache->probabilities = probs;
    return probs;
}

namespace {

double clipped_log(double p) {
    const double c = std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip);
    return std::log(c);
}

}  // namespace

BatchWorkspace::BatchWorkspace(const NetworkTopology& topology) : wt_(topology) {
    acts_.resize(topology.widths.size());
    for (std::size_t l = 0; l < topology.widths.size(); ++l) {
        acts_[l].resize(static_cast<std::size_t>(topology.widths[l]));
    }
    const int max_width = *std::max_element(topology.widths.begin(), topology.widths.end());
    delta_.reserve(static_cast<std::size_t>(max_width));
    delta_prev_.reserve(static_cast<std::size_t>(max_width));
}

double BatchWorkspace::sweep(const NetworkParameters& params, const BatchView& batch,
                             std::span<double> grad) {
    if (batch.count == 0) throw ConfigError("empty batch");
    if (batch.dim != static_cast<std::size_t>(params.topology.input_dim())) {
        throw ConfigError("batch dimension mismatch");
    }
    const bool want_grad = !grad.empty();
    if (want_grad && grad.size() != params.values.size()) {
        throw ConfigError("gradient buffer size mismatch");
    }

    wt_.refresh(params);
    const int n_layers = static_cast<int>(params.layers.size());

    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    double loss_sum = 0.0;

    for (std::size_t s = 0; s < batch.count; ++s) {
        const auto x = batch.row(s);
        std::copy(x.begin(), x.end(), acts_[0].begin());
        for (int l = 0; l < n_layers; ++l) {
            const auto& layer = params.layers[l];
            detail::dense_forward(wt_.wt[l].data(), params.values.data() + layer.bias_offset,
                                  layer.in, layer.out, acts_[static_cast<std::size_t>(l)].data(),
                                  acts_[static_cast<std::size_t>(l) + 1].data());
            if (l < n_layers - 1) {
                detail::relu_in_place(acts_[static_cast<std::size_t>(l) + 1].data(), layer.out);
            }
        }
        const auto& out = acts_[static_cast<std::size_t>(n_layers)];
        const auto probs = detail::softmax2(out[0], out[1]);
        const int truth = batch.labels[s] ? 1 : 0;
        loss_sum += -clipped_log(probs[static_cast<std::size_t>(truth)]);

        if (!want_grad) continue;

        delta_.assign(2, 0.0);
        delta_[0] = probs[0] - (truth == 0 ? 1.0 : 0.0);
        delta_[1] = probs[1] - (truth == 1 ? 1.0 : 0.0);

        for (int l = n_layers - 1; l >= 0; --l) {
            const auto& layer = params.layers[l];
            const auto& y_in = acts_[static_cast<std::size_t>(l)];
            double* g_w = grad.data() + layer.weight_offset;
            double* g_b = grad.data() + layer.bias_offset;
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta_[static_cast<std::size_t>(o)];
                if (d == 0.0) continue;
                g_b[o] += d;
                double* g_row = g_w + static_cast<std::size_t>(o) * layer.in;
                const double* y = y_in.data();
                for (int k = 0; k < layer.in; ++k) g_row[k] += d * y[k];
            }
            if (l == 0) break;
            delta_prev_.assign(static_cast<std::size_t>(layer.in), 0.0);
            const double* w = params.values.data() + layer.weight_offset;
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta_[static_cast<std::size_t>(o)];
                if (d == 0.0) continue;
                const double* w_row = w + static_cast<std::size_t>(o) * layer.in;
                for (int k = 0; k < layer.in; ++k) {
                    delta_prev_[static_cast<std::size_t>(k)] += w_row[k] * d;
                }
            }
            // ReLU mask of the producing layer
            for (int k = 0; k < layer.in; ++k) {
                if (y_in[static_cast<std::size_t>(k)] <= 0.0) delta_prev_[static_cast<std::size_t>(k)] = 0.0;
            }
            delta_.swap(delta_prev_);
        }
    }

    const double inv_count = 1.0 / static_cast<double>(batch.count);
    if (want_grad) {
        for (double& g : grad) g *= inv_count;
    }
    return loss_sum * inv_count;
}

double loss(const NetworkParameters& params, const BatchView& batch) {
    BatchWorkspace workspace(params.topology);
    return workspace.sweep(params, batch, {});
}

double backward_pass(const NetworkParameters& params, const BatchView& batch,
                     std::span<double> grad) {
    if (grad.empty()) throw ConfigError("backward_pass needs a gradient buffer");
    BatchWorkspace workspace(params.topology);
    return workspace.sweep(params, batch, grad);
}

}  // namespace henon

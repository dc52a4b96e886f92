#include "henon/training.hpp"

#include <cmath>
#include <numeric>

namespace henon {

TrainResult train(const NetworkTopology& topology, const FeatureSet& training_set,
                  const TrainingConfig& config) {
    validate_topology(topology);
    if (config.batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (config.epochs < 0) throw ConfigError("epochs must be >= 0");
    if (training_set.count == 0) throw ConfigError("empty training set");
    if (training_set.dim != static_cast<std::size_t>(topology.input_dim())) {
        throw ConfigError("training set dimension does not match the input layer");
    }

    TrainResult result;
    result.params = initialize_parameters(topology, derive_seed(config.seed, SeedPurpose::weight_init));
    result.epoch_loss.reserve(static_cast<std::size_t>(config.epochs));

    const std::size_t n = training_set.count;
    const std::size_t m = static_cast<std::size_t>(config.batch_size);

    AdamState adam(result.params.values.size(), config.adam);
    BatchWorkspace workspace(topology);
    std::vector<double> grad(result.params.values.size());

    std::mt19937_64 shuffle_rng(derive_seed(config.seed, SeedPurpose::shuffle));
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);

    std::vector<double> batch_features(m * training_set.dim);
    std::vector<std::uint8_t> batch_labels(m);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_in_place(order, shuffle_rng);
        double loss_sum = 0.0;

        for (std::size_t start = 0; start < n; start += m) {
            const std::size_t count = std::min(m, n - start);
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t src = order[start + i];
                const auto row = training_set.row(src);
                std::copy(row.begin(), row.end(), batch_features.begin() + i * training_set.dim);
                batch_labels[i] = training_set.labels[src];
            }
            const BatchView batch{batch_features.data(), batch_labels.data(), count,
                                  training_set.dim};
            const double batch_loss = workspace.sweep(result.params, batch, grad);
            if (!std::isfinite(batch_loss)) throw TrainingDivergedError(epoch);
            if (!config.train_biases) {
                for (std::size_t l = 0; l < result.params.layers.size(); ++l) {
                    const auto& layer = result.params.layers[l];
                    std::fill_n(grad.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset),
                                layer.out, 0.0);
                }
            }
            adam_step(result.params.values, grad, adam);
            loss_sum += batch_loss * static_cast<double>(count);
        }
        result.epoch_loss.push_back(loss_sum / static_cast<double>(n));
    }
    return result;
}

double accuracy_score(std::span<const std::uint8_t> predicted,
                      std::span<const std::uint8_t> actual) {
    if (predicted.size() != actual.size() || predicted.empty()) {
        throw ConfigError("accuracy_score: size mismatch or empty input");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        correct += (predicted[i] == actual[i]) ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

std::vector<std::uint8_t> serial::predict(const NetworkParameters& params, const FeatureSet& set) {
    if (set.count == 0) throw ConfigError("empty feature set");
    TransposedWeights wt(params.topology);
    wt.refresh(params);
    detail::SampleScratch scratch(params.topology);
    std::vector<std::uint8_t> out(set.count);
    for (std::size_t i = 0; i < set.count; ++i) {
        out[i] = static_cast<std::uint8_t>(
            detail::predict_one(params, wt, set.features.data() + i * set.dim, scratch));
    }
    return out;
}

std::vector<std::uint8_t> predict(const NetworkParameters& params, const FeatureSet& set) {
    if (set.count == 0) throw ConfigError("empty feature set");
    TransposedWeights wt(params.topology);
    wt.refresh(params);
    std::vector<std::uint8_t> out(set.count);
    const std::int64_t n = static_cast<std::int64_t>(set.count);
#pragma omp parallel
    {
        detail::SampleScratch scratch(params.topology);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(detail::predict_one(
                params, wt, set.features.data() + static_cast<std::size_t>(i) * set.dim, scratch));
        }
    }
    return out;
}

double serial::evaluate_accuracy(const NetworkParameters& params, const FeatureSet& set) {
    const auto predictions = serial::predict(params, set);
    return accuracy_score(predictions, set.labels);
}

double evaluate_accuracy(const NetworkParameters& params, const FeatureSet& set) {
    if (set.count == 0) throw ConfigError("empty feature set");
    TransposedWeights wt(params.topology);
    wt.refresh(params);
    const std::int64_t n = static_cast<std::int64_t>(set.count);
    std::int64_t correct = 0;
#pragma omp parallel
    {
        detail::SampleScratch scratch(params.topology);
#pragma omp for schedule(static) reduction(+ : correct)
        for (std::int64_t i = 0; i < n; ++i) {
            const int label = detail::predict_one(
                params, wt, set.features.data() + static_cast<std::size_t>(i) * set.dim, scratch);
            correct += (label == set.labels[static_cast<std::size_t>(i)]) ? 1 : 0;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(set.count);
}

}  // namespace henon

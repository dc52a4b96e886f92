#pragma once

#include "henon/dataset.hpp"
#include "henon/network.hpp"
#include "henon/optimizer.hpp"

namespace henon {

struct TrainingConfig {
    int batch_size = 128;
    int epochs = 5000;
    std::uint64_t seed = 0;  // drives weight init and epoch shuffles
    AdamConfig adam;
    bool train_biases = true;
};

struct TrainResult {
    NetworkParameters params;
    std::vector<double> epoch_loss;  // mean training loss per epoch
};

// Deterministic single-threaded minibatch training: per epoch, shuffle, then
// one Adam step per batch of `batch_size` (the final short batch included, so
// an epoch sees every sample exactly once). Throws TrainingDivergedError on a
// non-finite batch loss.
TrainResult train(const NetworkTopology& topology, const FeatureSet& training_set,
                  const TrainingConfig& config);

// fraction of matching entries; the balanced-corpus chance level is 0.5
double accuracy_score(std::span<const std::uint8_t> predicted,
                      std::span<const std::uint8_t> actual);

// Argmax predictions over a feature set. The unqualified versions run
// data-parallel; serial:: are the reference implementations the tests pin
// them against. Both produce identical output (per-sample arithmetic is
// shared and the accuracy count is an integer reduction).
std::vector<std::uint8_t> predict(const NetworkParameters& params, const FeatureSet& set);
double evaluate_accuracy(const NetworkParameters& params, const FeatureSet& set);

namespace serial {
std::vector<std::uint8_t> predict(const NetworkParameters& params, const FeatureSet& set);
double evaluate_accuracy(const NetworkParameters& params, const FeatureSet& set);
}

}  // namespace henon

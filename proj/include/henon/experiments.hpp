#pragma once

#include <optional>
#include <string>

#include "henon/training.hpp"

namespace henon {

// One training-plus-evaluation cell. All data, init, and shuffle seeds derive
// deterministically from `seed`; the test corpus seed may be pinned separately
// so repeats share their held-out data.
struct RunSpec {
    int horizon = 1;
    int history_length = 10;
    std::size_t n_train = 10000;
    std::size_t test_size = 100000;
    NetworkTopology topology;
    TrainingConfig config;
    MapParameters map;
    Threshold threshold;
    std::uint64_t seed = 0;
    std::uint64_t test_seed = 0;  // 0 = derive from `seed`
};

struct RunOutcome {
    double accuracy = 0.0;
    double final_train_loss = 0.0;
    std::uint64_t train_data_seed = 0;
    std::uint64_t test_data_seed = 0;
    NetworkParameters params;
    Standardizer standardizer;
    Corpus test_corpus;  // populated only when keep_artifacts
};

RunOutcome run_single(const RunSpec& spec, bool keep_artifacts = false);

// Rebuilds the held-out corpus of a finished run and re-evaluates a parameter
// set against it (used by checkpoint verification).
double reevaluate(const RunSpec& spec, const NetworkParameters& params,
                  const Standardizer& standardizer);

enum class SweepKind { training_size, topology, history };

struct SweepSpec {
    SweepKind kind = SweepKind::training_size;
    std::vector<int> horizons;
    std::vector<std::size_t> training_sizes;  // axis for training_size & history sweeps
    std::vector<int> l_values;                // axis for topology sweeps
    std::vector<int> history_lengths;         // axis for history sweeps
    int repeats = 3;
    int history_length = 10;
    std::size_t n_train = 100000;  // fixed size for topology sweeps
    std::size_t test_size = 100000;
    TrainingConfig config;
    MapParameters map;
    Threshold threshold;
    std::uint64_t master_seed = 0;
    int jobs = 0;             // 0 = all cores
    bool keep_params = false; // retain per-cell parameters for checkpointing
};

struct SweepCell {
    int horizon = 0;
    std::size_t training_size = 0;
    int l_value = -1;          // topology sweeps only
    int history_length = 10;
    int repeat = 0;
    std::uint64_t seed = 0;
    std::uint64_t test_seed = 0;
    double accuracy = 0.0;
    double final_loss = 0.0;
    bool ok = false;
    std::string error;
    NetworkParameters params;     // populated when SweepSpec::keep_params
    Standardizer standardizer;
};

struct SweepResult {
    SweepKind kind = SweepKind::training_size;
    std::vector<SweepCell> cells;  // fixed enumeration order, independent of job count

    // Mean accuracy vs horizon over successful repeats of the matching cells.
    std::vector<std::pair<int, double>> mean_curve(std::optional<std::size_t> training_size,
                                                   std::optional<int> l_value,
                                                   std::optional<int> history_length) const;
};

// Fig. "accuracy vs horizon" grid over (size, T, repeat).
SweepResult accuracy_curve(const SweepSpec& spec);

// Grid over (L, T, repeat) at fixed training size, topologies from topology_family.
SweepResult topology_sweep(const SweepSpec& spec);

// Grid over (N, size, T, repeat); the input layer is resized to 2N per run.
SweepResult history_sweep(const SweepSpec& spec);

struct Crossing {
    enum class Coverage { crossed, above_range, below_range };
    std::optional<int> t_star;  // largest T with mean accuracy >= level
    Coverage coverage = Coverage::below_range;
};

inline constexpr double kCrossingLevel = 0.80;

// Largest horizon on the curve whose accuracy is still at or above `level`;
// out-of-range when the curve never drops below it (above_range) or never
// reaches it (below_range).
Crossing crossing_time(const std::vector<std::pair<int, double>>& curve,
                       double level = kCrossingLevel);

struct CrossingFit {
    double level = kCrossingLevel;
    double prefactor = 0.0;  // value = prefactor * exp(rate * T)
    double rate = 0.0;
    double entropy_ratio = 0.0;      // rate / h
    double two_entropy_ratio = 0.0;  // rate / (2h)
    std::size_t n_points = 0;
};

// Unweighted least squares of log(value) against T*.
CrossingFit fit_exponential(const std::vector<std::pair<int, double>>& points);

// The width-32 stack: (2N, 32 x L, 16, 7, 2).
NetworkTopology topology_family(int l_value, int history_length);

struct Misclassification {
    StatePoint point;  // leading point (x_n, y_n) of the misclassified window
    bool predicted = false;
    bool actual = false;
};

std::vector<Misclassification> misclassifications_from_predictions(
    const Corpus& corpus, std::span<const std::uint8_t> predicted);

std::vector<Misclassification> misclassification_map(const NetworkParameters& params,
                                                     const Corpus& test_corpus,
                                                     const Standardizer& standardizer);

// columns: T, N_T/L/N axis columns, repeat, seed, accuracy, status
void write_sweep_csv(const std::string& path, const SweepResult& result);
void write_misclassification_csv(const std::string& path,
                                 const std::vector<Misclassification>& misses);

// desk-scale profile: reduced epochs/test size; paper-scale: the full protocol
struct Profile {
    std::string name = "paper";
    int epochs = 5000;
    std::size_t test_size = 1'000'000;
};

Profile paper_profile();
Profile desk_profile();

}  // namespace henon

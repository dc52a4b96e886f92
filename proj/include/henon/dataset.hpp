#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "henon/geometry.hpp"

namespace henon {

// One training/test sample: N consecutive phase-space points (times n-(N-1)..n)
// plus the exceedance label of the final point at horizon T. Corpora keep the
// windows in one flat array, window-major.
struct Corpus {
    int horizon = 1;
    int history_length = 1;
    std::uint64_t orbit_seed = 0;            // seed of the generating orbit stream
    std::vector<StatePoint> points;          // size() * history_length entries
    std::vector<std::uint8_t> labels;
    std::vector<std::uint64_t> end_indices;  // orbit index of each window's final point

    std::size_t size() const { return labels.size(); }

    std::span<const StatePoint> window(std::size_t i) const {
        return {points.data() + i * static_cast<std::size_t>(history_length),
                static_cast<std::size_t>(history_length)};
    }

    // leading point (x_n, y_n) of window i
    const StatePoint& leading_point(std::size_t i) const {
        return points[i * static_cast<std::size_t>(history_length) + history_length - 1];
    }

    bool balanced() const;
};

struct CorpusSpec {
    std::size_t size = 0;        // total windows; must be even and >= 2
    int horizon = 1;
    int history_length = 10;
    std::uint64_t seed = 0;
    std::size_t burn_in = kDefaultBurnIn;
    std::size_t orbit_budget = 0;  // max sliding steps; 0 = max(2e6, 500*size)
};

// Slides a stride-1 window along one orbit and rejection-samples until each
// class holds exactly size/2 windows. Throws ClassStarvationError when the
// budget runs out with a class quota unfilled.
Corpus build_corpus(const CorpusSpec& spec, const MapParameters& mp, const Threshold& thr);

// Windows span orbit indices [end-(N-1), end+T]; two corpora are structurally
// disjoint when they come from different orbit streams or their index ranges
// cannot overlap.
bool corpora_disjoint(const Corpus& a, const Corpus& b);

struct Standardizer {
    std::vector<double> mean;   // per feature, dimension 2N
    std::vector<double> scale;  // per feature, > 0

    std::size_t dim() const { return mean.size(); }
};

// Per-feature mean and standard deviation over the flattened 2N-dimensional
// representation. Fitted on training data only.
Standardizer fit_standardizer(const Corpus& corpus);

// identity transform of the given dimension
Standardizer identity_standardizer(std::size_t dim);

// Flattening order: (x_{n-(N-1)}, y_{n-(N-1)}, ..., x_n, y_n), then standardized.
void vectorize(std::span<const StatePoint> window, const Standardizer& std_, std::span<double> out);

struct FeatureSet {
    std::size_t count = 0;
    std::size_t dim = 0;
    std::vector<double> features;  // count * dim, row-major
    std::vector<std::uint8_t> labels;

    std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }
};

FeatureSet vectorize_corpus(const Corpus& corpus, const Standardizer& std_);

// columns: seed, horizon, N, 2N raw feature columns, label
void write_corpus_csv(const std::string& path, const Corpus& corpus);

}  // namespace henon

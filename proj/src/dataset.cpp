#include "henon/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace henon {

bool Corpus::balanced() const {
    std::size_t true_count = 0;
    for (const auto l : labels) true_count += l;
    return 2 * true_count == size();
}

namespace {

// Ring of the last history_length + horizon points; the window is the first N
// entries, the label point the last.
class SlidingWindow {
public:
    SlidingWindow(int history_length, int horizon)
        : span_(static_cast<std::size_t>(history_length) + static_cast<std::size_t>(horizon)),
          buffer_(span_) {}

    void push(const StatePoint& p) {
        buffer_[head_] = p;
        head_ = (head_ + 1) % span_;
        if (filled_ < span_) ++filled_;
    }

    bool full() const { return filled_ == span_; }

    // k-th oldest buffered point, k in [0, span)
    const StatePoint& at(std::size_t k) const { return buffer_[(head_ + k) % span_]; }

private:
    std::size_t span_;
    std::vector<StatePoint> buffer_;
    std::size_t head_ = 0;
    std::size_t filled_ = 0;
};

}  // namespace

Corpus build_corpus(const CorpusSpec& spec, const MapParameters& mp, const Threshold& thr) {
    if (spec.size < 2 || spec.size % 2 != 0) throw ConfigError("corpus size must be even and >= 2");
    if (spec.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (spec.history_length < 1) throw ConfigError("history length must be >= 1");

    const std::size_t budget =
        spec.orbit_budget > 0 ? spec.orbit_budget
                              : std::max<std::size_t>(2'000'000, 500 * spec.size);
    const std::size_t n = static_cast<std::size_t>(spec.history_length);
    const std::size_t quota = spec.size / 2;

    Corpus corpus;
    corpus.horizon = spec.horizon;
    corpus.history_length = spec.history_length;
    corpus.orbit_seed = spec.seed;
    corpus.points.reserve(spec.size * n);
    corpus.labels.reserve(spec.size);
    corpus.end_indices.reserve(spec.size);

    std::mt19937_64 rng(derive_seed(spec.seed, SeedPurpose::orbit));

    std::size_t have_true = 0, have_false = 0;
    for (int attempt = 0; attempt < kMaxSeedRetries; ++attempt) {
        StatePoint p{uniform_range(rng, -0.1, 0.1), uniform_range(rng, -0.1, 0.1)};
        SlidingWindow window(spec.history_length, spec.horizon);
        bool escaped_run = false;

        std::uint64_t index = 0;  // orbit index of the most recent point
        std::size_t steps = 0;
        while (steps < budget && (have_true < quota || have_false < quota)) {
            p = map_forward(p, mp);
            ++index;
            if (escaped(p)) {
                escaped_run = true;
                break;
            }
            if (index <= spec.burn_in) continue;
            window.push(p);
            if (!window.full()) continue;

            ++steps;
            const bool label = window.at(n - 1 + static_cast<std::size_t>(spec.horizon)).y >= thr.theta;
            std::size_t& have = label ? have_true : have_false;
            if (have == quota) continue;
            ++have;
            for (std::size_t k = 0; k < n; ++k) corpus.points.push_back(window.at(k));
            corpus.labels.push_back(label ? 1 : 0);
            corpus.end_indices.push_back(index - static_cast<std::uint64_t>(spec.horizon));
        }

        if (escaped_run) {
            // escaped during burn-in; retry from a fresh seed (post-burn-in escape
            // does not happen at the default parameters)
            have_true = have_false = 0;
            corpus.points.clear();
            corpus.labels.clear();
            corpus.end_indices.clear();
            continue;
        }
        if (have_true < quota) throw ClassStarvationError(true, have_true, quota);
        if (have_false < quota) throw ClassStarvationError(false, have_false, quota);
        return corpus;
    }
    throw OrbitEscapeError("corpus orbit: no seed survived the retry budget");
}

bool corpora_disjoint(const Corpus& a, const Corpus& b) {
    if (a.orbit_seed != b.orbit_seed) return true;
    if (a.size() == 0 || b.size() == 0) return true;
    // window i occupies orbit indices [end - (N-1), end + T]
    auto range = [](const Corpus& c) {
        const auto [lo_it, hi_it] = std::minmax_element(c.end_indices.begin(), c.end_indices.end());
        const std::uint64_t lo = *lo_it - static_cast<std::uint64_t>(c.history_length - 1);
        const std::uint64_t hi = *hi_it + static_cast<std::uint64_t>(c.horizon);
        return std::pair{lo, hi};
    };
    const auto [a_lo, a_hi] = range(a);
    const auto [b_lo, b_hi] = range(b);
    return a_hi < b_lo || b_hi < a_lo;
}

Standardizer fit_standardizer(const Corpus& corpus) {
    if (corpus.size() == 0) throw ConfigError("cannot fit standardizer on empty corpus");
    const std::size_t dim = 2 * static_cast<std::size_t>(corpus.history_length);
    const std::size_t count = corpus.size();

    Standardizer std_;
    std_.mean.assign(dim, 0.0);
    std_.scale.assign(dim, 0.0);

    for (std::size_t i = 0; i < count; ++i) {
        const auto w = corpus.window(i);
        for (std::size_t k = 0; k < w.size(); ++k) {
            std_.mean[2 * k] += w[k].x;
            std_.mean[2 * k + 1] += w[k].y;
        }
    }
    for (auto& m : std_.mean) m /= static_cast<double>(count);

    for (std::size_t i = 0; i < count; ++i) {
        const auto w = corpus.window(i);
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double dx = w[k].x - std_.mean[2 * k];
            const double dy = w[k].y - std_.mean[2 * k + 1];
            std_.scale[2 * k] += dx * dx;
            std_.scale[2 * k + 1] += dy * dy;
        }
    }
    for (auto& s : std_.scale) {
        s = std::sqrt(s / static_cast<double>(count));
        if (!(s > 1e-12)) {
            throw ConfigError("zero-variance feature: degenerate corpus");
        }
    }
    return std_;
}

Standardizer identity_standardizer(std::size_t dim) {
    Standardizer std_;
    std_.mean.assign(dim, 0.0);
    std_.scale.assign(dim, 1.0);
    return std_;
}

void vectorize(std::span<const StatePoint> window, const Standardizer& std_, std::span<double> out) {
    if (out.size() != 2 * window.size() || std_.dim() != out.size()) {
        throw ConfigError("vectorize: dimension mismatch");
    }
    for (std::size_t k = 0; k < window.size(); ++k) {
        out[2 * k] = (window[k].x - std_.mean[2 * k]) / std_.scale[2 * k];
        out[2 * k + 1] = (window[k].y - std_.mean[2 * k + 1]) / std_.scale[2 * k + 1];
    }
}

FeatureSet vectorize_corpus(const Corpus& corpus, const Standardizer& std_) {
    FeatureSet set;
    set.count = corpus.size();
    set.dim = 2 * static_cast<std::size_t>(corpus.history_length);
    set.features.resize(set.count * set.dim);
    set.labels = corpus.labels;
    for (std::size_t i = 0; i < set.count; ++i) {
        vectorize(corpus.window(i), std_, {set.features.data() + i * set.dim, set.dim});
    }
    return set;
}

void write_corpus_csv(const std::string& path, const Corpus& corpus) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open " + path);
    out << "seed,horizon,N";
    for (int k = 0; k < corpus.history_length; ++k) out << ",x" << k << ",y" << k;
    out << ",label\n";
    out.precision(17);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        out << corpus.orbit_seed << ',' << corpus.horizon << ',' << corpus.history_length;
        for (const auto& p : corpus.window(i)) out << ',' << p.x << ',' << p.y;
        out << ',' << int(corpus.labels[i]) << '\n';
    }
}

}  // namespace henon

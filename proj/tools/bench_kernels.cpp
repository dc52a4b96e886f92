// Times the OpenMP kernels against their serial reference implementations and
// reports training throughput. Results double as a sanity check that the
// parallel paths return identical output.

#include <chrono>
#include <cstdio>

#include "henon/experiments.hpp"

using namespace henon;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto start = std::chrono::steady_clock::now();
        f();
        best = std::min(best, seconds_since(start));
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-28s serial %8.3f ms   parallel %8.3f ms   speedup %4.2fx   %s\n", name,
                1e3 * serial_s, 1e3 * parallel_s, serial_s / parallel_s,
                identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
    const MapParameters mp;
    const Threshold thr;

    // oracle labeling over one long orbit
    {
        std::mt19937_64 rng(derive_seed(1, SeedPurpose::orbit));
        const Orbit orbit = generate_attractor_orbit(rng, 1'000'000, kDefaultBurnIn, mp);
        std::vector<std::uint8_t> par(orbit.points.size()), ser(orbit.points.size());
        const double t_par =
            time_best_of(3, [&] { label_points(orbit.points, 8, thr, mp, par); });
        const double t_ser =
            time_best_of(3, [&] { serial::label_points(orbit.points, 8, thr, mp, ser); });
        report("label_points (1e6, T=8)", t_ser, t_par, par == ser);
    }

    // nearest opposite-label distances
    {
        const ClassMap reference = class_map(4, 100'000, mp, thr, 5);
        const ClassMap queries = class_map(4, 4'000, mp, thr, 6);
        std::vector<double> par, ser;
        const double t_par = time_best_of(3, [&] {
            par = nearest_opposite_distances(queries.points, queries.labels, reference.points,
                                             reference.labels);
        });
        const double t_ser = time_best_of(3, [&] {
            ser = serial::nearest_opposite_distances(queries.points, queries.labels,
                                                     reference.points, reference.labels);
        });
        report("nearest_opposite (4k x 100k)", t_ser, t_par, par == ser);
    }

    // batch evaluation of the reference network
    {
        CorpusSpec cspec;
        cspec.size = 200'000;
        cspec.horizon = 4;
        cspec.history_length = 10;
        cspec.seed = 9;
        const Corpus corpus = build_corpus(cspec, mp, thr);
        const FeatureSet set = vectorize_corpus(corpus, fit_standardizer(corpus));
        const NetworkParameters params = initialize_parameters(baseline_topology(10), 7);
        double acc_par = 0.0, acc_ser = 0.0;
        const double t_par = time_best_of(3, [&] { acc_par = evaluate_accuracy(params, set); });
        const double t_ser =
            time_best_of(3, [&] { acc_ser = serial::evaluate_accuracy(params, set); });
        report("evaluate_accuracy (2e5)", t_ser, t_par, acc_par == acc_ser);
    }

    // single-threaded training throughput (the sweep engine parallelizes
    // across cells, so per-run training stays serial and deterministic)
    {
        CorpusSpec cspec;
        cspec.size = 10'000;
        cspec.horizon = 4;
        cspec.history_length = 10;
        cspec.seed = 10;
        const Corpus corpus = build_corpus(cspec, mp, thr);
        const FeatureSet set = vectorize_corpus(corpus, fit_standardizer(corpus));
        TrainingConfig config;
        config.epochs = 20;
        config.seed = 3;
        const auto start = std::chrono::steady_clock::now();
        train(baseline_topology(10), set, config);
        const double secs = seconds_since(start);
        std::printf("%-28s %8.3f s for %d epochs x %zu samples (%.2f us/sample-visit)\n",
                    "train (baseline net)", secs, config.epochs, set.count,
                    1e6 * secs / (static_cast<double>(config.epochs) * set.count));
    }
    return 0;
}

#include "henon/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace henon {

Profile paper_profile() { return {"paper", 5000, 1'000'000}; }
Profile desk_profile() { return {"desk", 500, 100'000}; }

RunOutcome run_single(const RunSpec& spec, bool keep_artifacts) {
    validate_topology(spec.topology);
    if (spec.topology.input_dim() != 2 * spec.history_length) {
        throw ConfigError("topology input layer must have width 2N");
    }

    RunOutcome outcome;
    outcome.train_data_seed = derive_seed(spec.seed, SeedPurpose::train_data);
    outcome.test_data_seed =
        spec.test_seed != 0 ? spec.test_seed : derive_seed(spec.seed, SeedPurpose::test_data);

    CorpusSpec train_spec;
    train_spec.size = spec.n_train;
    train_spec.horizon = spec.horizon;
    train_spec.history_length = spec.history_length;
    train_spec.seed = outcome.train_data_seed;
    const Corpus train_corpus = build_corpus(train_spec, spec.map, spec.threshold);

    CorpusSpec test_spec = train_spec;
    test_spec.size = spec.test_size;
    test_spec.seed = outcome.test_data_seed;
    Corpus test_corpus = build_corpus(test_spec, spec.map, spec.threshold);

    const Standardizer standardizer = fit_standardizer(train_corpus);
    const FeatureSet train_set = vectorize_corpus(train_corpus, standardizer);
    const FeatureSet test_set = vectorize_corpus(test_corpus, standardizer);

    TrainingConfig config = spec.config;
    config.seed = spec.seed;
    TrainResult trained = train(spec.topology, train_set, config);

    outcome.accuracy = evaluate_accuracy(trained.params, test_set);
    outcome.final_train_loss = trained.epoch_loss.empty() ? 0.0 : trained.epoch_loss.back();
    if (keep_artifacts) {
        outcome.params = std::move(trained.params);
        outcome.standardizer = standardizer;
        outcome.test_corpus = std::move(test_corpus);
    }
    return outcome;
}

double reevaluate(const RunSpec& spec, const NetworkParameters& params,
                  const Standardizer& standardizer) {
    CorpusSpec test_spec;
    test_spec.size = spec.test_size;
    test_spec.horizon = spec.horizon;
    test_spec.history_length = spec.history_length;
    test_spec.seed = spec.test_seed != 0 ? spec.test_seed : derive_seed(spec.seed, SeedPurpose::test_data);
    const Corpus test_corpus = build_corpus(test_spec, spec.map, spec.threshold);
    const FeatureSet test_set = vectorize_corpus(test_corpus, standardizer);
    return evaluate_accuracy(params, test_set);
}

namespace {

// cells are enumerated in a fixed order and executed by a dynamic work queue;
// results land in their slot, so output never depends on the job count
void run_cells(std::vector<SweepCell>& cells, const SweepSpec& spec,
               const std::function<NetworkTopology(const SweepCell&)>& topology_for) {
    const std::int64_t n = static_cast<std::int64_t>(cells.size());
#ifdef _OPENMP
    const int jobs = spec.jobs > 0 ? spec.jobs : omp_get_max_threads();
#else
    const int jobs = 1;
    (void)jobs;
#endif
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
    for (std::int64_t i = 0; i < n; ++i) {
        SweepCell& cell = cells[static_cast<std::size_t>(i)];
        RunSpec run;
        run.horizon = cell.horizon;
        run.history_length = cell.history_length;
        run.n_train = cell.training_size;
        run.test_size = spec.test_size;
        run.topology = topology_for(cell);
        run.config = spec.config;
        run.map = spec.map;
        run.threshold = spec.threshold;
        run.seed = cell.seed;
        run.test_seed = cell.test_seed;
        try {
            RunOutcome outcome = run_single(run, spec.keep_params);
            cell.accuracy = outcome.accuracy;
            cell.final_loss = outcome.final_train_loss;
            cell.ok = true;
            if (spec.keep_params) {
                cell.params = std::move(outcome.params);
                cell.standardizer = std::move(outcome.standardizer);
            }
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
    }
}

std::uint64_t cell_seed(const SweepSpec& spec, std::uint64_t axis_a, std::uint64_t axis_b,
                        int horizon, int repeat) {
    return derive_seed(spec.master_seed, SeedPurpose::sweep_cell,
                       splitmix64(axis_a ^ splitmix64(axis_b)),
                       static_cast<std::uint64_t>(horizon), static_cast<std::uint64_t>(repeat));
}

// repeats at the same horizon share one held-out corpus, like a fixed test set
std::uint64_t shared_test_seed(const SweepSpec& spec, int horizon, int history_length) {
    return derive_seed(spec.master_seed, SeedPurpose::test_data,
                       static_cast<std::uint64_t>(horizon),
                       static_cast<std::uint64_t>(history_length), spec.test_size);
}

}  // namespace

SweepResult accuracy_curve(const SweepSpec& spec) {
    if (spec.horizons.empty() || spec.training_sizes.empty() || spec.repeats < 1) {
        throw ConfigError("accuracy_curve: empty sweep axes");
    }
    SweepResult result;
    result.kind = SweepKind::training_size;
    for (const std::size_t size : spec.training_sizes) {
        for (const int horizon : spec.horizons) {
            for (int repeat = 0; repeat < spec.repeats; ++repeat) {
                SweepCell cell;
                cell.horizon = horizon;
                cell.training_size = size;
                cell.history_length = spec.history_length;
                cell.repeat = repeat;
                cell.seed = cell_seed(spec, size, 0, horizon, repeat);
                cell.test_seed = shared_test_seed(spec, horizon, spec.history_length);
                result.cells.push_back(cell);
            }
        }
    }
    const NetworkTopology topology = baseline_topology(spec.history_length);
    run_cells(result.cells, spec, [&](const SweepCell&) { return topology; });
    return result;
}

SweepResult topology_sweep(const SweepSpec& spec) {
    if (spec.horizons.empty() || spec.l_values.empty() || spec.repeats < 1) {
        throw ConfigError("topology_sweep: empty sweep axes");
    }
    SweepResult result;
    result.kind = SweepKind::topology;
    for (const int l : spec.l_values) {
        for (const int horizon : spec.horizons) {
            for (int repeat = 0; repeat < spec.repeats; ++repeat) {
                SweepCell cell;
                cell.horizon = horizon;
                cell.training_size = spec.n_train;
                cell.l_value = l;
                cell.history_length = spec.history_length;
                cell.repeat = repeat;
                cell.seed = cell_seed(spec, static_cast<std::uint64_t>(l), 1, horizon, repeat);
                cell.test_seed = shared_test_seed(spec, horizon, spec.history_length);
                result.cells.push_back(cell);
            }
        }
    }
    run_cells(result.cells, spec,
              [&](const SweepCell& c) { return topology_family(c.l_value, c.history_length); });
    return result;
}

SweepResult history_sweep(const SweepSpec& spec) {
    if (spec.horizons.empty() || spec.history_lengths.empty() || spec.training_sizes.empty() ||
        spec.repeats < 1) {
        throw ConfigError("history_sweep: empty sweep axes");
    }
    SweepResult result;
    result.kind = SweepKind::history;
    for (const int n : spec.history_lengths) {
        for (const std::size_t size : spec.training_sizes) {
            for (const int horizon : spec.horizons) {
                for (int repeat = 0; repeat < spec.repeats; ++repeat) {
                    SweepCell cell;
                    cell.horizon = horizon;
                    cell.training_size = size;
                    cell.history_length = n;
                    cell.repeat = repeat;
                    cell.seed = cell_seed(spec, static_cast<std::uint64_t>(n), size, horizon, repeat);
                    cell.test_seed = shared_test_seed(spec, horizon, n);
                    result.cells.push_back(cell);
                }
            }
        }
    }
    run_cells(result.cells, spec,
              [&](const SweepCell& c) { return baseline_topology(c.history_length); });
    return result;
}

std::vector<std::pair<int, double>> SweepResult::mean_curve(
    std::optional<std::size_t> training_size, std::optional<int> l_value,
    std::optional<int> history_length) const {
    std::vector<std::pair<int, double>> curve;
    std::vector<int> horizons;
    for (const auto& cell : cells) {
        if (training_size && cell.training_size != *training_size) continue;
        if (l_value && cell.l_value != *l_value) continue;
        if (history_length && cell.history_length != *history_length) continue;
        if (std::find(horizons.begin(), horizons.end(), cell.horizon) == horizons.end()) {
            horizons.push_back(cell.horizon);
        }
    }
    std::sort(horizons.begin(), horizons.end());
    for (const int t : horizons) {
        double sum = 0.0;
        int count = 0;
        for (const auto& cell : cells) {
            if (!cell.ok || cell.horizon != t) continue;
            if (training_size && cell.training_size != *training_size) continue;
            if (l_value && cell.l_value != *l_value) continue;
            if (history_length && cell.history_length != *history_length) continue;
            sum += cell.accuracy;
            ++count;
        }
        if (count > 0) curve.emplace_back(t, sum / count);
    }
    return curve;
}

Crossing crossing_time(const std::vector<std::pair<int, double>>& curve, double level) {
    if (curve.empty()) throw ConfigError("crossing_time: empty curve");
    auto sorted = curve;
    std::sort(sorted.begin(), sorted.end());

    Crossing crossing;
    bool any_above = false;
    for (const auto& [t, acc] : sorted) {
        if (acc >= level) {
            crossing.t_star = t;
            any_above = true;
        }
    }
    if (!any_above) {
        crossing.coverage = Crossing::Coverage::below_range;
        crossing.t_star.reset();
    } else if (sorted.back().second >= level) {
        // never falls below the level inside the swept range
        crossing.coverage = Crossing::Coverage::above_range;
        crossing.t_star.reset();
    } else {
        crossing.coverage = Crossing::Coverage::crossed;
    }
    return crossing;
}

CrossingFit fit_exponential(const std::vector<std::pair<int, double>>& points) {
    if (points.size() < 3) throw ConfigError("fit_exponential: need at least 3 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [t, value] : points) {
        if (!(value > 0.0)) throw ConfigError("fit_exponential: values must be positive");
        sx += t;
        sy += std::log(value);
    }
    const double n = static_cast<double>(points.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [t, value] : points) {
        const double dx = t - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(value) - my);
    }
    if (sxx == 0.0) {
        throw ConfigError("fit_exponential: degenerate abscissa (all T* equal)");
    }

    CrossingFit fit;
    fit.n_points = points.size();
    fit.rate = sxy / sxx;
    fit.prefactor = std::exp(my - fit.rate * mx);
    fit.entropy_ratio = fit.rate / kTopologicalEntropy;
    fit.two_entropy_ratio = fit.rate / (2.0 * kTopologicalEntropy);
    return fit;
}

NetworkTopology topology_family(int l_value, int history_length) {
    if (l_value < 1) throw ConfigError("topology family needs L >= 1");
    NetworkTopology topology;
    topology.widths.push_back(2 * history_length);
    for (int i = 0; i < l_value; ++i) topology.widths.push_back(32);
    topology.widths.push_back(16);
    topology.widths.push_back(7);
    topology.widths.push_back(2);
    return topology;
}

std::vector<Misclassification> misclassifications_from_predictions(
    const Corpus& corpus, std::span<const std::uint8_t> predicted) {
    if (predicted.size() != corpus.size()) throw ConfigError("prediction count mismatch");
    std::vector<Misclassification> misses;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (predicted[i] == corpus.labels[i]) continue;
        misses.push_back({corpus.leading_point(i), predicted[i] != 0, corpus.labels[i] != 0});
    }
    return misses;
}

std::vector<Misclassification> misclassification_map(const NetworkParameters& params,
                                                     const Corpus& test_corpus,
                                                     const Standardizer& standardizer) {
    const FeatureSet set = vectorize_corpus(test_corpus, standardizer);
    const auto predictions = predict(params, set);
    return misclassifications_from_predictions(test_corpus, predictions);
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open " + path);
    switch (result.kind) {
        case SweepKind::training_size:
            out << "T,N_T,repeat,seed,accuracy,status\n";
            break;
        case SweepKind::topology:
            out << "T,L,repeat,seed,accuracy,status\n";
            break;
        case SweepKind::history:
            out << "T,N,N_T,repeat,seed,accuracy,status\n";
            break;
    }
    out.precision(17);
    for (const auto& cell : result.cells) {
        out << cell.horizon << ',';
        if (result.kind == SweepKind::training_size) {
            out << cell.training_size << ',';
        } else if (result.kind == SweepKind::topology) {
            out << cell.l_value << ',';
        } else {
            out << cell.history_length << ',' << cell.training_size << ',';
        }
        out << cell.repeat << ',' << cell.seed << ',' << cell.accuracy << ','
            << (cell.ok ? "ok" : "failed") << '\n';
    }
}

void write_misclassification_csv(const std::string& path,
                                 const std::vector<Misclassification>& misses) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open " + path);
    out << "x,y,predicted,actual\n";
    out.precision(17);
    for (const auto& miss : misses) {
        out << miss.point.x << ',' << miss.point.y << ',' << int(miss.predicted) << ','
            << int(miss.actual) << '\n';
    }
}

}  // namespace henon

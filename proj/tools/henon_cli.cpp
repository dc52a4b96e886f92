// Command-line harness: data generation, geometry exports, trainings, sweeps,
// and run-record verification. Every artifact-producing command writes a
// record JSON sufficient to reproduce and check its output.

#include <bit>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "henon/run_record.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace henon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitStarved = 4;
constexpr int kExitIO = 5;
constexpr int kExitEscape = 6;
constexpr int kExitVerifyFailed = 7;

std::string default_out_dir() {
    if (const char* env = std::getenv("HENON_OUT_DIR")) return env;
    return ".";
}

void apply_profile(RunSpec& spec, const std::string& profile, bool epochs_explicit,
                   bool test_size_explicit) {
    const Profile p = (profile == "desk") ? desk_profile() : paper_profile();
    if (!epochs_explicit) spec.config.epochs = p.epochs;
    if (!test_size_explicit) spec.test_size = p.test_size;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

// ---------------------------------------------------------------- orbit ----

struct OrbitArgs {
    std::size_t length = 1000;
    std::size_t burn_in = kDefaultBurnIn;
    std::uint64_t seed = 1;
    double a = 1.4, b = 0.3;
    bool explicit_start = false;
    double x0 = 0.0, y0 = 0.0;
    std::string out;
};

void write_orbit_csv(const std::string& path, const Orbit& orbit) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open " + path);
    out << "x,y\n";
    out.precision(17);
    for (const auto& p : orbit.points) out << p.x << ',' << p.y << '\n';
}

Orbit derive_orbit(const OrbitArgs& args) {
    const MapParameters mp{args.a, args.b};
    if (args.explicit_start) {
        return generate_orbit({args.x0, args.y0}, args.length, args.burn_in, mp);
    }
    std::mt19937_64 rng(derive_seed(args.seed, SeedPurpose::orbit));
    return generate_attractor_orbit(rng, args.length, args.burn_in, mp);
}

int cmd_orbit(const OrbitArgs& args) {
    const Orbit orbit = derive_orbit(args);
    write_orbit_csv(args.out, orbit);

    RunRecord record;
    record.kind = "orbit";
    record.timestamp = current_timestamp();
    record.artifact_path = args.out;
    record.artifact_hash = fnv1a_file(args.out);
    record.extra = {{"length", args.length},   {"burn_in", args.burn_in},
                    {"seed", args.seed},       {"a", args.a},
                    {"b", args.b},             {"explicit_start", args.explicit_start},
                    {"x0", args.x0},           {"y0", args.y0}};
    save_run_record(args.out + ".record.json", record);

    std::cout << "orbit: " << orbit.points.size() << " points -> " << args.out << "\n";
    return kExitOk;
}

// ------------------------------------------------------------- geometry ----

struct GeometryArgs {
    std::string mode = "classmap";
    int horizon = 4;
    int depth = 4;
    std::size_t points = 100000;
    int samples = 1024;
    double segment_cap = 0.02;
    std::uint64_t seed = 1;
    double a = 1.4, b = 0.3, theta = 0.3;
    std::string out;
};

void derive_geometry(const GeometryArgs& args, const std::string& out_path) {
    const MapParameters mp{args.a, args.b};
    const Threshold thr{args.theta};
    if (args.mode == "classmap") {
        write_classmap_csv(out_path, class_map(args.horizon, args.points, mp, thr, args.seed));
    } else if (args.mode == "preimages") {
        CurveTraceOptions opt;
        opt.samples_per_curve = args.samples;
        opt.max_segment_length = args.segment_cap;
        write_curves_csv(out_path, preimage_curves(args.depth, mp, thr, opt));
    } else {
        throw ConfigError("unknown geometry mode: " + args.mode);
    }
}

int cmd_geometry(const GeometryArgs& args) {
    derive_geometry(args, args.out);

    RunRecord record;
    record.kind = "geometry";
    record.timestamp = current_timestamp();
    record.artifact_path = args.out;
    record.artifact_hash = fnv1a_file(args.out);
    record.extra = {{"mode", args.mode},     {"horizon", args.horizon},
                    {"depth", args.depth},   {"points", args.points},
                    {"samples", args.samples}, {"segment_cap", args.segment_cap},
                    {"seed", args.seed},     {"a", args.a},
                    {"b", args.b},           {"theta", args.theta}};
    save_run_record(args.out + ".record.json", record);

    std::cout << "geometry " << args.mode << " -> " << args.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- train ----

RunSpec spec_from_config(const json& config, std::string& profile, const std::string& profile_flag) {
    RunSpec spec;
    spec.horizon = config.value("horizon", 1);
    spec.history_length = config.value("history_length", 10);
    spec.n_train = config.value("n_train", std::size_t{10000});
    spec.seed = config.value("seed", std::uint64_t{1});
    spec.test_seed = config.value("test_seed", std::uint64_t{0});
    if (config.contains("map")) {
        spec.map.a = config["map"].value("a", 1.4);
        spec.map.b = config["map"].value("b", 0.3);
    }
    spec.threshold.theta = config.value("threshold", 0.3);

    if (config.contains("topology")) {
        spec.topology.widths = config["topology"].get<std::vector<int>>();
    } else if (config.contains("l_family")) {
        spec.topology = topology_family(config["l_family"].get<int>(), spec.history_length);
    } else {
        spec.topology = baseline_topology(spec.history_length);
    }

    bool epochs_explicit = false;
    if (config.contains("training")) {
        const auto& t = config["training"];
        spec.config.batch_size = t.value("batch_size", 128);
        epochs_explicit = t.contains("epochs");
        if (epochs_explicit) spec.config.epochs = t["epochs"].get<int>();
        spec.config.train_biases = t.value("train_biases", true);
        if (t.contains("adam")) {
            const auto& adam = t["adam"];
            spec.config.adam.alpha = adam.value("alpha", 1e-3);
            spec.config.adam.beta1 = adam.value("beta1", 0.9);
            spec.config.adam.beta2 = adam.value("beta2", 0.999);
            spec.config.adam.epsilon = adam.value("epsilon", 1e-8);
        }
    }
    const bool test_size_explicit = config.contains("test_size");
    if (test_size_explicit) spec.test_size = config["test_size"].get<std::size_t>();

    profile = profile_flag.empty() ? config.value("profile", "paper") : profile_flag;
    if (profile != "desk" && profile != "paper") {
        throw ConfigError("unknown profile: " + profile);
    }
    apply_profile(spec, profile, epochs_explicit, test_size_explicit);
    return spec;
}

int cmd_train(const std::string& config_path, const std::string& profile_flag,
              const std::string& out_dir, const std::string& name) {
    const json config = load_json_file(config_path);
    std::string profile;
    const RunSpec spec = spec_from_config(config, profile, profile_flag);

    const RunOutcome outcome = run_single(spec, true);

    fs::create_directories(out_dir);
    const std::string checkpoint_path = (fs::path(out_dir) / (name + ".ckpt")).string();
    const std::string record_path = (fs::path(out_dir) / (name + ".record.json")).string();

    Checkpoint checkpoint;
    checkpoint.spec = spec;
    checkpoint.spec.test_seed = outcome.test_data_seed;
    checkpoint.profile = profile;
    checkpoint.params = outcome.params;
    checkpoint.standardizer = outcome.standardizer;
    save_checkpoint(checkpoint_path, checkpoint);

    RunRecord record;
    record.kind = "train";
    record.timestamp = current_timestamp();
    record.profile = profile;
    record.spec = checkpoint.spec;
    record.accuracy = outcome.accuracy;
    record.accuracy_bits = std::bit_cast<std::uint64_t>(outcome.accuracy);
    record.final_train_loss = outcome.final_train_loss;
    record.standardizer = outcome.standardizer;
    record.checkpoint_path = checkpoint_path;
    save_run_record(record_path, record);

    std::cout << "train: accuracy " << outcome.accuracy << " (T=" << spec.horizon
              << ", N_T=" << spec.n_train << ", profile " << profile << ")\n"
              << "  checkpoint: " << checkpoint_path << "\n  record: " << record_path << "\n";
    return kExitOk;
}

// ------------------------------------------------------------- evaluate ----

int cmd_evaluate(const std::string& checkpoint_path, std::size_t test_size_override,
                 std::uint64_t test_seed_override, const std::string& misclass_out) {
    const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
    RunSpec spec = checkpoint.spec;
    if (test_size_override > 0) spec.test_size = test_size_override;
    if (test_seed_override != 0) spec.test_seed = test_seed_override;

    CorpusSpec test_spec;
    test_spec.size = spec.test_size;
    test_spec.horizon = spec.horizon;
    test_spec.history_length = spec.history_length;
    test_spec.seed = spec.test_seed != 0 ? spec.test_seed : derive_seed(spec.seed, SeedPurpose::test_data);
    const Corpus test_corpus = build_corpus(test_spec, spec.map, spec.threshold);
    const FeatureSet test_set = vectorize_corpus(test_corpus, checkpoint.standardizer);
    const double accuracy = evaluate_accuracy(checkpoint.params, test_set);

    std::cout << "evaluate: accuracy " << accuracy << " on " << test_set.count << " samples\n";
    if (!misclass_out.empty()) {
        const auto misses = misclassification_map(checkpoint.params, test_corpus,
                                                  checkpoint.standardizer);
        write_misclassification_csv(misclass_out, misses);
        std::cout << "  misclassifications: " << misses.size() << " -> " << misclass_out << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------- sweep ----

SweepSpec sweep_spec_from_json(const json& config, std::string& profile,
                               const std::string& profile_flag) {
    SweepSpec spec;
    const std::string kind = config.value("kind", "training_size");
    if (kind == "training_size") {
        spec.kind = SweepKind::training_size;
    } else if (kind == "topology") {
        spec.kind = SweepKind::topology;
    } else if (kind == "history") {
        spec.kind = SweepKind::history;
    } else {
        throw ConfigError("unknown sweep kind: " + kind);
    }
    spec.horizons = config.value("horizons", std::vector<int>{});
    // desk-scale default axis when a size sweep does not pick its own
    spec.training_sizes = config.value(
        "training_sizes", std::vector<std::size_t>{1000, 5000, 10000, 50000});
    spec.l_values = config.value("l_values", std::vector<int>{});
    spec.history_lengths = config.value("history_lengths", std::vector<int>{});
    spec.repeats = config.value("repeats", 3);
    spec.history_length = config.value("history_length", 10);
    spec.n_train = config.value("n_train", std::size_t{100000});
    spec.master_seed = config.value("seed", std::uint64_t{1});
    if (config.contains("map")) {
        spec.map.a = config["map"].value("a", 1.4);
        spec.map.b = config["map"].value("b", 0.3);
    }
    spec.threshold.theta = config.value("threshold", 0.3);

    bool epochs_explicit = false;
    if (config.contains("training")) {
        const auto& t = config["training"];
        spec.config.batch_size = t.value("batch_size", 128);
        epochs_explicit = t.contains("epochs");
        if (epochs_explicit) spec.config.epochs = t["epochs"].get<int>();
        spec.config.train_biases = t.value("train_biases", true);
        if (t.contains("adam")) {
            const auto& adam = t["adam"];
            spec.config.adam.alpha = adam.value("alpha", 1e-3);
            spec.config.adam.beta1 = adam.value("beta1", 0.9);
            spec.config.adam.beta2 = adam.value("beta2", 0.999);
            spec.config.adam.epsilon = adam.value("epsilon", 1e-8);
        }
    }

    profile = profile_flag.empty() ? config.value("profile", "paper") : profile_flag;
    const Profile p = (profile == "desk") ? desk_profile() : paper_profile();
    if (!epochs_explicit) spec.config.epochs = p.epochs;
    spec.test_size = config.contains("test_size") ? config["test_size"].get<std::size_t>()
                                                  : p.test_size;
    return spec;
}

json crossing_to_json(const Crossing& crossing) {
    json j;
    switch (crossing.coverage) {
        case Crossing::Coverage::crossed:
            j["t_star"] = *crossing.t_star;
            j["coverage"] = "crossed";
            break;
        case Crossing::Coverage::above_range:
            j["t_star"] = nullptr;
            j["coverage"] = "above_range";
            break;
        case Crossing::Coverage::below_range:
            j["t_star"] = nullptr;
            j["coverage"] = "below_range";
            break;
    }
    return j;
}

json fit_to_json(const CrossingFit& fit) {
    return {{"prefactor", fit.prefactor},
            {"rate", fit.rate},
            {"n_points", fit.n_points},
            {"entropy_reference", kTopologicalEntropy},
            {"rate_over_h", fit.entropy_ratio},
            {"rate_over_2h", fit.two_entropy_ratio}};
}

RunSpec cell_run_spec(const SweepSpec& spec, const SweepCell& cell) {
    RunSpec run;
    run.horizon = cell.horizon;
    run.history_length = cell.history_length;
    run.n_train = cell.training_size;
    run.test_size = spec.test_size;
    switch (spec.kind) {
        case SweepKind::topology:
            run.topology = topology_family(cell.l_value, cell.history_length);
            break;
        default:
            run.topology = baseline_topology(cell.history_length);
            break;
    }
    run.config = spec.config;
    run.map = spec.map;
    run.threshold = spec.threshold;
    run.seed = cell.seed;
    run.test_seed = cell.test_seed;
    return run;
}

int cmd_sweep(const std::string& spec_path, const std::string& profile_flag, int jobs,
              const std::string& out_dir) {
    const json config = load_json_file(spec_path);
    std::string profile;
    SweepSpec spec = sweep_spec_from_json(config, profile, profile_flag);
    spec.jobs = jobs;
    spec.keep_params = true;

    SweepResult result;
    switch (spec.kind) {
        case SweepKind::training_size:
            result = accuracy_curve(spec);
            break;
        case SweepKind::topology:
            result = topology_sweep(spec);
            break;
        case SweepKind::history:
            result = history_sweep(spec);
            break;
    }

    fs::create_directories(fs::path(out_dir) / "cells");
    write_sweep_csv((fs::path(out_dir) / "sweep.csv").string(), result);

    // per-cell records + checkpoints
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        const SweepCell& cell = result.cells[i];
        const std::string stem = "cell_" + std::to_string(i);
        const std::string record_path = (fs::path(out_dir) / "cells" / (stem + ".json")).string();

        RunRecord record;
        record.kind = "sweep-cell";
        record.timestamp = current_timestamp();
        record.profile = profile;
        record.spec = cell_run_spec(spec, cell);
        record.accuracy = cell.accuracy;
        record.accuracy_bits = std::bit_cast<std::uint64_t>(cell.accuracy);
        record.final_train_loss = cell.final_loss;
        record.standardizer = cell.standardizer;
        if (cell.ok) {
            const std::string ckpt_path = (fs::path(out_dir) / "cells" / (stem + ".ckpt")).string();
            Checkpoint checkpoint;
            checkpoint.spec = record.spec;
            checkpoint.profile = profile;
            checkpoint.params = cell.params;
            checkpoint.standardizer = cell.standardizer;
            save_checkpoint(ckpt_path, checkpoint);
            record.checkpoint_path = ckpt_path;
        } else {
            record.extra = {{"error", cell.error}};
        }
        save_run_record(record_path, record);
    }

    // summary: mean curves, crossings, exponential fits against h
    json summary;
    summary["kind"] = config.value("kind", "training_size");
    summary["profile"] = profile;
    summary["entropy_reference"] = kTopologicalEntropy;
    summary["level"] = kCrossingLevel;

    if (spec.kind == SweepKind::training_size) {
        std::vector<std::pair<int, double>> fit_points;
        json per_size = json::array();
        for (const std::size_t size : spec.training_sizes) {
            const auto curve = result.mean_curve(size, std::nullopt, std::nullopt);
            const Crossing crossing = crossing_time(curve);
            json entry;
            entry["N_T"] = size;
            entry["mean_curve"] = curve;
            entry["crossing"] = crossing_to_json(crossing);
            per_size.push_back(entry);
            if (crossing.coverage == Crossing::Coverage::crossed) {
                fit_points.emplace_back(*crossing.t_star, static_cast<double>(size));
            }
        }
        summary["per_size"] = per_size;
        if (fit_points.size() >= 3) summary["fit_NT_vs_Tstar"] = fit_to_json(fit_exponential(fit_points));
    } else if (spec.kind == SweepKind::topology) {
        std::vector<std::pair<int, double>> np_points_total, np_points_weights;
        json per_l = json::array();
        for (const int l : spec.l_values) {
            const auto curve = result.mean_curve(std::nullopt, l, std::nullopt);
            const Crossing crossing = crossing_time(curve);
            const ParameterCounts counts = count_parameters(topology_family(l, spec.history_length));
            json entry;
            entry["L"] = l;
            entry["N_p_total"] = counts.total();
            entry["N_p_weights"] = counts.weights;
            entry["mean_curve"] = curve;
            entry["crossing"] = crossing_to_json(crossing);
            per_l.push_back(entry);
            if (crossing.coverage == Crossing::Coverage::crossed) {
                np_points_total.emplace_back(*crossing.t_star, static_cast<double>(counts.total()));
                np_points_weights.emplace_back(*crossing.t_star, static_cast<double>(counts.weights));
            }
        }
        summary["per_L"] = per_l;
        if (np_points_total.size() >= 3) {
            summary["fit_Np_vs_Tstar"] = fit_to_json(fit_exponential(np_points_total));
            summary["fit_Np_weights_vs_Tstar"] = fit_to_json(fit_exponential(np_points_weights));
        }
    } else {
        json per_n = json::array();
        for (const int n : spec.history_lengths) {
            json entry;
            entry["N"] = n;
            std::vector<std::pair<int, double>> fit_points;
            json per_size = json::array();
            for (const std::size_t size : spec.training_sizes) {
                const auto curve = result.mean_curve(size, std::nullopt, n);
                const Crossing crossing = crossing_time(curve);
                json size_entry;
                size_entry["N_T"] = size;
                size_entry["mean_curve"] = curve;
                size_entry["crossing"] = crossing_to_json(crossing);
                per_size.push_back(size_entry);
                if (crossing.coverage == Crossing::Coverage::crossed) {
                    fit_points.emplace_back(*crossing.t_star, static_cast<double>(size));
                }
            }
            entry["per_size"] = per_size;
            if (fit_points.size() >= 3) entry["fit_NT_vs_Tstar"] = fit_to_json(fit_exponential(fit_points));
            per_n.push_back(entry);
        }
        summary["per_N"] = per_n;
    }

    const std::string summary_path = (fs::path(out_dir) / "summary.json").string();
    std::ofstream summary_out(summary_path);
    if (!summary_out) throw std::ios_base::failure("cannot open " + summary_path);
    summary_out << summary.dump(2) << '\n';

    std::size_t failed = 0;
    for (const auto& cell : result.cells) failed += cell.ok ? 0 : 1;
    std::cout << "sweep: " << result.cells.size() << " cells (" << failed << " failed) -> "
              << out_dir << "\n";
    return kExitOk;
}

// --------------------------------------------------------------- verify ----

int cmd_verify(const std::string& record_path, bool retrain) {
    const RunRecord record = load_run_record(record_path);
    bool ok = true;

    if (record.kind == "orbit" || record.kind == "geometry") {
        const fs::path tmp = fs::temp_directory_path() / "henon_verify.csv";
        if (record.kind == "orbit") {
            OrbitArgs args;
            args.length = record.extra.value("length", std::size_t{0});
            args.burn_in = record.extra.value("burn_in", std::size_t{0});
            args.seed = record.extra.value("seed", std::uint64_t{0});
            args.a = record.extra.value("a", 1.4);
            args.b = record.extra.value("b", 0.3);
            args.explicit_start = record.extra.value("explicit_start", false);
            args.x0 = record.extra.value("x0", 0.0);
            args.y0 = record.extra.value("y0", 0.0);
            write_orbit_csv(tmp.string(), derive_orbit(args));
        } else {
            GeometryArgs args;
            args.mode = record.extra.value("mode", "classmap");
            args.horizon = record.extra.value("horizon", 4);
            args.depth = record.extra.value("depth", 4);
            args.points = record.extra.value("points", std::size_t{0});
            args.samples = record.extra.value("samples", 1024);
            args.segment_cap = record.extra.value("segment_cap", 0.02);
            args.seed = record.extra.value("seed", std::uint64_t{0});
            args.a = record.extra.value("a", 1.4);
            args.b = record.extra.value("b", 0.3);
            args.theta = record.extra.value("theta", 0.3);
            derive_geometry(args, tmp.string());
        }
        const std::uint64_t hash = fnv1a_file(tmp.string());
        fs::remove(tmp);
        ok = (hash == record.artifact_hash);
        std::cout << (ok ? "PASS" : "FAIL") << " " << record.kind
                  << " artifact hash re-derivation\n";
    } else if (record.kind == "train" || record.kind == "sweep-cell") {
        if (!record.checkpoint_path.empty()) {
            const Checkpoint checkpoint = load_checkpoint(record.checkpoint_path);
            const double accuracy = reevaluate(record.spec, checkpoint.params,
                                               checkpoint.standardizer);
            const bool match = std::bit_cast<std::uint64_t>(accuracy) == record.accuracy_bits;
            ok = ok && match;
            std::cout << (match ? "PASS" : "FAIL") << " checkpoint re-evaluation: " << accuracy
                      << " vs recorded " << record.accuracy << "\n";
        }
        if (retrain) {
            const RunOutcome outcome = run_single(record.spec);
            const bool match = std::bit_cast<std::uint64_t>(outcome.accuracy) == record.accuracy_bits;
            ok = ok && match;
            std::cout << (match ? "PASS" : "FAIL") << " full retraining: " << outcome.accuracy
                      << " vs recorded " << record.accuracy << "\n";
        }
    } else {
        throw ConfigError("record kind not verifiable: " + record.kind);
    }
    return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold-exceedance prediction in the Henon map"};
    app.require_subcommand(1);

    OrbitArgs orbit_args;
    orbit_args.out = default_out_dir() + "/orbit.csv";
    auto* orbit_cmd = app.add_subcommand("orbit", "iterate the map and write orbit points");
    orbit_cmd->add_option("--length", orbit_args.length, "points to keep");
    orbit_cmd->add_option("--burn-in", orbit_args.burn_in, "transient iterates to discard");
    orbit_cmd->add_option("--seed", orbit_args.seed, "seed for the starting point");
    orbit_cmd->add_option("--a", orbit_args.a, "map parameter a");
    orbit_cmd->add_option("--b", orbit_args.b, "map parameter b");
    auto* x0_opt = orbit_cmd->add_option("--x0", orbit_args.x0, "explicit start x");
    orbit_cmd->add_option("--y0", orbit_args.y0, "explicit start y")->needs(x0_opt);
    orbit_cmd->add_option("--out", orbit_args.out, "output CSV path");

    GeometryArgs geometry_args;
    geometry_args.out = default_out_dir() + "/geometry.csv";
    auto* geometry_cmd = app.add_subcommand("geometry", "class maps and threshold preimages");
    geometry_cmd->add_option("--mode", geometry_args.mode, "classmap|preimages")
        ->check(CLI::IsMember({"classmap", "preimages"}));
    geometry_cmd->add_option("--horizon", geometry_args.horizon, "steps ahead for class maps");
    geometry_cmd->add_option("--depth", geometry_args.depth, "max preimage depth");
    geometry_cmd->add_option("--points", geometry_args.points, "class-map sample count");
    geometry_cmd->add_option("--samples", geometry_args.samples, "initial samples per curve");
    geometry_cmd->add_option("--segment-cap", geometry_args.segment_cap, "curve refinement cap");
    geometry_cmd->add_option("--seed", geometry_args.seed, "orbit seed");
    geometry_cmd->add_option("--a", geometry_args.a, "map parameter a");
    geometry_cmd->add_option("--b", geometry_args.b, "map parameter b");
    geometry_cmd->add_option("--theta", geometry_args.theta, "threshold");
    geometry_cmd->add_option("--out", geometry_args.out, "output CSV path");

    std::string train_config, train_profile, train_out = default_out_dir(), train_name = "run";
    auto* train_cmd = app.add_subcommand("train", "train one network from a config file");
    train_cmd->add_option("--config", train_config, "run config JSON")->required();
    train_cmd->add_option("--profile", train_profile, "desk|paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    train_cmd->add_option("--out", train_out, "output directory");
    train_cmd->add_option("--name", train_name, "artifact base name");

    std::string eval_checkpoint, eval_misclass;
    std::size_t eval_test_size = 0;
    std::uint64_t eval_test_seed = 0;
    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a checkpoint on held-out data");
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "checkpoint path")->required();
    eval_cmd->add_option("--test-size", eval_test_size, "override held-out corpus size");
    eval_cmd->add_option("--test-seed", eval_test_seed, "override held-out corpus seed");
    eval_cmd->add_option("--misclass-out", eval_misclass, "write misclassified points CSV");

    std::string sweep_spec_path, sweep_profile, sweep_out = default_out_dir() + "/sweep";
    int sweep_jobs = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment grid from a spec file");
    sweep_cmd->add_option("--spec", sweep_spec_path, "sweep spec JSON")->required();
    sweep_cmd->add_option("--profile", sweep_profile, "desk|paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    sweep_cmd->add_option("--jobs", sweep_jobs, "concurrent cells (0 = all cores)");
    sweep_cmd->add_option("--out", sweep_out, "output directory");

    std::string verify_record;
    bool verify_retrain = false;
    auto* verify_cmd = app.add_subcommand("verify", "re-derive a run record and compare metrics");
    verify_cmd->add_option("record", verify_record, "record JSON path")->required();
    verify_cmd->add_flag("--retrain", verify_retrain, "re-run training, not just evaluation");

    CLI11_PARSE(app, argc, argv);

    try {
        if (orbit_cmd->parsed()) {
            orbit_args.explicit_start = x0_opt->count() > 0;
            return cmd_orbit(orbit_args);
        }
        if (geometry_cmd->parsed()) return cmd_geometry(geometry_args);
        if (train_cmd->parsed()) return cmd_train(train_config, train_profile, train_out, train_name);
        if (eval_cmd->parsed()) {
            return cmd_evaluate(eval_checkpoint, eval_test_size, eval_test_seed, eval_misclass);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(sweep_spec_path, sweep_profile, sweep_jobs, sweep_out);
        }
        if (verify_cmd->parsed()) return cmd_verify(verify_record, verify_retrain);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TrainingDivergedError& e) {
        std::cerr << "training diverged: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const ClassStarvationError& e) {
        std::cerr << "class starvation: " << e.what() << "\n";
        return kExitStarved;
    } catch (const OrbitEscapeError& e) {
        std::cerr << "orbit escape: " << e.what() << "\n";
        return kExitEscape;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIO;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}

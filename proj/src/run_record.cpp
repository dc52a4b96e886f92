#include "henon/run_record.hpp"

#include <bit>
#include <chrono>
#include <cstring>
#include <fstream>

namespace henon {

namespace {

using nlohmann::json;

void write_le_u64(std::ostream& out, std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t read_le_u64(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

void write_le_double(std::ostream& out, double d) {
    write_le_u64(out, std::bit_cast<std::uint64_t>(d));
}

double read_le_double(std::istream& in) { return std::bit_cast<double>(read_le_u64(in)); }

constexpr char kCheckpointMagic[] = "HENONCKPT1\n";

}  // namespace

std::string current_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::uint64_t hash = 1469598103934665603ULL;
    char chunk[65536];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(chunk[i]);
            hash *= 1099511628211ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(chunk))) break;
    }
    return hash;
}

json run_spec_to_json(const RunSpec& spec) {
    json j;
    j["horizon"] = spec.horizon;
    j["history_length"] = spec.history_length;
    j["n_train"] = spec.n_train;
    j["test_size"] = spec.test_size;
    j["topology"] = spec.topology.widths;
    j["map"] = {{"a", spec.map.a}, {"b", spec.map.b}};
    j["threshold"] = spec.threshold.theta;
    j["seed"] = spec.seed;
    j["test_seed"] = spec.test_seed;
    j["training"] = {
        {"batch_size", spec.config.batch_size},
        {"epochs", spec.config.epochs},
        {"train_biases", spec.config.train_biases},
        {"adam",
         {{"alpha", spec.config.adam.alpha},
          {"beta1", spec.config.adam.beta1},
          {"beta2", spec.config.adam.beta2},
          {"epsilon", spec.config.adam.epsilon}}},
    };
    return j;
}

RunSpec run_spec_from_json(const json& j) {
    RunSpec spec;
    spec.horizon = j.at("horizon").get<int>();
    spec.history_length = j.at("history_length").get<int>();
    spec.n_train = j.at("n_train").get<std::size_t>();
    spec.test_size = j.at("test_size").get<std::size_t>();
    spec.topology.widths = j.at("topology").get<std::vector<int>>();
    if (j.contains("map")) {
        spec.map.a = j["map"].value("a", 1.4);
        spec.map.b = j["map"].value("b", 0.3);
    }
    spec.threshold.theta = j.value("threshold", 0.3);
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.test_seed = j.value("test_seed", std::uint64_t{0});
    if (j.contains("training")) {
        const auto& t = j["training"];
        spec.config.batch_size = t.value("batch_size", 128);
        spec.config.epochs = t.value("epochs", 5000);
        spec.config.train_biases = t.value("train_biases", true);
        if (t.contains("adam")) {
            const auto& a = t["adam"];
            spec.config.adam.alpha = a.value("alpha", 1e-3);
            spec.config.adam.beta1 = a.value("beta1", 0.9);
            spec.config.adam.beta2 = a.value("beta2", 0.999);
            spec.config.adam.epsilon = a.value("epsilon", 1e-8);
        }
    }
    return spec;
}

void save_run_record(const std::string& path, const RunRecord& record) {
    json j;
    j["kind"] = record.kind;
    j["code_version"] = record.code_version;
    j["timestamp"] = record.timestamp;
    j["profile"] = record.profile;
    j["spec"] = run_spec_to_json(record.spec);
    j["metrics"] = {
        {"accuracy", record.accuracy},
        {"accuracy_bits", record.accuracy_bits},
        {"final_train_loss", record.final_train_loss},
    };
    if (!record.standardizer.mean.empty()) {
        j["standardizer"] = {{"mean", record.standardizer.mean},
                             {"scale", record.standardizer.scale}};
    }
    json artifacts = json::object();
    if (!record.checkpoint_path.empty()) artifacts["checkpoint"] = record.checkpoint_path;
    if (!record.artifact_path.empty()) {
        artifacts["file"] = record.artifact_path;
        j["metrics"]["file_fnv1a"] = record.artifact_hash;
    }
    j["artifacts"] = artifacts;
    if (!record.extra.is_null()) j["config"] = record.extra;

    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open " + path);
    out << j.dump(2) << '\n';
}

RunRecord load_run_record(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    json j;
    in >> j;

    RunRecord record;
    record.kind = j.value("kind", "train");
    record.code_version = j.value("code_version", "");
    record.timestamp = j.value("timestamp", "");
    record.profile = j.value("profile", "custom");
    if (j.contains("spec")) record.spec = run_spec_from_json(j["spec"]);
    if (j.contains("metrics")) {
        const auto& m = j["metrics"];
        record.accuracy = m.value("accuracy", 0.0);
        record.accuracy_bits = m.value("accuracy_bits", std::uint64_t{0});
        record.final_train_loss = m.value("final_train_loss", 0.0);
        record.artifact_hash = m.value("file_fnv1a", std::uint64_t{0});
    }
    if (j.contains("standardizer")) {
        record.standardizer.mean = j["standardizer"].at("mean").get<std::vector<double>>();
        record.standardizer.scale = j["standardizer"].at("scale").get<std::vector<double>>();
    }
    if (j.contains("artifacts") && j["artifacts"].is_object()) {
        const auto& a = j["artifacts"];
        record.checkpoint_path = a.value("checkpoint", "");
        record.artifact_path = a.value("file", "");
    }
    if (j.contains("config")) record.extra = j["config"];
    return record;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    json header;
    header["spec"] = run_spec_to_json(checkpoint.spec);
    header["profile"] = checkpoint.profile;
    header["standardizer"] = {{"mean", checkpoint.standardizer.mean},
                              {"scale", checkpoint.standardizer.scale}};
    header["n_params"] = checkpoint.params.values.size();
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + path);
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic) - 1);
    write_le_u64(out, header_text.size());
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    for (const double v : checkpoint.params.values) write_le_double(out, v);
    if (!out) throw std::ios_base::failure("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    char magic[sizeof(kCheckpointMagic) - 1];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw ConfigError("not a checkpoint file: " + path);
    }
    const std::uint64_t header_size = read_le_u64(in);
    std::string header_text(header_size, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(header_size));
    if (!in) throw std::ios_base::failure("truncated checkpoint header: " + path);
    const json header = json::parse(header_text);

    Checkpoint checkpoint;
    checkpoint.spec = run_spec_from_json(header.at("spec"));
    checkpoint.profile = header.value("profile", "custom");
    checkpoint.standardizer.mean = header.at("standardizer").at("mean").get<std::vector<double>>();
    checkpoint.standardizer.scale = header.at("standardizer").at("scale").get<std::vector<double>>();

    checkpoint.params = zero_parameters(checkpoint.spec.topology);
    const std::size_t n = header.at("n_params").get<std::size_t>();
    if (n != checkpoint.params.values.size()) {
        throw ConfigError("checkpoint parameter count does not match its topology");
    }
    for (std::size_t i = 0; i < n; ++i) checkpoint.params.values[i] = read_le_double(in);
    if (!in) throw std::ios_base::failure("truncated checkpoint payload: " + path);
    return checkpoint;
}

}  // namespace henon

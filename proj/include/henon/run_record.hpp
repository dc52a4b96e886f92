#pragma once

#include <string>

#include <json.hpp>

#include "henon/experiments.hpp"

namespace henon {

// Snapshot of everything needed to bit-reproduce a run on one thread, plus
// the measured metrics and artifact paths.
struct RunRecord {
    std::string kind = "train";  // train | sweep-cell | orbit | geometry
    std::string code_version = kVersionString;
    std::string timestamp;
    std::string profile = "custom";
    RunSpec spec;
    double accuracy = 0.0;
    std::uint64_t accuracy_bits = 0;  // exact IEEE-754 payload of `accuracy`
    double final_train_loss = 0.0;
    Standardizer standardizer;  // fitted on the run's training corpus
    std::string checkpoint_path;
    // orbit/geometry records verify by re-hashing the emitted file
    std::string artifact_path;
    std::uint64_t artifact_hash = 0;
    nlohmann::json extra;  // kind-specific config snapshot
};

std::string current_timestamp();
std::uint64_t fnv1a_file(const std::string& path);

void save_run_record(const std::string& path, const RunRecord& record);
RunRecord load_run_record(const std::string& path);

// Checkpoint: JSON header (topology, seeds, config, standardizer) followed by
// the flat parameter array, row-major weights then biases per layer, as
// little-endian 64-bit floats.
struct Checkpoint {
    RunSpec spec;
    std::string profile = "custom";
    NetworkParameters params;
    Standardizer standardizer;
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

// RunSpec <-> JSON used by records, checkpoints, and CLI config files
nlohmann::json run_spec_to_json(const RunSpec& spec);
RunSpec run_spec_from_json(const nlohmann::json& j);

}  // namespace henon

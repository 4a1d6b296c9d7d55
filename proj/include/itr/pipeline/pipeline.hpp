#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "itr/core/config.hpp"

namespace itr {

struct ArtifactEntry {
    std::string path;      // relative to the run directory
    std::string checksum;  // FNV-1a 64, hex
};

struct RunManifest {
    std::string version;
    std::string config_json;
    std::map<std::string, std::uint64_t> seeds;
    std::map<std::string, ArtifactEntry> artifacts;
    std::map<std::string, double> timings_seconds;
    std::string failed_stage;  // empty on success
};

// FNV-1a 64 of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::string& path);

// Fits the flexible model, derives loss-optimal rules at each threshold and
// distills them, writing every stage's artifact under run_dir:
//   dataset.csv (+ dataset.schema.json, ground_truth.csv for simulations)
//   model.bin, rules.csv, trees.json (+ trees.txt, trees.dot), report.csv
// Throws after recording the failed stage in run_dir/manifest.json.
RunManifest run_pipeline(const ExperimentConfig& config, const std::string& run_dir);

void write_manifest(const RunManifest& manifest, const std::string& path);

std::string version_string();

}  // namespace itr

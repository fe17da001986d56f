#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace embguard {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Provenance record written next to every command's outputs. Input and
// output digests pin the run; wall_clock_ms is informational and excluded
// from determinism comparisons.
struct RunManifest {
  std::string subcommand;
  nlohmann::json resolved_config;  // all defaults materialized
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<std::string, std::string>> inputs;   // (path, sha256)
  std::vector<std::pair<std::string, std::string>> outputs;  // (path, sha256)
  std::uint64_t wall_clock_ms = 0;
};

// Records the file's digest under inputs/outputs respectively.
void add_input(RunManifest& m, const std::string& path);
void add_output(RunManifest& m, const std::string& path);

void write_manifest(const RunManifest& m, const std::string& path);

}  // namespace embguard

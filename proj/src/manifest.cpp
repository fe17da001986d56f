#include "embguard/manifest.hpp"

#include <fstream>

#include "embguard/digest.hpp"
#include "embguard/error.hpp"

namespace embguard {

using nlohmann::json;

void add_input(RunManifest& m, const std::string& path) {
  m.inputs.emplace_back(path, sha256_hex_file(path));
}

void add_output(RunManifest& m, const std::string& path) {
  m.outputs.emplace_back(path, sha256_hex_file(path));
}

void write_manifest(const RunManifest& m, const std::string& path) {
  json j;
  j["subcommand"] = m.subcommand;
  j["version"] = kToolkitVersion;
  j["resolved_config"] = m.resolved_config;
  j["seeds"] = m.seeds;
  auto files = [](const std::vector<std::pair<std::string, std::string>>& fs) {
    json arr = json::array();
    for (const auto& [p, d] : fs) arr.push_back({{"path", p}, {"sha256", d}});
    return arr;
  };
  j["inputs"] = files(m.inputs);
  j["outputs"] = files(m.outputs);
  j["wall_clock_ms"] = m.wall_clock_ms;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write manifest: " + path);
  out << j.dump(2) << '\n';
  if (!out) fail(errc::io_error, "short write: " + path);
}

}  // namespace embguard

#include "embguard/store.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "embguard/error.hpp"

namespace embguard {

using nlohmann::json;

std::ptrdiff_t EmbeddingStore::index_of(const std::string& id) const {
  if (index_.size() != ids.size()) {
    index_.clear();
    for (std::size_t i = 0; i < ids.size(); ++i) index_.emplace(ids[i], i);
  }
  auto it = index_.find(id);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

const linalg::Vec* EmbeddingStore::find(const std::string& id) const {
  const std::ptrdiff_t i = index_of(id);
  return i < 0 ? nullptr : &rows[static_cast<std::size_t>(i)];
}

void EmbeddingStore::rebuild_index() {
  index_.clear();
  for (std::size_t i = 0; i < ids.size(); ++i) index_.emplace(ids[i], i);
}

void validate_store(const EmbeddingStore& store, bool require_unit) {
  if (store.ids.size() != store.rows.size()) {
    fail(errc::bad_format, "store: id/row count mismatch");
  }
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < store.ids.size(); ++i) {
    if (!seen.emplace(store.ids[i], i).second) {
      fail(errc::bad_format, "store: duplicate id " + store.ids[i]);
    }
    const auto& row = store.rows[i];
    if (row.size() != store.dim) {
      fail(errc::bad_format, "store: row " + store.ids[i] + " has dim " +
                                 std::to_string(row.size()) + ", expected " +
                                 std::to_string(store.dim));
    }
    linalg::check_finite(row, "store row");
    if (require_unit) {
      const double n = linalg::norm(row);
      if (std::abs(n - 1.0) > linalg::kOrthoTol) {
        fail(errc::bad_format, "store: row " + store.ids[i] + " not unit norm (" +
                                   std::to_string(n) + ")");
      }
    }
  }
}

EmbeddingStore load_embstore(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open store file: " + path);
  std::string line;
  if (!std::getline(in, line)) fail(errc::bad_format, path + ": missing header");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    fail(errc::bad_format, path + ": header: " + e.what());
  }
  if (header.value("format", "") != "embstore/1") {
    fail(errc::bad_format, path + ": unsupported format");
  }
  EmbeddingStore store;
  store.dim = header.at("dim").get<std::size_t>();
  const std::size_t count = header.at("count").get<std::size_t>();
  store.ids.reserve(count);
  store.rows.reserve(count);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(errc::bad_format, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    store.ids.push_back(j.at("id").get<std::string>());
    store.rows.push_back(j.at("vec").get<linalg::Vec>());
  }
  if (store.rows.size() != count) {
    fail(errc::bad_format, path + ": header count " + std::to_string(count) + " but " +
                               std::to_string(store.rows.size()) + " rows");
  }
  validate_store(store);
  return store;
}

void save_embstore(const EmbeddingStore& store, const std::string& path) {
  validate_store(store);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write store file: " + path);
  json header;
  header["format"] = "embstore/1";
  header["dim"] = store.dim;
  header["count"] = store.size();
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < store.size(); ++i) {
    json j;
    j["id"] = store.ids[i];
    j["vec"] = store.rows[i];
    out << j.dump() << '\n';
  }
  if (!out) fail(errc::io_error, "short write: " + path);
}

}  // namespace embguard

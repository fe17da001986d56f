#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "embguard/linalg.hpp"

namespace embguard {

// Embedding table keyed by document id. Row order is part of the contract:
// derived stores (watermarked, cleansed) preserve it, and floating-point
// reductions iterate it, so equal inputs give byte-equal outputs.
struct EmbeddingStore {
  std::size_t dim = 0;
  std::vector<std::string> ids;
  std::vector<linalg::Vec> rows;

  std::size_t size() const { return rows.size(); }
  // -1 when absent.
  std::ptrdiff_t index_of(const std::string& id) const;
  const linalg::Vec* find(const std::string& id) const;
  void rebuild_index();

 private:
  mutable std::unordered_map<std::string, std::size_t> index_;
};

// Checks dims, finiteness, unique ids and unit row norms (1e-8) and throws
// bad_format on violation.
void validate_store(const EmbeddingStore& store, bool require_unit = true);

// Format "embstore/1": a JSON header line {"format","dim","count"} followed
// by one {"id","vec"} object per row.
EmbeddingStore load_embstore(const std::string& path);
void save_embstore(const EmbeddingStore& store, const std::string& path);

}  // namespace embguard

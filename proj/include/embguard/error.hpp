#pragma once

#include <stdexcept>
#include <string>

namespace embguard {

// Every failure in the library throws Error with one of these codes. The CLI
// maps codes onto process exit codes; tests match on the code, not the text.
enum class errc {
  zero_vector,
  dimension_mismatch,
  degenerate_residual,
  degenerate_mix,
  all_degenerate,
  singular_system,
  empty_corpus,
  insufficient_candidates,
  too_many_subsets,
  too_many_watermarks,
  missing_document,
  id_mismatch,
  too_many_clusters,
  too_few_samples,
  empty_benign_vocab,
  invalid_config,
  io_error,
  bad_format,
  internal,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message);
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] void fail(errc code, const std::string& message);

// Throws invalid_config unless `cond` holds.
void require(bool cond, errc code, const std::string& message);

}  // namespace embguard

#include "embguard/error.hpp"

namespace embguard {

const char* errc_name(errc c) {
  switch (c) {
    case errc::zero_vector: return "ZeroVector";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::degenerate_residual: return "DegenerateResidual";
    case errc::degenerate_mix: return "DegenerateMix";
    case errc::all_degenerate: return "AllDegenerate";
    case errc::singular_system: return "SingularSystem";
    case errc::empty_corpus: return "EmptyCorpus";
    case errc::insufficient_candidates: return "InsufficientCandidates";
    case errc::too_many_subsets: return "TooManySubsets";
    case errc::too_many_watermarks: return "TooManyWatermarks";
    case errc::missing_document: return "MissingDocument";
    case errc::id_mismatch: return "IdMismatch";
    case errc::too_many_clusters: return "TooManyClusters";
    case errc::too_few_samples: return "TooFewSamples";
    case errc::empty_benign_vocab: return "EmptyBenignVocab";
    case errc::invalid_config: return "InvalidConfig";
    case errc::io_error: return "IoError";
    case errc::bad_format: return "BadFormat";
    case errc::internal: return "Internal";
  }
  return "Unknown";
}

Error::Error(errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(errc code, const std::string& message) { throw Error(code, message); }

void require(bool cond, errc code, const std::string& message) {
  if (!cond) fail(code, message);
}

}  // namespace embguard

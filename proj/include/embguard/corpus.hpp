#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace embguard {

struct Document {
  std::string id;
  std::vector<std::string> tokens;
  // Set by the generator, consumed by diagnostics. Transient: never
  // serialized, -1 when unknown (e.g. after a round-trip or raw import).
  int topic = -1;
};

struct Corpus {
  std::vector<Document> docs;

  std::size_t size() const { return docs.size(); }
  const Document* find(const std::string& id) const;
};

// Fraction of documents containing each token at least once.
// Throws empty_corpus when there are no documents.
std::map<std::string, double> token_doc_frequencies(const Corpus& corpus);

// Per-token total occurrence counts across the corpus.
std::map<std::string, std::size_t> token_occurrence_counts(const Corpus& corpus);

// Sorted unique token list.
std::vector<std::string> corpus_vocabulary(const Corpus& corpus);

// JSONL: one {"id": ..., "tokens": [...]} object per line. Topic labels are
// intentionally not persisted.
Corpus load_corpus_jsonl(const std::string& path);
void save_corpus_jsonl(const Corpus& corpus, const std::string& path);

// One document per non-empty line, whitespace tokenization, ids r000001...
Corpus import_raw_text(const std::string& path);

}  // namespace embguard

#include "embguard/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "embguard/error.hpp"

namespace embguard {

using nlohmann::json;

const Document* Corpus::find(const std::string& id) const {
  for (const auto& d : docs) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

std::map<std::string, double> token_doc_frequencies(const Corpus& corpus) {
  require(!corpus.docs.empty(), errc::empty_corpus, "token_doc_frequencies");
  std::map<std::string, std::size_t> containing;
  for (const auto& doc : corpus.docs) {
    std::set<std::string> seen(doc.tokens.begin(), doc.tokens.end());
    for (const auto& t : seen) ++containing[t];
  }
  std::map<std::string, double> out;
  const double n = static_cast<double>(corpus.docs.size());
  for (const auto& [tok, cnt] : containing) out[tok] = static_cast<double>(cnt) / n;
  return out;
}

std::map<std::string, std::size_t> token_occurrence_counts(const Corpus& corpus) {
  require(!corpus.docs.empty(), errc::empty_corpus, "token_occurrence_counts");
  std::map<std::string, std::size_t> out;
  for (const auto& doc : corpus.docs) {
    for (const auto& t : doc.tokens) ++out[t];
  }
  return out;
}

std::vector<std::string> corpus_vocabulary(const Corpus& corpus) {
  std::set<std::string> vocab;
  for (const auto& doc : corpus.docs) vocab.insert(doc.tokens.begin(), doc.tokens.end());
  return {vocab.begin(), vocab.end()};
}

Corpus load_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open corpus file: " + path);
  Corpus corpus;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(errc::bad_format, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("tokens")) {
      fail(errc::bad_format, path + ":" + std::to_string(lineno) + ": expected {id, tokens}");
    }
    Document doc;
    doc.id = j.at("id").get<std::string>();
    doc.tokens = j.at("tokens").get<std::vector<std::string>>();
    if (!ids.insert(doc.id).second) {
      fail(errc::bad_format, path + ": duplicate document id " + doc.id);
    }
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

void save_corpus_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write corpus file: " + path);
  for (const auto& doc : corpus.docs) {
    json j;
    j["id"] = doc.id;
    j["tokens"] = doc.tokens;
    out << j.dump() << '\n';
  }
  if (!out) fail(errc::io_error, "short write: " + path);
}

Corpus import_raw_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open text file: " + path);
  Corpus corpus;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    Document doc;
    std::string tok;
    while (ss >> tok) doc.tokens.push_back(tok);
    if (doc.tokens.empty()) continue;
    char buf[32];
    std::snprintf(buf, sizeof buf, "r%06zu", ++n);
    doc.id = buf;
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace embguard

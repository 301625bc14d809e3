#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "bugloc/ranked_list.hpp"

namespace bugloc {

/// Bumped whenever tokenize() changes output; recorded in manifests.
inline constexpr int kTokenizerVersion = 1;

/// Lowercased ASCII alphanumeric runs. Identifiers are split at underscores
/// and camelCase boundaries; when that yields more than the identifier itself,
/// the whole lowercased identifier follows its parts:
///   "FontController" -> font, controller, fontcontroller
///   "a_b"            -> a, b, a_b
std::vector<std::string> tokenize(std::string_view text);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct LexicalDoc {
  std::string id;
  std::string text;
  std::string path;
};

struct Posting {
  std::uint32_t doc = 0;  // dense index into the doc table
  std::uint32_t tf = 0;
};

/// Okapi BM25 over whole files. Body, path segments and file name are all
/// indexed. Immutable once built.
class LexicalIndex {
 public:
  static LexicalIndex build(const std::vector<LexicalDoc>& docs, Bm25Params params = {});

  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  double avgdl() const noexcept { return avgdl_; }
  const Bm25Params& params() const noexcept { return params_; }

  std::size_t doc_length(const std::string& doc_id) const;
  const std::string& doc_path(const std::string& doc_id) const;
  std::size_t document_frequency(const std::string& term) const;
  double idf(const std::string& term) const;

  /// Sum over query tokens (duplicates count again) of
  /// IDF(q) * f * (k1 + 1) / (f + k1 * (1 - b + b * |D| / avgdl)).
  double score(const std::vector<std::string>& query_tokens, const std::string& doc_id) const;

  /// Docs by descending score, ties by doc id ascending; zero scores dropped.
  RankedList search(std::string_view query_text, std::size_t top_k) const;
  RankedList search_tokens(const std::vector<std::string>& query_tokens, std::size_t top_k) const;

  nlohmann::json to_json() const;
  static LexicalIndex from_json(const nlohmann::json& doc);

 private:
  std::size_t doc_index(const std::string& doc_id) const;

  Bm25Params params_;
  std::vector<std::string> doc_ids_;
  std::vector<std::string> doc_paths_;
  std::vector<std::uint32_t> doc_lengths_;
  std::unordered_map<std::string, std::uint32_t> doc_lookup_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avgdl_ = 0.0;
};

}  // namespace bugloc

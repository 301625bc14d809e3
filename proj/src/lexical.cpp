#include "bugloc/lexical.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "bugloc/error.hpp"

namespace bugloc {
using nlohmann::json;

namespace {

bool is_word(unsigned char c) { return c < 0x80 && (std::isalnum(c) || c == '_'); }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void split_camel(std::string_view part, std::vector<std::string>& out) {
  std::size_t start = 0;
  for (std::size_t i = 1; i < part.size(); ++i) {
    const char prev = part[i - 1], cur = part[i];
    const bool next_lower = i + 1 < part.size() && is_lower(part[i + 1]);
    const bool boundary = (is_upper(cur) && (is_lower(prev) || is_digit(prev))) ||
                          (is_upper(cur) && is_upper(prev) && next_lower);
    if (boundary) {
      out.push_back(lower(part.substr(start, i - start)));
      start = i;
    }
  }
  out.push_back(lower(part.substr(start)));
}

void emit_identifier(std::string_view ident, std::vector<std::string>& out) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= ident.size()) {
    const std::size_t us = ident.find('_', start);
    const std::size_t end = us == std::string_view::npos ? ident.size() : us;
    if (end > start) split_camel(ident.substr(start, end - start), parts);
    if (us == std::string_view::npos) break;
    start = us + 1;
  }
  if (parts.empty()) return;
  std::string whole = lower(ident);
  const bool add_whole = parts.size() > 1 || parts.front() != whole;
  for (auto& p : parts) out.push_back(std::move(p));
  if (add_whole) out.push_back(std::move(whole));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && is_word(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) emit_identifier(text.substr(start, i - start), tokens);
  }
  return tokens;
}

LexicalIndex LexicalIndex::build(const std::vector<LexicalDoc>& docs, Bm25Params params) {
  if (docs.empty()) throw data_error("cannot build a lexical index over an empty corpus");
  if (params.k1 < 0.0 || params.b < 0.0 || params.b > 1.0)
    throw usage_error("bm25 parameters out of range (k1 >= 0, 0 <= b <= 1)");

  LexicalIndex index;
  index.params_ = params;
  std::uint64_t total_len = 0;
  for (const auto& doc : docs) {
    const auto idx = static_cast<std::uint32_t>(index.doc_ids_.size());
    if (!index.doc_lookup_.emplace(doc.id, idx).second)
      throw data_error("duplicate lexical doc id '" + doc.id + "'");
    auto tokens = tokenize(doc.text);
    auto path_tokens = tokenize(doc.path);
    tokens.insert(tokens.end(), std::make_move_iterator(path_tokens.begin()),
                  std::make_move_iterator(path_tokens.end()));
    std::map<std::string, std::uint32_t> tf;
    for (auto& t : tokens) ++tf[std::move(t)];
    for (auto& [term, f] : tf) index.postings_[term].push_back({idx, f});
    index.doc_ids_.push_back(doc.id);
    index.doc_paths_.push_back(doc.path);
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    total_len += tokens.size();
  }
  index.avgdl_ = static_cast<double>(total_len) / static_cast<double>(docs.size());
  return index;
}

std::size_t LexicalIndex::doc_index(const std::string& doc_id) const {
  const auto it = doc_lookup_.find(doc_id);
  if (it == doc_lookup_.end()) throw data_error("unknown lexical doc id '" + doc_id + "'");
  return it->second;
}

std::size_t LexicalIndex::doc_length(const std::string& doc_id) const {
  return doc_lengths_[doc_index(doc_id)];
}

const std::string& LexicalIndex::doc_path(const std::string& doc_id) const {
  return doc_paths_[doc_index(doc_id)];
}

std::size_t LexicalIndex::document_frequency(const std::string& term) const {
  const auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

double LexicalIndex::idf(const std::string& term) const {
  const double n = static_cast<double>(document_frequency(term));
  const double total = static_cast<double>(doc_count());
  return std::log(1.0 + (total - n + 0.5) / (n + 0.5));
}

double LexicalIndex::score(const std::vector<std::string>& query_tokens,
                           const std::string& doc_id) const {
  const auto doc = static_cast<std::uint32_t>(doc_index(doc_id));
  // avgdl is 0 only when every document is empty, and then no term matches.
  const double len_ratio = avgdl_ > 0.0 ? doc_lengths_[doc] / avgdl_ : 1.0;
  const double norm = params_.k1 * (1.0 - params_.b + params_.b * len_ratio);
  double total = 0.0;
  for (const auto& term : query_tokens) {
    const auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const auto& plist = it->second;
    const auto p = std::lower_bound(plist.begin(), plist.end(), doc,
                                    [](const Posting& a, std::uint32_t d) { return a.doc < d; });
    if (p == plist.end() || p->doc != doc) continue;
    const double f = p->tf;
    total += idf(term) * f * (params_.k1 + 1.0) / (f + norm);
  }
  return total;
}

RankedList LexicalIndex::search(std::string_view query_text, std::size_t top_k) const {
  return search_tokens(tokenize(query_text), top_k);
}

RankedList LexicalIndex::search_tokens(const std::vector<std::string>& query_tokens,
                                       std::size_t top_k) const {
  if (top_k < 1) throw usage_error("top_k must be >= 1");
  std::vector<std::uint32_t> candidates;
  for (const auto& term : query_tokens) {
    const auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    for (const auto& p : it->second) candidates.push_back(p.doc);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  RankedList out;
  out.retriever = "lexical";
  for (std::uint32_t d : candidates) {
    const double s = score(query_tokens, doc_ids_[d]);
    if (s > 0.0) out.items.push_back({doc_ids_[d], s});
  }
  std::sort(out.items.begin(), out.items.end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.file_id < b.file_id;
  });
  out.truncate(top_k);
  return out;
}

json LexicalIndex::to_json() const {
  json docs = json::array();
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
    docs.push_back({{"id", doc_ids_[i]}, {"path", doc_paths_[i]}, {"length", doc_lengths_[i]}});
  }
  std::map<std::string, json> sorted;
  for (const auto& [term, plist] : postings_) {
    json arr = json::array();
    for (const auto& p : plist) arr.push_back({p.doc, p.tf});
    sorted.emplace(term, std::move(arr));
  }
  return {{"tokenizer_version", kTokenizerVersion},
          {"k1", params_.k1},
          {"b", params_.b},
          {"docs", std::move(docs)},
          {"postings", sorted}};
}

LexicalIndex LexicalIndex::from_json(const json& doc) {
  if (doc.value("tokenizer_version", 0) != kTokenizerVersion)
    throw data_error("lexical index was built with a different tokenizer version");
  LexicalIndex index;
  index.params_ = {doc.at("k1").get<double>(), doc.at("b").get<double>()};
  std::uint64_t total = 0;
  for (const auto& d : doc.at("docs")) {
    const auto idx = static_cast<std::uint32_t>(index.doc_ids_.size());
    index.doc_ids_.push_back(d.at("id").get<std::string>());
    index.doc_paths_.push_back(d.at("path").get<std::string>());
    index.doc_lengths_.push_back(d.at("length").get<std::uint32_t>());
    index.doc_lookup_.emplace(index.doc_ids_.back(), idx);
    total += index.doc_lengths_.back();
  }
  if (index.doc_ids_.empty()) throw data_error("stored lexical index has no documents");
  for (const auto& [term, arr] : doc.at("postings").items()) {
    auto& plist = index.postings_[term];
    for (const auto& p : arr) plist.push_back({p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()});
  }
  index.avgdl_ = static_cast<double>(total) / static_cast<double>(index.doc_ids_.size());
  return index;
}

}  // namespace bugloc

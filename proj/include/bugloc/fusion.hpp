#pragma once

#include <map>
#include <string>
#include <vector>

#include "bugloc/corpus.hpp"
#include "bugloc/lexical.hpp"
#include "bugloc/ranked_list.hpp"
#include "bugloc/vector.hpp"

namespace bugloc {

inline constexpr int kDefaultRrfK = 60;

/// Reciprocal rank fusion: score(s) = sum over lists containing s of
/// 1 / (k + rank), ranks 1-based. Lists without s add nothing. Output is
/// sorted by score descending, ties by file id ascending.
RankedList rrf_fuse(const std::vector<RankedList>& rankings, double k = kDefaultRrfK);

enum class RetrieverMode { kLexical, kDeep, kHybrid };

std::string_view to_string(RetrieverMode mode);
RetrieverMode retriever_mode_from_string(std::string_view name);

struct LocalizeOptions {
  RetrieverMode mode = RetrieverMode::kHybrid;
  double rrf_k = kDefaultRrfK;
  std::size_t lexical_depth = 500;  // files taken from each retriever
  std::size_t deep_depth = 500;
};

struct LocalizationResult {
  std::string report_id;
  RankedList fused;
  std::map<std::string, RankedList> per_retriever;  // "lexical", "deep"
  bool degraded = false;  // deep retriever failed, lexical-only
  std::string degradation_reason;
  double lexical_ms = 0.0;
  double deep_ms = 0.0;
  double fusion_ms = 0.0;
};

/// Runs the lexical and/or deep retriever for the report and fuses the
/// rankings. A provider failure in hybrid mode falls back to the lexical list
/// with `degraded` set; in deep mode it propagates.
LocalizationResult localize(const BugReport& report, const LexicalIndex& lexical,
                            const VectorIndex& vectors, EmbeddingProvider& provider,
                            const LocalizeOptions& options);

/// Same, for free-form query text.
LocalizationResult localize_text(const std::string& report_id, const std::string& query,
                                 const LexicalIndex& lexical, const VectorIndex& vectors,
                                 EmbeddingProvider& provider, const LocalizeOptions& options);

}  // namespace bugloc

#include "bugloc/fusion.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "bugloc/error.hpp"

namespace bugloc {

RankedList rrf_fuse(const std::vector<RankedList>& rankings, double k) {
  if (rankings.empty()) throw usage_error("rrf_fuse needs at least one ranking");
  if (k < 0.0) throw usage_error("rrf k must be >= 0");

  // Terms are summed in a canonical order (ascending rank) so the result does
  // not depend on the order of the input lists.
  std::map<std::string, std::vector<std::size_t>> ranks;
  for (const auto& list : rankings) {
    for (std::size_t i = 0; i < list.items.size(); ++i) ranks[list.items[i].file_id].push_back(i + 1);
  }
  RankedList fused;
  fused.retriever = "rrf";
  fused.items.reserve(ranks.size());
  for (auto& [file, rs] : ranks) {
    std::sort(rs.begin(), rs.end());
    double score = 0.0;
    for (std::size_t r : rs) score += 1.0 / (k + static_cast<double>(r));
    fused.items.push_back({file, score});
  }
  std::stable_sort(fused.items.begin(), fused.items.end(),
                   [](const RankedItem& a, const RankedItem& b) { return a.score > b.score; });
  return fused;
}

std::string_view to_string(RetrieverMode mode) {
  switch (mode) {
    case RetrieverMode::kLexical: return "lexical";
    case RetrieverMode::kDeep: return "deep";
    case RetrieverMode::kHybrid: return "hybrid";
  }
  return "hybrid";
}

RetrieverMode retriever_mode_from_string(std::string_view name) {
  if (name == "lexical") return RetrieverMode::kLexical;
  if (name == "deep") return RetrieverMode::kDeep;
  if (name == "hybrid") return RetrieverMode::kHybrid;
  throw usage_error("unknown retriever mode '" + std::string(name) + "'");
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

LocalizationResult localize_text(const std::string& report_id, const std::string& query,
                                 const LexicalIndex& lexical, const VectorIndex& vectors,
                                 EmbeddingProvider& provider, const LocalizeOptions& options) {
  if (query.find_first_not_of(" \t\r\n") == std::string::npos) throw data_error("empty query");

  LocalizationResult result;
  result.report_id = report_id;
  std::vector<RankedList> lists;

  if (options.mode != RetrieverMode::kDeep) {
    const auto t0 = std::chrono::steady_clock::now();
    RankedList lex = lexical.search(query, options.lexical_depth);
    result.lexical_ms = elapsed_ms(t0);
    result.per_retriever["lexical"] = lex;
    lists.push_back(std::move(lex));
  }

  if (options.mode != RetrieverMode::kLexical) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (provider.dimension() != vectors.dimension()) {
        throw provider_error("provider '" + provider.name() + "' has dimension " +
                             std::to_string(provider.dimension()) + " but the index holds " +
                             std::to_string(vectors.dimension()));
      }
      const Embedding q = provider.embed_one(query);
      // Every chunk is scored so that the per-file cut below sees all files.
      RankedList deep = aggregate_file_scores(vectors.search(q, vectors.size()));
      deep.truncate(options.deep_depth);
      result.per_retriever["deep"] = deep;
      lists.push_back(std::move(deep));
    } catch (const Error& e) {
      if (options.mode == RetrieverMode::kDeep || e.kind() != ErrorKind::kProvider) throw;
      result.degraded = true;
      result.degradation_reason = e.what();
    }
    result.deep_ms = elapsed_ms(t0);
  }

  const auto t0 = std::chrono::steady_clock::now();
  result.fused = rrf_fuse(lists, options.rrf_k);
  result.fusion_ms = elapsed_ms(t0);
  return result;
}

LocalizationResult localize(const BugReport& report, const LexicalIndex& lexical,
                            const VectorIndex& vectors, EmbeddingProvider& provider,
                            const LocalizeOptions& options) {
  return localize_text(report.id, report.query_text(), lexical, vectors, provider, options);
}

}  // namespace bugloc

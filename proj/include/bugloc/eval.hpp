#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bugloc/config.hpp"
#include "bugloc/corpus.hpp"
#include "bugloc/fusion.hpp"
#include "bugloc/ranked_list.hpp"

namespace bugloc {

/// 0/1 relevance aligned with a ranked list, plus the size of the truth set.
struct JudgedRanking {
  std::string report_id;
  std::vector<int> relevance;
  std::size_t truth_size = 0;
};

/// Marks each item of `ranking` (truncated to `depth`) relevant iff its file
/// id is in `truth`.
JudgedRanking judge(const std::string& report_id, const RankedList& ranking,
                    const std::set<std::string>& truth, std::size_t depth);

/// 1-based rank of the first relevant item, 0 if none.
std::size_t first_relevant_rank(const JudgedRanking& judged);

/// Fraction of reports with a relevant item within the first n.
double top_n(const std::vector<JudgedRanking>& judged, std::size_t n);

/// Mean reciprocal of the first relevant rank; misses contribute 0.
double mrr(const std::vector<JudgedRanking>& judged);

/// Mean over ranks holding a relevant item of precision at that rank; 0 when
/// nothing relevant was retrieved.
double average_precision(const JudgedRanking& judged);

double mean_average_precision(const std::vector<JudgedRanking>& judged);

/// |tokens(source) ∩ tokens(target)| / |tokens(source)|. Directional.
double token_overlap(const std::vector<std::string>& source_texts,
                     const std::vector<std::string>& target_texts);

struct ReportMetrics {
  std::string report_id;
  std::size_t first_rank = 0;  // 0 = miss
  double average_precision = 0.0;
  std::size_t truth_size = 0;
  std::size_t retrieved_relevant = 0;
};

struct MetricsReport {
  double top1 = 0.0;
  double top5 = 0.0;
  double top10 = 0.0;
  double map = 0.0;
  double mrr = 0.0;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
  std::vector<std::string> excluded_ids;
  std::vector<ReportMetrics> per_report;
  std::size_t degraded = 0;
  std::string retriever;
  std::string chunking;
};

inline constexpr int kReportSchemaVersion = 1;

MetricsReport summarize(const std::vector<JudgedRanking>& judged);
nlohmann::json to_json(const MetricsReport& report);

struct BenchmarkOptions {
  std::filesystem::path snapshots_root;  // <root>/<repo_name>/<sha_before>/
  std::filesystem::path cache_dir;       // empty = no persistence
  RetrieverMode mode = RetrieverMode::kHybrid;
};

struct BenchmarkStats {
  std::size_t groups = 0;
  std::size_t index_builds = 0;
  std::size_t cache_hits = 0;
};

/// Groups usable reports by snapshot, builds or loads indices per group,
/// localizes every report and aggregates metrics. Unusable reports (no fixed
/// file present in their snapshot) are excluded and counted.
MetricsReport run_benchmark(const CorpusHandle& corpus, const Config& config,
                            const BenchmarkOptions& options, BenchmarkStats* stats = nullptr);

struct AblationCell {
  RetrieverMode mode;
  ChunkingMode chunking;
  MetricsReport metrics;
};

/// Lexical baseline plus {deep, hybrid} x {static, sliding, dynamic}; all
/// cells share one set of judged reports.
struct AblationGrid {
  MetricsReport lexical;
  std::vector<AblationCell> cells;
};

AblationGrid run_ablation(const CorpusHandle& corpus, const Config& config,
                          const BenchmarkOptions& options);

nlohmann::json to_json(const AblationGrid& grid);

}  // namespace bugloc

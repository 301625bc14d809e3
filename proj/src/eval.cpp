#include "bugloc/eval.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "bugloc/error.hpp"
#include "bugloc/lexical.hpp"
#include "bugloc/pipeline.hpp"

namespace bugloc {
namespace fs = std::filesystem;
using nlohmann::json;

JudgedRanking judge(const std::string& report_id, const RankedList& ranking,
                    const std::set<std::string>& truth, std::size_t depth) {
  JudgedRanking j;
  j.report_id = report_id;
  j.truth_size = truth.size();
  const std::size_t n = std::min(depth, ranking.items.size());
  j.relevance.reserve(n);
  for (std::size_t i = 0; i < n; ++i) j.relevance.push_back(truth.contains(ranking.items[i].file_id) ? 1 : 0);
  return j;
}

std::size_t first_relevant_rank(const JudgedRanking& judged) {
  for (std::size_t i = 0; i < judged.relevance.size(); ++i) {
    if (judged.relevance[i] != 0) return i + 1;
  }
  return 0;
}

double top_n(const std::vector<JudgedRanking>& judged, std::size_t n) {
  if (judged.empty()) throw usage_error("top_n over an empty judged set");
  if (n < 1) throw usage_error("top_n needs n >= 1");
  std::size_t hits = 0;
  for (const auto& j : judged) {
    const std::size_t r = first_relevant_rank(j);
    hits += r != 0 && r <= n;
  }
  return static_cast<double>(hits) / static_cast<double>(judged.size());
}

double mrr(const std::vector<JudgedRanking>& judged) {
  if (judged.empty()) throw usage_error("mrr over an empty judged set");
  double sum = 0.0;
  for (const auto& j : judged) {
    const std::size_t r = first_relevant_rank(j);
    if (r != 0) sum += 1.0 / static_cast<double>(r);
  }
  return sum / static_cast<double>(judged.size());
}

double average_precision(const JudgedRanking& judged) {
  double sum = 0.0;
  std::size_t found = 0;
  for (std::size_t i = 0; i < judged.relevance.size(); ++i) {
    if (judged.relevance[i] == 0) continue;
    ++found;
    sum += static_cast<double>(found) / static_cast<double>(i + 1);
  }
  return found == 0 ? 0.0 : sum / static_cast<double>(found);
}

double mean_average_precision(const std::vector<JudgedRanking>& judged) {
  if (judged.empty()) throw usage_error("map over an empty judged set");
  double sum = 0.0;
  for (const auto& j : judged) sum += average_precision(j);
  return sum / static_cast<double>(judged.size());
}

double token_overlap(const std::vector<std::string>& source_texts,
                     const std::vector<std::string>& target_texts) {
  std::unordered_set<std::string> source, target;
  for (const auto& t : source_texts) {
    for (auto& tok : tokenize(t)) source.insert(std::move(tok));
  }
  for (const auto& t : target_texts) {
    for (auto& tok : tokenize(t)) target.insert(std::move(tok));
  }
  if (source.empty()) throw data_error("source project has no tokens");
  std::size_t shared = 0;
  for (const auto& tok : source) shared += target.contains(tok);
  return static_cast<double>(shared) / static_cast<double>(source.size());
}

MetricsReport summarize(const std::vector<JudgedRanking>& judged_in) {
  // Aggregate in report-id order so the result does not depend on input order.
  std::vector<JudgedRanking> judged(judged_in);
  std::sort(judged.begin(), judged.end(),
            [](const JudgedRanking& a, const JudgedRanking& b) { return a.report_id < b.report_id; });
  MetricsReport m;
  m.evaluated = judged.size();
  if (judged.empty()) return m;
  m.top1 = top_n(judged, 1);
  m.top5 = top_n(judged, 5);
  m.top10 = top_n(judged, 10);
  m.mrr = mrr(judged);
  m.map = mean_average_precision(judged);
  for (const auto& j : judged) {
    ReportMetrics r;
    r.report_id = j.report_id;
    r.first_rank = first_relevant_rank(j);
    r.average_precision = average_precision(j);
    r.truth_size = j.truth_size;
    for (int v : j.relevance) r.retrieved_relevant += v != 0;
    m.per_report.push_back(std::move(r));
  }
  return m;
}

json to_json(const MetricsReport& m) {
  json per = json::array();
  for (const auto& r : m.per_report) {
    per.push_back({{"report_id", r.report_id},
                   {"first_rank", r.first_rank},
                   {"average_precision", r.average_precision},
                   {"truth_size", r.truth_size},
                   {"retrieved_relevant", r.retrieved_relevant}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"retriever", m.retriever},
          {"chunking", m.chunking},
          {"top1", m.top1},
          {"top5", m.top5},
          {"top10", m.top10},
          {"map", m.map},
          {"mrr", m.mrr},
          {"evaluated", m.evaluated},
          {"excluded", m.excluded},
          {"excluded_ids", m.excluded_ids},
          {"degraded", m.degraded},
          {"per_report", std::move(per)}};
}

namespace {

struct Group {
  std::string repo;
  std::string version;
  std::vector<const BugReport*> reports;
};

std::vector<Group> group_reports(const CorpusHandle& corpus) {
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (const auto& r : corpus.reports) {
    auto& g = groups[{r.repo_name, r.sha_before}];
    g.repo = r.repo_name;
    g.version = r.sha_before;
    g.reports.push_back(&r);
  }
  std::vector<Group> out;
  for (auto& [_, g] : groups) out.push_back(std::move(g));
  return out;
}

}  // namespace

MetricsReport run_benchmark(const CorpusHandle& corpus, const Config& config,
                            const BenchmarkOptions& options, BenchmarkStats* stats) {
  validate(config);
  auto provider = make_provider(config.embedding);
  LocalizeOptions lopts;
  lopts.mode = options.mode;
  lopts.rrf_k = config.rrf_k;
  lopts.lexical_depth = config.lexical_depth;
  lopts.deep_depth = config.deep_depth;

  BenchmarkStats local_stats;
  std::vector<JudgedRanking> judged;
  std::vector<std::string> excluded;
  std::size_t degraded = 0;
  const std::string hash = config_hash(config);

  for (const Group& group : group_reports(corpus)) {
    ++local_stats.groups;
    const fs::path repo_root = options.snapshots_root / group.repo / group.version;
    if (!fs::is_directory(repo_root)) {
      for (const BugReport* r : group.reports) excluded.push_back(r->id);
      continue;
    }
    const SnapshotFiles snapshot = load_snapshot(repo_root, group.version, config.include_globs);

    std::vector<std::pair<const BugReport*, std::set<std::string>>> usable;
    for (const BugReport* r : group.reports) {
      const ValidationReport v = validate_ground_truth(*r, snapshot);
      if (!v.usable()) {
        excluded.push_back(r->id);
        continue;
      }
      usable.emplace_back(r, std::set<std::string>(v.present.begin(), v.present.end()));
    }
    if (usable.empty()) continue;

    SnapshotIndex index = [&] {
      if (options.cache_dir.empty()) {
        ++local_stats.index_builds;
        return build_snapshot_index(snapshot, config, *provider);
      }
      bool rebuilt = false;
      SnapshotIndex idx = open_or_build_index(options.cache_dir / group.repo / group.version / hash,
                                              snapshot, config, *provider, &rebuilt);
      ++(rebuilt ? local_stats.index_builds : local_stats.cache_hits);
      return idx;
    }();

    for (const auto& [report, truth] : usable) {
      const LocalizationResult res = localize(*report, index.lexical, index.vectors, *provider, lopts);
      degraded += res.degraded;
      JudgedRanking j = judge(report->id, res.fused, truth, config.eval_depth);
      j.truth_size = report->fixed_files.size();
      judged.push_back(std::move(j));
    }
  }
  if (judged.empty()) throw data_error("no usable reports in corpus");

  MetricsReport m = summarize(judged);
  std::sort(excluded.begin(), excluded.end());
  m.excluded = excluded.size();
  m.excluded_ids = std::move(excluded);
  m.degraded = degraded;
  m.retriever = std::string(to_string(options.mode));
  m.chunking = options.mode == RetrieverMode::kLexical ? "n/a" : std::string(to_string(config.chunking.mode));
  if (stats) *stats = local_stats;
  return m;
}

AblationGrid run_ablation(const CorpusHandle& corpus, const Config& config,
                          const BenchmarkOptions& options) {
  AblationGrid grid;
  BenchmarkOptions lex = options;
  lex.mode = RetrieverMode::kLexical;
  grid.lexical = run_benchmark(corpus, config, lex);
  for (RetrieverMode mode : {RetrieverMode::kDeep, RetrieverMode::kHybrid}) {
    for (ChunkingMode chunking : {ChunkingMode::kStatic, ChunkingMode::kSliding, ChunkingMode::kDynamic}) {
      Config cell_config = config;
      cell_config.chunking.mode = chunking;
      BenchmarkOptions cell = options;
      cell.mode = mode;
      grid.cells.push_back({mode, chunking, run_benchmark(corpus, cell_config, cell)});
    }
  }
  return grid;
}

json to_json(const AblationGrid& grid) {
  json cells = json::array();
  for (const auto& c : grid.cells) cells.push_back(to_json(c.metrics));
  return {{"schema_version", kReportSchemaVersion}, {"lexical", to_json(grid.lexical)}, {"cells", cells}};
}

}  // namespace bugloc

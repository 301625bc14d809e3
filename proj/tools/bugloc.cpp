// Command-line front end: config, index, locate, chunk, eval, train-demo,
// overlap.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bugloc/chunker.hpp"
#include "bugloc/components.hpp"
#include "bugloc/config.hpp"
#include "bugloc/contrastive.hpp"
#include "bugloc/corpus.hpp"
#include "bugloc/error.hpp"
#include "bugloc/eval.hpp"
#include "bugloc/fusion.hpp"
#include "bugloc/pipeline.hpp"
#include "bugloc/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bugloc;

namespace {

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kData: return "data";
    case ErrorKind::kProvider: return "provider";
  }
  return "data";
}

int report_error(ErrorKind kind, const std::string& message) {
  const json err = {{"error", {{"kind", kind_name(kind)}, {"code", static_cast<int>(kind)}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  return static_cast<int>(kind);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_lossy_utf8(buf.str());
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error("cannot write " + out_path);
  out << text;
}

struct Common {
  std::string config_path;
  bool json_output = false;
};

Config resolve_config(const Common& common) {
  return common.config_path.empty() ? Config{} : load_config(common.config_path);
}

// --- locate -----------------------------------------------------------------

struct LocateArgs {
  std::string corpus;
  std::string report_id;
  std::string report_file;
  std::string snapshot;
  std::string snapshots_root;
  std::string index_dir;
  std::string mode = "hybrid";
  double k = -1.0;
  std::size_t top = 10;
};

std::string rank_cell(const RankedList* list, const std::string& file) {
  if (!list) return "-";
  const auto r = list->rank_of(file);
  return r ? std::to_string(*r) : "-";
}

int run_locate(const Common& common, const LocateArgs& args) {
  Config config = resolve_config(common);
  if (args.k >= 0.0) config.rrf_k = args.k;
  validate(config);

  BugReport report;
  if (!args.report_file.empty()) {
    json doc;
    try {
      doc = json::parse(read_file(args.report_file));
    } catch (const json::exception& e) {
      throw data_error(args.report_file + ": " + e.what());
    }
    report = parse_bug_report(doc);
  } else {
    if (args.corpus.empty() || args.report_id.empty())
      throw usage_error("locate needs --report-file or both --corpus and --report-id");
    const CorpusHandle corpus = ingest_dataset(args.corpus);
    const BugReport* found = corpus.find(args.report_id);
    if (!found) throw data_error("no report with id '" + args.report_id + "'");
    report = *found;
  }

  fs::path root = args.snapshot;
  if (root.empty()) {
    if (args.snapshots_root.empty()) throw usage_error("locate needs --snapshot or --snapshots-root");
    root = fs::path(args.snapshots_root) / report.repo_name / report.sha_before;
  }
  const SnapshotFiles snapshot = load_snapshot(root, report.sha_before, config.include_globs);
  auto provider = make_provider(config.embedding);
  SnapshotIndex index = args.index_dir.empty()
                            ? build_snapshot_index(snapshot, config, *provider)
                            : open_or_build_index(args.index_dir, snapshot, config, *provider);

  LocalizeOptions opts;
  opts.mode = retriever_mode_from_string(args.mode);
  opts.rrf_k = config.rrf_k;
  opts.lexical_depth = config.lexical_depth;
  opts.deep_depth = config.deep_depth;
  LocalizationResult result = localize(report, index.lexical, index.vectors, *provider, opts);
  result.fused.truncate(args.top);

  const auto per = [&](const char* tag) -> const RankedList* {
    const auto it = result.per_retriever.find(tag);
    return it == result.per_retriever.end() ? nullptr : &it->second;
  };
  if (common.json_output) {
    json ranked = json::array();
    for (std::size_t i = 0; i < result.fused.items.size(); ++i) {
      const auto& item = result.fused.items[i];
      json row = {{"rank", i + 1}, {"file", item.file_id}, {"score", item.score}};
      for (const char* tag : {"lexical", "deep"}) {
        if (const RankedList* l = per(tag)) {
          const auto r = l->rank_of(item.file_id);
          row[std::string(tag) + "_rank"] = r ? json(*r) : json(nullptr);
        }
      }
      ranked.push_back(std::move(row));
    }
    const json out = {{"report_id", result.report_id},
                      {"mode", args.mode},
                      {"k", opts.rrf_k},
                      {"degraded", result.degraded},
                      {"degradation_reason", result.degradation_reason},
                      {"timings_ms",
                       {{"lexical", result.lexical_ms}, {"deep", result.deep_ms}, {"fusion", result.fusion_ms}}},
                      {"ranked", ranked}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  if (result.degraded) std::cerr << "warning: deep retriever unavailable, lexical only (" << result.degradation_reason << ")\n";
  std::cout << "report " << result.report_id << "  mode=" << args.mode << "  k=" << opts.rrf_k << "\n";
  std::cout << std::left << std::setw(6) << "rank" << std::setw(12) << "score" << std::setw(9) << "lexical"
            << std::setw(6) << "deep" << "file\n";
  for (std::size_t i = 0; i < result.fused.items.size(); ++i) {
    const auto& item = result.fused.items[i];
    std::ostringstream score;
    score << std::fixed << std::setprecision(6) << item.score;
    std::cout << std::left << std::setw(6) << (i + 1) << std::setw(12) << score.str() << std::setw(9)
              << rank_cell(per("lexical"), item.file_id) << std::setw(6) << rank_cell(per("deep"), item.file_id)
              << item.file_id << "\n";
  }
  return 0;
}

// --- index ------------------------------------------------------------------

struct IndexArgs {
  std::string snapshot;
  std::string version = "working-tree";
  std::string out;
};

int run_index(const Common& common, const IndexArgs& args) {
  const Config config = resolve_config(common);
  const SnapshotFiles snapshot = load_snapshot(args.snapshot, args.version, config.include_globs);
  auto provider = make_provider(config.embedding);
  bool rebuilt = false;
  const SnapshotIndex index = open_or_build_index(args.out, snapshot, config, *provider, &rebuilt);
  json out = to_json(index.manifest);
  out["rebuilt"] = rebuilt;
  out["warnings"] = snapshot.warnings;
  if (common.json_output) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << (rebuilt ? "built" : "up to date") << ": " << index.manifest.lexical_docs << " files, "
              << index.manifest.chunks << " chunks, config " << index.manifest.config_hash << " -> "
              << args.out << "\n";
    for (const auto& w : snapshot.warnings) std::cerr << "warning: " << w << "\n";
  }
  return 0;
}

// --- chunk ------------------------------------------------------------------

struct ChunkArgs {
  std::string file;
  std::string spans;
  std::string language;
  std::size_t window = 0;
  std::size_t window_tokens = 0;
  std::string mode = "dynamic";
  std::size_t stride = 0;
};

int run_chunk(const Common& common, const ChunkArgs& args) {
  Config config = resolve_config(common);
  ChunkingConfig cc = config.chunking;
  cc.mode = chunking_mode_from_string(args.mode);
  if (args.window_tokens > 0) cc.window_size = window_from_tokens(args.window_tokens, cc.tokens_per_line);
  if (args.window > 0) cc.window_size = args.window;
  if (args.stride > 0) cc.stride = args.stride;
  if (cc.stride > cc.window_size) cc.stride = cc.window_size;

  const std::string text = read_file(args.file);
  const std::string language = args.language.empty() ? language_from_path(args.file) : args.language;
  std::vector<Chunk> chunks;
  if (!args.spans.empty() && cc.mode == ChunkingMode::kDynamic) {
    const std::size_t total = count_lines(text);
    if (total > 0) {
      const auto spans = load_external_spans(args.spans);
      const auto costs = build_cost_map(spans, total, cc.kind_costs, cc.default_cost);
      chunks = apply_plan(text, dynamic_chunk(costs, cc.window_size), args.file);
    }
  } else {
    chunks = chunk_file(args.file, text, language, cc);
  }
  json out = json::array();
  for (const auto& c : chunks) {
    out.push_back({{"file", c.file_path}, {"start_line", c.start_line}, {"end_line", c.end_line}, {"text", c.text}});
  }
  std::cout << out.dump(common.json_output ? -1 : 2) << "\n";
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string corpus;
  std::string snapshots;
  std::string mode = "hybrid";
  std::string chunking;
  double k = -1.0;
  std::size_t depth = 0;
  std::string out;
  std::string cache;
  bool grid = false;
};

int run_eval(const Common& common, const EvalArgs& args) {
  Config config = resolve_config(common);
  if (args.k >= 0.0) config.rrf_k = args.k;
  if (args.depth > 0) config.eval_depth = args.depth;
  if (!args.chunking.empty()) config.chunking.mode = chunking_mode_from_string(args.chunking);
  validate(config);

  const CorpusHandle corpus = ingest_dataset(args.corpus);
  for (const auto& d : corpus.diagnostics) std::cerr << "warning: " << args.corpus << ":" << d.line << ": " << d.message << "\n";
  BenchmarkOptions options;
  options.snapshots_root = args.snapshots;
  options.cache_dir = args.cache;
  options.mode = retriever_mode_from_string(args.mode);

  json out;
  if (args.grid) {
    out = to_json(run_ablation(corpus, config, options));
  } else {
    out = to_json(run_benchmark(corpus, config, options));
  }
  out["config_hash"] = config_hash(config);
  out["rrf_k"] = config.rrf_k;
  out["depth"] = config.eval_depth;
  out["diagnostics"] = corpus.diagnostics.size();
  if (!args.out.empty()) write_output(args.out, out.dump(2) + "\n");
  if (common.json_output || args.out.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    const auto line = [](const json& m) {
      std::ostringstream s;
      s << std::fixed << std::setprecision(4) << std::left << std::setw(8) << m["retriever"].get<std::string>()
        << std::setw(9) << m["chunking"].get<std::string>() << " top1=" << m["top1"].get<double>()
        << " top5=" << m["top5"].get<double>() << " top10=" << m["top10"].get<double>()
        << " map=" << m["map"].get<double>() << " mrr=" << m["mrr"].get<double>()
        << " evaluated=" << m["evaluated"].get<std::size_t>() << " excluded=" << m["excluded"].get<std::size_t>();
      return s.str();
    };
    if (args.grid) {
      std::cout << line(out["lexical"]) << "\n";
      for (const auto& c : out["cells"]) std::cout << line(c) << "\n";
    } else {
      std::cout << line(out) << "\n";
    }
  }
  return 0;
}

// --- train-demo -------------------------------------------------------------

struct TrainArgs {
  TrainConfig train;
  std::string out;
};

int run_train(const Common& common, TrainArgs args) {
  if (!common.config_path.empty()) {
    const Config config = load_config(common.config_path);
    args.train.loss = config.loss;
    args.train.seed = config.seed;
  }
  SyntheticSpec spec;
  spec.seed = args.train.seed;
  const SyntheticDataset ds = make_synthetic_dataset(spec);
  const TrainResult result = train_toy_embedder(ds, args.train);
  std::ostringstream csv;
  csv << "epoch,loss,median_pos_sim,median_neg_sim\n";
  csv << std::setprecision(10);
  for (const auto& e : result.history) {
    csv << e.epoch << "," << e.loss << "," << e.median_pos_sim << "," << e.median_neg_sim << "\n";
  }
  write_output(args.out, csv.str());
  return 0;
}

// --- overlap ----------------------------------------------------------------

struct OverlapArgs {
  std::string corpus;
  std::string source;
  std::string target;
};

int run_overlap(const Common& common, const OverlapArgs& args) {
  const CorpusHandle corpus = ingest_dataset(args.corpus);
  std::vector<std::string> src, dst;
  for (const auto& r : corpus.reports) {
    if (r.repo_name == args.source) src.push_back(r.query_text());
    if (r.repo_name == args.target) dst.push_back(r.query_text());
  }
  if (src.empty()) throw data_error("no reports for source project '" + args.source + "'");
  if (dst.empty()) throw data_error("no reports for target project '" + args.target + "'");
  const double value = token_overlap(src, dst);
  if (common.json_output) {
    std::cout << json{{"source", args.source}, {"target", args.target}, {"overlap", value}}.dump() << "\n";
  } else {
    std::cout << std::setprecision(6) << value << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bug localization over source snapshots: BM25 + dense retrieval fused with RRF"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_flag("--json", common.json_output, "Machine-readable output");

  auto* cfg = app.add_subcommand("config", "Configuration helpers");
  auto* cfg_init = cfg->add_subcommand("init", "Print the default config");
  std::string cfg_out;
  cfg_init->add_option("--out", cfg_out, "Write to file instead of stdout");
  cfg->require_subcommand(1);

  IndexArgs index_args;
  auto* index = app.add_subcommand("index", "Build (or reuse) indices for a snapshot");
  index->add_option("--snapshot", index_args.snapshot, "Repository snapshot directory")->required();
  index->add_option("--version", index_args.version, "Snapshot version id");
  index->add_option("--out", index_args.out, "Index directory")->required();

  LocateArgs loc;
  auto* locate = app.add_subcommand("locate", "Rank files for one bug report");
  locate->add_option("--corpus", loc.corpus, "JSONL dataset");
  locate->add_option("--report-id", loc.report_id, "Report id (repo#issue or issue id)");
  locate->add_option("--report-file", loc.report_file, "Single JSON report record");
  locate->add_option("--snapshot", loc.snapshot, "Repository snapshot directory");
  locate->add_option("--snapshots-root", loc.snapshots_root, "Root holding <repo>/<sha_before>/ trees");
  locate->add_option("--index", loc.index_dir, "Index directory (cached)");
  locate->add_option("--mode", loc.mode, "lexical | deep | hybrid");
  locate->add_option("--k", loc.k, "RRF k (default from config, 60)");
  locate->add_option("--top", loc.top, "Number of files to print");

  ChunkArgs ch;
  auto* chunk = app.add_subcommand("chunk", "Chunk one source file");
  chunk->add_option("--file", ch.file, "Source file")->required();
  chunk->add_option("--spans", ch.spans, "External span JSON file");
  chunk->add_option("--language", ch.language, "Override language detection");
  chunk->add_option("--window", ch.window, "Maximum chunk size in lines");
  chunk->add_option("--window-tokens", ch.window_tokens, "Maximum chunk size in model tokens");
  chunk->add_option("--mode", ch.mode, "dynamic | static | sliding");
  chunk->add_option("--stride", ch.stride, "Sliding-window stride in lines");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Benchmark a corpus");
  eval->add_option("--corpus", ev.corpus, "JSONL dataset")->required();
  eval->add_option("--snapshots", ev.snapshots, "Root holding <repo>/<sha_before>/ trees");
  eval->add_option("--mode", ev.mode, "lexical | deep | hybrid");
  eval->add_option("--chunking", ev.chunking, "static | sliding | dynamic");
  eval->add_option("--k", ev.k, "RRF k");
  eval->add_option("--depth", ev.depth, "Judged list depth");
  eval->add_option("--out", ev.out, "Write report JSON here");
  eval->add_option("--cache", ev.cache, "Index cache directory");
  eval->add_flag("--grid", ev.grid, "Run the retriever x chunking ablation grid");

  TrainArgs tr;
  auto* train = app.add_subcommand("train-demo", "Train the toy embedder on synthetic data");
  train->add_option("--epochs", tr.train.epochs);
  train->add_option("--batch", tr.train.batch_size);
  train->add_option("--alpha", tr.train.loss.alpha);
  train->add_option("--beta", tr.train.loss.beta);
  train->add_option("--tau", tr.train.loss.tau);
  train->add_option("--lr", tr.train.learning_rate);
  train->add_option("--seed", tr.train.seed);
  train->add_option("--out", tr.out, "CSV output file (default stdout)");

  OverlapArgs ov;
  auto* overlap = app.add_subcommand("overlap", "Directional token overlap between two projects' reports");
  overlap->add_option("--corpus", ov.corpus, "JSONL dataset")->required();
  overlap->add_option("--source-project", ov.source)->required();
  overlap->add_option("--target-project", ov.target)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(ErrorKind::kUsage, e.what());
  }

  try {
    if (*cfg_init) {
      write_output(cfg_out, to_json(resolve_config(common)).dump(2) + "\n");
      return 0;
    }
    if (*index) return run_index(common, index_args);
    if (*locate) return run_locate(common, loc);
    if (*chunk) return run_chunk(common, ch);
    if (*eval) {
      if (ev.snapshots.empty()) throw usage_error("eval needs --snapshots");
      return run_eval(common, ev);
    }
    if (*train) return run_train(common, tr);
    if (*overlap) return run_overlap(common, ov);
  } catch (const Error& e) {
    return report_error(e.kind(), e.what());
  } catch (const std::exception& e) {
    return report_error(ErrorKind::kData, e.what());
  }
  return report_error(ErrorKind::kUsage, "no command given");
}

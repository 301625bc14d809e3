// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from the independent oracles in
// oracles.hpp or from closed forms written out here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bugloc/chunker.hpp"
#include "bugloc/contrastive.hpp"
#include "bugloc/eval.hpp"
#include "bugloc/fusion.hpp"
#include "bugloc/lexical.hpp"
#include "bugloc/text.hpp"
#include "oracles.hpp"

using namespace bugloc;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// ---------------------------------------------------------------------------

Outcome metric_oracles() {
  Outcome o;
  const std::vector<int> r1 = {0, 0, 1, 0, 1, 0}, r2 = {1, 0, 0, 0, 0, 1};
  const std::vector<JudgedRanking> judged = {{"q1", r1, 2}, {"q2", r2, 2}};
  const double mrr_v = mrr(judged), map_v = mean_average_precision(judged);
  o.expect(near(mrr_v, 0.6667, 1e-4), "MRR " + fmt(mrr_v));
  o.expect(near(map_v, 0.5167, 0.005), "MAP " + fmt(map_v));
  const double mrr_o = (oracle::reciprocal_rank(r1) + oracle::reciprocal_rank(r2)) / 2;
  const double map_o = (oracle::average_precision(r1) + oracle::average_precision(r2)) / 2;
  o.expect(near(mrr_v, mrr_o, 1e-12), "MRR disagrees with oracle");
  o.expect(near(map_v, map_o, 1e-12), "MAP disagrees with oracle");
  o.expect(top_n(judged, 1) == 0.5 && top_n(judged, 5) == 1.0, "Top-N");
  if (o.ok) o.detail = "MRR=" + fmt(mrr_v) + " MAP=" + fmt(map_v);
  return o;
}

RankedList ranked(const std::vector<std::string>& files) {
  RankedList l{"r", {}};
  double s = static_cast<double>(files.size());
  for (const auto& f : files) l.items.push_back({f, s--});
  return l;
}

double score_of(const RankedList& l, const std::string& file) {
  for (const auto& it : l.items)
    if (it.file_id == file) return it.score;
  return 0.0;
}

Outcome rrf_algebra() {
  Outcome o;
  const RankedList both = rrf_fuse({ranked({"x"}), ranked({"x"})});
  o.expect(near(score_of(both, "x"), 2.0 / 61.0, 1e-9), "double rank-1 score");
  const RankedList ab = rrf_fuse({ranked({"A", "B", "C"}), ranked({"D", "B", "A"})});
  o.expect(near(score_of(ab, "A"), 1.0 / 61 + 1.0 / 63, 1e-9), "A score");
  o.expect(near(score_of(ab, "B"), 2.0 / 62, 1e-9), "B score");
  o.expect(score_of(ab, "A") > score_of(ab, "B"), "A should outrank B");

  std::mt19937 rng(1000);
  const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  for (int trial = 0; trial < 1000 && o.ok; ++trial) {
    std::vector<std::string> x = pool, y = pool;
    std::shuffle(x.begin(), x.end(), rng);
    std::shuffle(y.begin(), y.end(), rng);
    x.resize(2 + rng() % (pool.size() - 1));
    y.resize(1 + rng() % pool.size());
    // Monotonicity: moving a file up one place in x raises its fused score.
    const std::size_t pos = 1 + rng() % (x.size() - 1);
    std::vector<std::string> promoted = x;
    std::swap(promoted[pos], promoted[pos - 1]);
    const std::string& f = x[pos];
    o.expect(score_of(rrf_fuse({ranked(promoted), ranked(y)}), f) >
                 score_of(rrf_fuse({ranked(x), ranked(y)}), f),
             "monotonicity violated at trial " + std::to_string(trial));
    // Unanimity: the common leader of both lists leads the fusion.
    std::vector<std::string> y2 = y;
    y2.erase(std::remove(y2.begin(), y2.end(), x[0]), y2.end());
    y2.insert(y2.begin(), x[0]);
    o.expect(rrf_fuse({ranked(x), ranked(y2)}).items[0].file_id == x[0],
             "unanimity violated at trial " + std::to_string(trial));
  }
  if (o.ok) o.detail = "hand values to 1e-9, 1000 random pairs";
  return o;
}

Outcome dp_optimality() {
  Outcome o;
  std::mt19937 rng(200);
  std::uniform_real_distribution<double> value(0.0, 50.0);
  for (int trial = 0; trial < 200 && o.ok; ++trial) {
    const std::size_t n = 1 + rng() % 15;
    const std::size_t w = 1 + rng() % 5;
    SplitCostMap map(n, 25.0);
    for (std::size_t line = 1; line <= n; ++line)
      if (rng() % 3 == 0) map.set(line, value(rng));
    const ChunkPlan plan = dynamic_chunk(map, w);
    const double best =
        oracle::min_segmentation_cost(n, w, [&](std::size_t line) { return map.cost_at(line); });
    const std::string tag = " (case " + std::to_string(trial) + ", n=" + std::to_string(n) +
                            ", w=" + std::to_string(w) + ")";
    o.expect(near(plan.total_cost, best, 1e-9 * std::max(1.0, best)),
             "cost " + fmt(plan.total_cost) + " vs optimum " + fmt(best) + tag);

    std::string text;
    for (std::size_t i = 1; i <= n; ++i) text += "l" + std::to_string(i) + "\n";
    const auto chunks = apply_plan(text, plan);
    std::string joined;
    std::size_t next = 1;
    for (const auto& c : chunks) {
      o.expect(c.start_line == next, "gap or overlap" + tag);
      o.expect(c.end_line >= c.start_line && c.end_line - c.start_line + 1 <= w, "window exceeded" + tag);
      next = c.end_line + 1;
      joined += c.text;
    }
    o.expect(next == n + 1, "partition does not reach the end" + tag);
    o.expect(joined == text, "text not preserved" + tag);
  }
  if (o.ok) o.detail = "200 cases equal to exhaustive minimum";
  return o;
}

Embedding random_unit(std::mt19937& rng, std::size_t d) {
  std::normal_distribution<double> g;
  Embedding v(d);
  for (double& x : v) x = g(rng);
  normalize(v);
  return v;
}

std::vector<std::vector<double>> cosine(const std::vector<Embedding>& raw) {
  const std::size_t n = raw.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double x : raw[i]) s += x * x;
    norms[i] = std::sqrt(s);
  }
  std::vector<std::vector<double>> s(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t t = 0; t < raw[i].size(); ++t) acc += raw[i][t] * raw[k][t];
      s[i][k] = acc / (norms[i] * norms[k]);
    }
  return s;
}

Outcome loss_correctness() {
  Outcome o;
  std::mt19937 rng(4);
  // (a) identity with unit multipliers
  double worst_identity = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t a = 1 + rng() % 4, c = 2 + rng() % 4;
    std::vector<Embedding> anchors, candidates;
    for (std::size_t i = 0; i < a; ++i) anchors.push_back(random_unit(rng, 6));
    for (std::size_t i = 0; i < c; ++i) candidates.push_back(random_unit(rng, 6));
    std::vector<std::size_t> pos(a);
    for (auto& p : pos) p = rng() % c;
    const Batch b = make_batch(anchors, candidates, pos);
    const Matrix s = similarity_matrix(b.embeddings);
    const double tau = 0.05 + 0.01 * (rng() % 50);
    const double diff = std::abs(hard_ntxent_loss(s, b.labels, {tau, 1.0, 1.0}).loss -
                                 ntxent_loss(s, b.labels, tau).mean);
    worst_identity = std::max(worst_identity, diff);
  }
  o.expect(worst_identity <= 1e-12, "alpha=beta=1 identity off by " + fmt(worst_identity));

  // (b) gradients against central differences of the oracle loss
  const double eps = 1e-6;
  double worst_grad = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t a = 1 + rng() % 4;
    const std::size_t c = 2 + rng() % (7 - a);  // pool size a + c <= 8
    const std::size_t d = 3 + rng() % 5;
    std::vector<Embedding> anchors, candidates;
    for (std::size_t i = 0; i < a; ++i) anchors.push_back(random_unit(rng, d));
    for (std::size_t i = 0; i < c; ++i) candidates.push_back(random_unit(rng, d));
    std::vector<std::size_t> pos(a);
    for (auto& p : pos) p = rng() % c;
    const Batch b = make_batch(anchors, candidates, pos);
    std::vector<Embedding> raw = b.embeddings;
    for (auto& v : raw)
      for (double& x : v) x *= 0.5 + 0.05 * (rng() % 40);

    const std::size_t n = raw.size();
    std::vector<int> posv(n, -1);
    std::vector<std::vector<int>> neg(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        if (b.labels.at(i, k) == PairLabel::kPositive) posv[i] = static_cast<int>(k);
        if (b.labels.at(i, k) == PairLabel::kNegative) neg[i][k] = 1;
      }
    const LossParams p{0.1 + 0.05 * (rng() % 6), 2.0, 3.0};
    const LossReport rep = hard_ntxent_with_gradient(raw, b.labels, p);
    double max_diff = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < d; ++t) {
        auto plus = raw, minus = raw;
        plus[i][t] += eps;
        minus[i][t] -= eps;
        const double num = (oracle::masked_ntxent(cosine(plus), posv, neg, p.tau, p.alpha, p.beta) -
                            oracle::masked_ntxent(cosine(minus), posv, neg, p.tau, p.alpha, p.beta)) /
                           (2 * eps);
        max_diff = std::max(max_diff, std::abs(num - rep.grad_inputs[i][t]));
        max_abs = std::max(max_abs, std::abs(rep.grad_inputs[i][t]));
      }
    worst_grad = std::max(worst_grad, max_abs > 0.0 ? max_diff / max_abs : max_diff);
  }
  o.expect(worst_grad <= 1e-5, "gradient relative error " + fmt(worst_grad));

  // (c) uniform similarities
  double worst_uniform = 0.0;
  for (std::size_t n = 3; n <= 10; ++n) {
    const Embedding e = random_unit(rng, 4);
    const std::vector<Embedding> candidates(n - 1, e);
    const Batch b = make_batch({e}, candidates, {0});
    const auto r = ntxent_loss(similarity_matrix(b.embeddings), b.labels, 0.07);
    worst_uniform = std::max(worst_uniform, std::abs(r.mean - std::log(static_cast<double>(n - 1))));
  }
  o.expect(worst_uniform <= 1e-9, "uniform closed form off by " + fmt(worst_uniform));
  if (o.ok)
    o.detail = "identity " + fmt(worst_identity) + ", grad rel err " + fmt(worst_grad) +
               ", uniform " + fmt(worst_uniform);
  return o;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Outcome hard_example_separation() {
  Outcome o;
  const SyntheticDataset ds = make_synthetic_dataset(SyntheticSpec{});
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.batch_size = 16;
  TrainResult result = train_toy_embedder(ds, cfg);
  o.expect(result.history.size() == 15, "expected 15 epochs");
  const double first = result.history.front().loss, last = result.history.back().loss;
  o.expect(last < first, "final loss " + fmt(last) + " not below initial " + fmt(first));

  // Held-out separation measured here, not taken from the trainer's history.
  std::vector<std::string> reports, files;
  for (const auto& p : ds.held_out) {
    reports.push_back(p.report);
    files.push_back(p.file);
  }
  const auto r = result.model.embed(reports);
  const auto f = result.model.embed(files);
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t k = 0; k < f.size(); ++k) {
      double s = 0.0;
      for (std::size_t t = 0; t < r[i].size(); ++t) s += r[i][t] * f[k][t];
      if (i == k) pos.push_back(s);
      else if (ds.held_out[i].label != ds.held_out[k].label) neg.push_back(s);
    }
  const double gap = median(pos) - median(neg);
  o.expect(gap >= 0.2, "held-out gap " + fmt(gap));
  if (o.ok)
    o.detail = "loss " + fmt(first) + " -> " + fmt(last) + ", held-out median pos " + fmt(median(pos)) +
               " neg " + fmt(median(neg));
  return o;
}

Outcome bm25_correctness() {
  Outcome o;
  const LexicalIndex single = LexicalIndex::build({{"d", "needle", ""}});
  const double s = single.score({"needle"}, "d");
  o.expect(near(s, std::log(4.0 / 3.0), 1e-9), "single-doc score " + fmt(s));

  std::mt19937 rng(6);
  const std::vector<std::string> filler = {"alpha", "beta", "gamma", "delta", "eps"};
  for (int corpus = 0; corpus < 50 && o.ok; ++corpus) {
    std::vector<LexicalDoc> docs;
    for (int d = 0; d < 20; ++d) {
      std::string text;
      const int len = 1 + static_cast<int>(rng() % 15);
      for (int t = 0; t < len; ++t) text += filler[rng() % filler.size()] + " ";
      docs.push_back({"bg" + std::to_string(d), text, ""});
    }
    const std::size_t len = 2 + rng() % 10;
    for (std::size_t tf = 1; tf <= len; ++tf) {
      std::string text;
      for (std::size_t t = 0; t < len; ++t) text += t < tf ? "target " : filler[rng() % filler.size()] + " ";
      docs.push_back({"tf" + std::to_string(tf), text, ""});
    }
    const LexicalIndex idx = LexicalIndex::build(docs);
    for (std::size_t tf = 2; tf <= len; ++tf) {
      o.expect(idx.score({"target"}, "tf" + std::to_string(tf)) >
                   idx.score({"target"}, "tf" + std::to_string(tf - 1)),
               "tf monotonicity broken in corpus " + std::to_string(corpus));
    }
  }
  if (o.ok) o.detail = "single-doc score " + fmt(s) + ", 50 random corpora monotone";
  return o;
}

Outcome planted_benchmark() {
  Outcome o;
  const std::filesystem::path root = std::filesystem::path(TESTDATA_DIR) / "planted";
  const CorpusHandle corpus = ingest_dataset(root / "dataset.jsonl");
  const Config config;
  BenchmarkOptions opts;
  opts.snapshots_root = root / "snapshots";

  const auto top1 = [](const MetricsReport& m) {
    // Recomputed from per-report ranks.
    std::size_t hits = 0;
    for (const auto& r : m.per_report) hits += r.first_rank == 1;
    return m.per_report.empty() ? 0.0 : static_cast<double>(hits) / m.per_report.size();
  };

  const AblationGrid grid = run_ablation(corpus, config, opts);
  o.expect(grid.lexical.evaluated == 10, "expected 10 evaluated reports");
  o.expect(grid.cells.size() == 6, "expected 6 grid cells");
  const MetricsReport* hybrid_dynamic = nullptr;
  const MetricsReport* hybrid_static = nullptr;
  const MetricsReport* deep_dynamic = nullptr;
  for (const auto& cell : grid.cells) {
    if (cell.mode == RetrieverMode::kHybrid && cell.chunking == ChunkingMode::kDynamic) hybrid_dynamic = &cell.metrics;
    if (cell.mode == RetrieverMode::kHybrid && cell.chunking == ChunkingMode::kStatic) hybrid_static = &cell.metrics;
    if (cell.mode == RetrieverMode::kDeep && cell.chunking == ChunkingMode::kDynamic) deep_dynamic = &cell.metrics;
    o.expect(cell.metrics.excluded_ids == grid.lexical.excluded_ids, "cells judged on different sets");
  }
  if (!hybrid_dynamic || !hybrid_static || !deep_dynamic) {
    o.expect(false, "grid is missing cells");
    return o;
  }
  // The default configuration chunks dynamically, so that cell is the
  // plain hybrid run.
  const double h1 = top1(*hybrid_dynamic), l1 = top1(grid.lexical), d1 = top1(*deep_dynamic);
  o.expect(h1 == 1.0, "hybrid Top1 " + fmt(h1));
  o.expect(l1 >= 0.5, "lexical Top1 " + fmt(l1));
  o.expect(d1 >= 0.5, "deep Top1 " + fmt(d1));
  o.expect(hybrid_dynamic->map >= hybrid_static->map,
           "dynamic hybrid MAP " + fmt(hybrid_dynamic->map) + " < static " + fmt(hybrid_static->map));
  if (o.ok)
    o.detail = "Top1 hybrid " + fmt(h1) + " lexical " + fmt(l1) + " deep " + fmt(d1) + "; MAP dynamic " +
               fmt(hybrid_dynamic->map) + " static " + fmt(hybrid_static->map);
  return o;
}

std::set<std::string> token_set(const std::vector<std::string>& texts) {
  std::set<std::string> out;
  for (const auto& t : texts)
    for (auto& tok : tokenize(t)) out.insert(tok);
  return out;
}

Outcome overlap_directionality() {
  Outcome o;
  o.expect(token_overlap({"a b"}, {"b c"}) == 0.5, "{a,b}->{b,c}");
  o.expect(token_overlap({"b c"}, {"a b"}) == 0.5, "{b,c}->{a,b}");

  // Asymmetric fixture: a small project whose vocabulary sits inside a
  // larger one.
  const std::vector<std::string> small = {"Save fails when the document is empty",
                                          "Empty document cannot be saved"};
  const std::vector<std::string> large = {
      "Save dialog freezes when the document is large",
      "Exporting an empty table crashes the exporter",
      "Font fallback renders boxes for CJK text in the document view",
      "Saved settings are lost after upgrade when sync is enabled"};
  const double ab = token_overlap(small, large), ba = token_overlap(large, small);
  const double ab_o = oracle::overlap(token_set(small), token_set(large));
  const double ba_o = oracle::overlap(token_set(large), token_set(small));
  o.expect(ab == ab_o, "small->large " + fmt(ab) + " vs " + fmt(ab_o));
  o.expect(ba == ba_o, "large->small " + fmt(ba) + " vs " + fmt(ba_o));
  o.expect(ab != ba, "overlap is symmetric on the asymmetric fixture");
  if (o.ok) o.detail = "small->large " + fmt(ab) + ", large->small " + fmt(ba);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "metric oracles", 1.0, metric_oracles},
      {2, "rrf algebra", 5.0, rrf_algebra},
      {3, "dp chunking optimality", 30.0, dp_optimality},
      {4, "loss correctness", 60.0, loss_correctness},
      {5, "hard-example separation", 120.0, hard_example_separation},
      {6, "bm25 correctness", 5.0, bm25_correctness},
      {7, "planted-signal benchmark", 120.0, planted_benchmark},
      {8, "token-overlap directionality", 1.0, overlap_directionality},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs >= c.limit_s) {
      o.ok = false;
      o.detail = "took " + fmt(secs) + " s, limit " + fmt(c.limit_s) + " s";
    }
    failures += o.ok ? 0 : 1;
    std::printf("%s criterion %d (%s): %s [%.3f s]\n", o.ok ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
  }
  return failures == 0 ? 0 : 1;
}

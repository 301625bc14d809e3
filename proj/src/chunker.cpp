#include "bugloc/chunker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bugloc/error.hpp"
#include "bugloc/text.hpp"

namespace bugloc {

KindCosts default_kind_costs() {
  return {{ComponentKind::kClass, 1.0},
          {ComponentKind::kInterface, 1.0},
          {ComponentKind::kMethod, 2.0},
          {ComponentKind::kFunction, 2.0},
          {ComponentKind::kBlock, 5.0}};
}

SplitCostMap::SplitCostMap(std::size_t total_lines, double default_cost)
    : total_lines_(total_lines), default_cost_(default_cost) {
  if (total_lines == 0) throw usage_error("cost map needs at least one line");
  if (!(default_cost > 0.0) || !std::isfinite(default_cost))
    throw usage_error("default_cost must be positive and finite");
}

void SplitCostMap::set(std::size_t line, double cost) {
  if (line < 1 || line > total_lines_) {
    throw data_error("split cost for line " + std::to_string(line) + " outside [1, " +
                     std::to_string(total_lines_) + "]");
  }
  if (!(cost >= 0.0) || !std::isfinite(cost)) throw usage_error("split costs must be finite and >= 0");
  costs_[line] = cost;
}

double SplitCostMap::cost_at(std::size_t line) const {
  const auto it = costs_.find(line);
  return it == costs_.end() ? default_cost_ : it->second;
}

SplitCostMap build_cost_map(const std::vector<ComponentSpan>& spans, std::size_t total_lines,
                            const KindCosts& kind_costs, double default_cost) {
  SplitCostMap map(total_lines, default_cost);
  for (const auto& span : spans) {
    if (span.end_line > total_lines) {
      throw data_error("span '" + span.name + "' ends at line " + std::to_string(span.end_line) +
                       " beyond file length " + std::to_string(total_lines));
    }
    const auto kc = kind_costs.find(span.kind);
    if (kc == kind_costs.end()) continue;
    if (!map.has_entry(span.end_line) || kc->second < map.cost_at(span.end_line)) {
      map.set(span.end_line, kc->second);
    }
  }
  return map;
}

namespace {

std::vector<std::size_t> backtrack(const std::vector<DpCell>& dp, std::size_t total_lines) {
  std::vector<std::size_t> breaks;
  for (std::size_t i = total_lines; i > 0; i = dp[i].breakpoint) breaks.push_back(i);
  std::reverse(breaks.begin(), breaks.end());
  return breaks;
}

}  // namespace

ChunkPlan dynamic_chunk(const SplitCostMap& cost_map, std::size_t window_size) {
  if (window_size < 1) throw usage_error("window_size must be >= 1");
  const std::size_t n = cost_map.total_lines();

  ChunkPlan plan;
  plan.total_lines = n;
  plan.dp_table.assign(n + 1, DpCell{});
  for (std::size_t i = 1; i <= n; ++i) {
    const double split = cost_map.cost_at(i);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = i > window_size ? i - window_size : 0; j < i; ++j) {
      const double cost = plan.dp_table[j].min_cost + split;
      if (cost < best) {
        best = cost;
        best_j = j;
      }
    }
    plan.dp_table[i] = {best, best_j};
  }
  plan.breakpoints = backtrack(plan.dp_table, n);
  plan.total_cost = plan.dp_table[n].min_cost;
  return plan;
}

ChunkPlan static_chunk(std::size_t total_lines, std::size_t window_size,
                       const SplitCostMap* cost_map) {
  if (window_size < 1) throw usage_error("window_size must be >= 1");
  if (total_lines < 1) throw usage_error("static_chunk needs at least one line");
  ChunkPlan plan;
  plan.total_lines = total_lines;
  for (std::size_t b = window_size; b < total_lines; b += window_size) plan.breakpoints.push_back(b);
  plan.breakpoints.push_back(total_lines);
  if (cost_map) {
    for (std::size_t b : plan.breakpoints) plan.total_cost += cost_map->cost_at(b);
  }
  return plan;
}

std::vector<Chunk> apply_plan(std::string_view source, const ChunkPlan& plan,
                              const std::string& file_path) {
  const auto lines = split_lines_keep_ends(source);
  if (lines.size() != plan.total_lines || plan.breakpoints.empty() ||
      plan.breakpoints.back() != lines.size()) {
    throw data_error("chunk plan for " + std::to_string(plan.total_lines) + " lines applied to " +
                     file_path + " with " + std::to_string(lines.size()) + " lines");
  }
  std::vector<Chunk> chunks;
  std::size_t start = 1;
  for (std::size_t end : plan.breakpoints) {
    if (end < start) throw data_error("chunk plan breakpoints are not strictly increasing");
    Chunk c{file_path, start, end, {}};
    for (std::size_t l = start; l <= end; ++l) c.text.append(lines[l - 1]);
    chunks.push_back(std::move(c));
    start = end + 1;
  }
  return chunks;
}

std::vector<std::pair<std::size_t, std::size_t>> sliding_windows(std::size_t total_lines,
                                                                 std::size_t window_size,
                                                                 std::size_t stride) {
  if (window_size < 1) throw usage_error("window_size must be >= 1");
  if (stride < 1 || stride > window_size) throw usage_error("stride must be in [1, window_size]");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t start = 1; start <= total_lines; start += stride) {
    const std::size_t end = std::min(start + window_size - 1, total_lines);
    out.emplace_back(start, end);
    if (end == total_lines) break;
  }
  return out;
}

std::vector<Chunk> sliding_chunk(std::string_view source, std::size_t window_size,
                                 std::size_t stride, const std::string& file_path) {
  const auto lines = split_lines_keep_ends(source);
  std::vector<Chunk> chunks;
  for (const auto& [start, end] : sliding_windows(lines.size(), window_size, stride)) {
    Chunk c{file_path, start, end, {}};
    for (std::size_t l = start; l <= end; ++l) c.text.append(lines[l - 1]);
    chunks.push_back(std::move(c));
  }
  return chunks;
}

}  // namespace bugloc

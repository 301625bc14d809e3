#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bugloc/components.hpp"

namespace bugloc {

using KindCosts = std::map<ComponentKind, double>;

/// class/interface 1, method/function 2, block 5.
KindCosts default_kind_costs();
inline constexpr double kDefaultSplitCost = 100.0;

/// Cost of ending a chunk at each line. Lines without an entry cost
/// `default_cost`.
class SplitCostMap {
 public:
  SplitCostMap(std::size_t total_lines, double default_cost);

  void set(std::size_t line, double cost);
  double cost_at(std::size_t line) const;
  bool has_entry(std::size_t line) const { return costs_.contains(line); }

  std::size_t total_lines() const noexcept { return total_lines_; }
  double default_cost() const noexcept { return default_cost_; }
  const std::map<std::size_t, double>& entries() const noexcept { return costs_; }

 private:
  std::size_t total_lines_;
  double default_cost_;
  std::map<std::size_t, double> costs_;
};

/// Each span's end line receives its kind's cost; the cheapest kind wins when
/// several spans end on one line. Kinds missing from `kind_costs` are ignored.
SplitCostMap build_cost_map(const std::vector<ComponentSpan>& spans, std::size_t total_lines,
                            const KindCosts& kind_costs, double default_cost);

struct DpCell {
  double min_cost = 0.0;
  std::size_t breakpoint = 0;  // previous breakpoint, 0 = start of file
};

struct ChunkPlan {
  std::vector<std::size_t> breakpoints;  // chunk end lines, last == total_lines
  double total_cost = 0.0;
  std::vector<DpCell> dp_table;  // index 0 is the empty prefix
  std::size_t total_lines = 0;
};

/// Minimum-cost segmentation with every chunk at most `window_size` lines.
///
/// dp[i] = split_cost(i) + min over j in [max(i - window, 0), i - 1] of dp[j].
/// The previous breakpoint must lie strictly before i, so no chunk is empty.
/// Ties go to the smaller j.
ChunkPlan dynamic_chunk(const SplitCostMap& cost_map, std::size_t window_size);

/// Fixed windows [1..w], [w+1..2w], ... with the final break at total_lines.
/// `cost_map` is optional; when given, total_cost is priced with it.
ChunkPlan static_chunk(std::size_t total_lines, std::size_t window_size,
                       const SplitCostMap* cost_map = nullptr);

struct Chunk {
  std::string file_path;
  std::size_t start_line = 0;
  std::size_t end_line = 0;
  std::string text;  // includes line terminators
};

/// Materializes a plan. Chunk texts keep their newlines, so concatenating them
/// reproduces `source` exactly.
std::vector<Chunk> apply_plan(std::string_view source, const ChunkPlan& plan,
                              const std::string& file_path = {});

/// Overlapping windows of `window_size` lines advancing by `stride`. Windows
/// are clipped at the last line and generation stops once one reaches it, so
/// stride == window_size reproduces static_chunk's coverage.
std::vector<Chunk> sliding_chunk(std::string_view source, std::size_t window_size,
                                 std::size_t stride, const std::string& file_path = {});

/// Line ranges only, for callers that do not hold the text.
std::vector<std::pair<std::size_t, std::size_t>> sliding_windows(std::size_t total_lines,
                                                                 std::size_t window_size,
                                                                 std::size_t stride);

}  // namespace bugloc

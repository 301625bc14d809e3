#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace bugloc {

struct RankedItem {
  std::string file_id;
  double score = 0.0;
};

/// Ordered (file-id, score) list exchanged between retrievers, fusion and
/// metrics. Scores are non-increasing and file ids unique.
struct RankedList {
  std::string retriever;
  std::vector<RankedItem> items;

  std::size_t size() const noexcept { return items.size(); }
  bool empty() const noexcept { return items.empty(); }

  /// 1-based rank of `file_id`, or nullopt when absent.
  std::optional<std::size_t> rank_of(const std::string& file_id) const;

  /// Checks the ordering and uniqueness invariants.
  bool well_formed() const;

  void truncate(std::size_t depth) {
    if (items.size() > depth) items.resize(depth);
  }
};

}  // namespace bugloc

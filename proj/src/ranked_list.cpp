#include "bugloc/ranked_list.hpp"

#include <unordered_set>

namespace bugloc {

std::optional<std::size_t> RankedList::rank_of(const std::string& file_id) const {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].file_id == file_id) return i + 1;
  }
  return std::nullopt;
}

bool RankedList::well_formed() const {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!seen.insert(items[i].file_id).second) return false;
    if (i > 0 && items[i].score > items[i - 1].score) return false;
  }
  return true;
}

}  // namespace bugloc

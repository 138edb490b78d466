#pragma once

#include <string>
#include <vector>

namespace cdlsi {

struct RankedDoc {
  std::string doc_id;
  double score = 0.0;
  std::string peer_id;

  friend bool operator==(const RankedDoc&, const RankedDoc&) = default;
};

/// Ordered by score descending, ties by doc id ascending.
using RankedList = std::vector<RankedDoc>;

void sort_ranked(RankedList& list);

/// Sorts and keeps the first `n` entries.
[[nodiscard]] RankedList top_ranked(RankedList list, std::size_t n);

}  // namespace cdlsi

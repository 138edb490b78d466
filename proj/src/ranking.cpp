#include "cdlsi/ranking.hpp"

#include <algorithm>

namespace cdlsi {

void sort_ranked(RankedList& list) {
  std::sort(list.begin(), list.end(), [](const RankedDoc& a, const RankedDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
}

RankedList top_ranked(RankedList list, std::size_t n) {
  sort_ranked(list);
  if (list.size() > n) list.resize(n);
  return list;
}

}  // namespace cdlsi

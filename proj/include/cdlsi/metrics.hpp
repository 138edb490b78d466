#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdlsi/corpus.hpp"
#include "cdlsi/federation.hpp"
#include "cdlsi/ranking.hpp"

namespace cdlsi::eval {

/// Fraction of the first n results that are relevant. Short lists count as
/// padded with irrelevant documents. ParameterError when n == 0.
[[nodiscard]] double precision_at(const RankedList& results, const corpus::Qrels& qrels, const std::string& query_id,
                                  std::size_t n);

/// Mean of P@i for i = 1..n.
[[nodiscard]] double avg_precision_at(const RankedList& results, const corpus::Qrels& qrels,
                                      const std::string& query_id, std::size_t n);

using DocLocation = std::map<std::string, std::string, std::less<>>;

/// doc id -> peer id for every document in the federation.
[[nodiscard]] DocLocation locate_documents(const federation::Federation& fed);

/// Number of relevant documents of the query hosted by the selected peers.
[[nodiscard]] std::size_t relevant_in_selection(const federation::SelectionResult& selection,
                                                const corpus::Qrels& qrels, const std::string& query_id,
                                                const DocLocation& where);

/// Relevant documents hosted by selected peers over all relevant documents;
/// nullopt when the query has no relevant documents.
[[nodiscard]] std::optional<double> selected_peer_recall(const federation::SelectionResult& selection,
                                                         const corpus::Qrels& qrels, const std::string& query_id,
                                                         const DocLocation& where);

/// Per cast number, how often method A's selected peers hold more (wins) or
/// fewer (losses) relevant documents than method B's. Ties are the remainder.
struct CompTable {
  struct Row {
    std::size_t cast = 0;
    std::size_t queries = 0;
    double wins = 0.0;
    double losses = 0.0;
    double ties = 0.0;
  };
  std::string method_a;
  std::string method_b;
  std::vector<Row> rows;
};

/// One per-query observation for a cast number; recall may be absent.
struct RecallObservation {
  std::size_t cast = 0;
  std::string query_id;
  std::optional<double> recall;
};

/// Pairs observations by (cast, query id). Queries missing a recall value on
/// either side count as ties.
[[nodiscard]] CompTable compare(std::string method_a, std::span<const RecallObservation> a, std::string method_b,
                                std::span<const RecallObservation> b);

}  // namespace cdlsi::eval

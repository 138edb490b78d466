#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdlsi/sparse.hpp"

namespace cdlsi::corpus {

/// Dense, 0-based bijection between terms and term ids.
class TermDictionary {
 public:
  /// Id of `term`, inserting it when absent.
  TermId intern(std::string_view term);
  [[nodiscard]] std::optional<TermId> find(std::string_view term) const;
  [[nodiscard]] const std::string& term(TermId id) const { return terms_.at(id); }
  [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
  [[nodiscard]] std::span<const std::string> terms() const noexcept { return terms_; }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> ids_;
};

struct RawDoc {
  std::string id;
  std::string text;
};

struct WeightedDoc {
  std::string id;
  SparseVector weights;

  [[nodiscard]] WeightedDoc normalized() const { return {id, weights.normalized()}; }
};

struct Query {
  std::string id;
  SparseVector weights;
};

/// Relevance judgments: (query-id, doc-id) -> grade. Grade >= 1 is relevant.
class Qrels {
 public:
  void set(const std::string& query_id, const std::string& doc_id, int grade);
  [[nodiscard]] int grade(const std::string& query_id, const std::string& doc_id) const;
  [[nodiscard]] bool is_relevant(const std::string& query_id, const std::string& doc_id) const {
    return grade(query_id, doc_id) >= 1;
  }
  /// Relevant doc ids of a query in increasing id order.
  [[nodiscard]] std::vector<std::string> relevant_docs(const std::string& query_id) const;
  [[nodiscard]] std::size_t size() const noexcept;
  [[nodiscard]] const std::map<std::string, std::map<std::string, int>>& judgments() const noexcept {
    return grades_;
  }

 private:
  std::map<std::string, std::map<std::string, int>> grades_;
};

/// Built-in English stopword list.
[[nodiscard]] std::span<const std::string_view> stopwords() noexcept;
[[nodiscard]] bool is_stopword(std::string_view term) noexcept;

/// Lowercases, splits on non-alphanumerics, drops stopwords and 1-character terms.
[[nodiscard]] std::vector<std::string> tokenize(std::string_view text);

/// Dictionary plus per-term global factors and the weighted documents.
struct WeightedCorpus {
  TermDictionary dictionary;
  /// LogEntropy global factor per term id, in [0, 1].
  std::vector<double> global_factors;
  std::vector<WeightedDoc> docs;
};

/// LogEntropy: w = log2(1 + tf) * (1 + sum_j p_j log2 p_j / log2 n), with the
/// global factor defined as 1 when n = 1. ParameterError on an empty corpus.
[[nodiscard]] WeightedCorpus log_entropy_weights(std::span<const RawDoc> corpus);

/// Weights a document with an existing dictionary and global factors (terms
/// outside the dictionary are dropped). Used for documents that arrive after
/// the weights were computed.
[[nodiscard]] WeightedDoc weight_document(const RawDoc& doc, const TermDictionary& dictionary,
                                          std::span<const double> global_factors);

/// Query weights = term count * global factor, L2-normalized unless zero.
[[nodiscard]] Query vectorize_query(std::string id, std::string_view text,
                                    const TermDictionary& dictionary,
                                    std::span<const double> global_factors);

struct SyntheticParams {
  std::size_t topics = 20;
  std::size_t docs_per_topic = 50;
  std::size_t vocab_per_topic = 40;
  double overlap_fraction = 0.1;
  std::size_t polysemy_terms = 0;
  std::uint64_t seed = 1;
  /// Tokens drawn per document.
  std::size_t doc_length = 30;
  /// Leading terms of each topic vocabulary; queries are drawn from them.
  std::size_t core_terms = 6;
  std::size_t query_length = 2;
  /// Topic-independent filler vocabulary mixed into documents. Nonzero values
  /// break the block structure of the term-document matrix.
  std::size_t background_terms = 0;
  double background_rate = 0.0;
};

struct SyntheticCorpus {
  std::vector<RawDoc> docs;
  std::vector<RawDoc> queries;
  Qrels qrels;
  /// Topic of each document, parallel to `docs`.
  std::vector<std::size_t> doc_topics;
  /// Vocabulary of each topic (term strings).
  std::vector<std::vector<std::string>> topic_vocabularies;
};

/// Planted-topic corpus. Documents are emitted in a seeded shuffled order so a
/// round-robin split over peers is a uniform random allocation.
[[nodiscard]] SyntheticCorpus generate_synthetic(const SyntheticParams& params);

/// JSON-lines documents: {"id": ..., "text": ...} per line.
[[nodiscard]] std::vector<RawDoc> load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, std::span<const RawDoc> docs);
/// Whitespace-separated "query-id doc-id grade" lines.
[[nodiscard]] Qrels load_qrels(const std::filesystem::path& path);
void save_qrels(const std::filesystem::path& path, const Qrels& qrels);

}  // namespace cdlsi::corpus

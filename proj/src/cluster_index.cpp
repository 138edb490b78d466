#include "cdlsi/cluster_index.hpp"

#include <algorithm>
#include <string>

#include "cdlsi/error.hpp"

namespace cdlsi::peer {

ClusterIndex ClusterIndex::build(std::size_t id, std::vector<corpus::WeightedDoc> docs,
                                 const Truncation& truncation) {
  ClusterIndex c;
  c.id_ = id;
  c.docs_ = std::move(docs);
  c.base_count_ = c.docs_.size();

  for (const auto& d : c.docs_)
    for (const auto& e : d.weights)
      if (e.value != 0.0) c.terms_.push_back(e.index);
  std::sort(c.terms_.begin(), c.terms_.end());
  c.terms_.erase(std::unique(c.terms_.begin(), c.terms_.end()), c.terms_.end());

  const std::size_t m = c.terms_.size();
  const std::size_t n = c.docs_.size();
  if (m == 0 || n == 0) {
    if (truncation.mode == Truncation::Mode::Rank) {
      throw ParameterError("cluster " + std::to_string(id) + ": rank " +
                           std::to_string(truncation.rank) + " exceeds cluster rank 0");
    }
    c.lsi_.u_k = linalg::DenseMatrix(m, 0);
  } else {
    linalg::DenseMatrix a(m, n);
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& e : c.docs_[j].weights) {
        if (e.value != 0.0) a(c.local_index(e.index), j) = e.value;
      }
    const auto factors = linalg::svd(a);
    if (truncation.mode == Truncation::Mode::Rank) {
      if (truncation.rank > factors.rank()) {
        throw ParameterError("cluster " + std::to_string(id) + ": rank " +
                             std::to_string(truncation.rank) + " exceeds cluster rank " +
                             std::to_string(factors.rank()));
      }
      c.lsi_ = linalg::truncate_by_rank(factors, truncation.rank);
    } else if (n == 1) {
      c.lsi_ = linalg::truncate_by_threshold(factors, 0.0);
    } else {
      c.lsi_ = linalg::truncate_by_threshold(factors, truncation.epsilon);
    }
  }

  c.lsi_sum_.assign(m, 0.0);
  c.lsi_docs_.reserve(n);
  for (const auto& d : c.docs_) {
    auto coords = c.coordinates(d.weights);
    std::vector<double> local(m);
    for (std::size_t i = 0; i < m; ++i) {
      local[i] = c.row_value(i, coords);
      c.lsi_sum_[i] += local[i];
    }
    c.lsi_docs_.push_back(c.embed(local));
  }
  c.refresh_centroid();
  return c;
}

ClusterIndex ClusterIndex::from_terms(std::size_t id, std::vector<TermId> terms) {
  ClusterIndex c;
  c.id_ = id;
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  c.terms_ = std::move(terms);
  c.lsi_.u_k = linalg::DenseMatrix(c.terms_.size(), 0);
  c.lsi_sum_.assign(c.terms_.size(), 0.0);
  c.refresh_centroid();
  return c;
}

std::size_t ClusterIndex::local_index(TermId t) const noexcept {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), t);
  if (it == terms_.end() || *it != t) return terms_.size();
  return static_cast<std::size_t>(it - terms_.begin());
}

bool ClusterIndex::contains(TermId t) const noexcept { return local_index(t) < terms_.size(); }

std::vector<double> ClusterIndex::coordinates(const SparseVector& x) const {
  const std::size_t k = lsi_.k();
  std::vector<double> coords(k, 0.0);
  for (const auto& e : x) {
    const std::size_t li = local_index(e.index);
    if (li == terms_.size()) continue;
    for (std::size_t j = 0; j < k; ++j) coords[j] += lsi_.u_k(li, j) * e.value;
  }
  return coords;
}

double ClusterIndex::row_value(std::size_t local, std::span<const double> coords) const {
  double s = 0.0;
  for (std::size_t j = 0; j < coords.size(); ++j) s += lsi_.u_k(local, j) * coords[j];
  return s;
}

SparseVector ClusterIndex::embed(std::span<const double> local) const {
  std::vector<SparseEntry> entries;
  entries.reserve(local.size());
  for (std::size_t i = 0; i < local.size(); ++i) entries.push_back({terms_[i], local[i]});
  return SparseVector(std::move(entries));
}

SparseVector ClusterIndex::project(const SparseVector& x) const {
  auto coords = coordinates(x);
  std::vector<double> local(terms_.size());
  for (std::size_t i = 0; i < local.size(); ++i) local[i] = row_value(i, coords);
  return embed(local);
}

double ClusterIndex::projected_weight(const SparseVector& x, TermId t) const {
  const std::size_t li = local_index(t);
  if (li == terms_.size()) {
    throw ParameterError("projected_weight: term " + std::to_string(t) + " not in cluster " +
                         std::to_string(id_));
  }
  return row_value(li, coordinates(x));
}

linalg::DenseMatrix ClusterIndex::term_similarity(std::span<const TermId> subset) const {
  const std::size_t q = subset.size();
  std::vector<std::size_t> rows(q);
  for (std::size_t a = 0; a < q; ++a) {
    rows[a] = local_index(subset[a]);
    if (rows[a] == terms_.size()) {
      throw ParameterError("term_similarity: term " + std::to_string(subset[a]) +
                           " not in cluster " + std::to_string(id_));
    }
  }
  const std::size_t k = lsi_.k();
  linalg::DenseMatrix b(q, q);
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t c = a; c < q; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += lsi_.u_k(rows[a], j) * lsi_.u_k(rows[c], j);
      b(a, c) = s;
      b(c, a) = s;
    }
  }
  return b;
}

const SparseVector& ClusterIndex::fold_in(corpus::WeightedDoc doc) {
  auto coords = coordinates(doc.weights);
  std::vector<double> local(terms_.size());
  for (std::size_t i = 0; i < local.size(); ++i) {
    local[i] = row_value(i, coords);
    lsi_sum_[i] += local[i];
  }
  docs_.push_back(std::move(doc));
  lsi_docs_.push_back(embed(local));
  ++folded_count_;
  refresh_centroid();
  return lsi_docs_.back();
}

void ClusterIndex::refresh_centroid() {
  std::vector<double> mean(lsi_sum_.size(), 0.0);
  if (!docs_.empty()) {
    const double inv = 1.0 / static_cast<double>(docs_.size());
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] = lsi_sum_[i] * inv;
  }
  centroid_ = embed(mean);
}

}  // namespace cdlsi::peer

#include "cdlsi/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdlsi/error.hpp"

namespace cdlsi::peer {

double matrix_correlation(const linalg::DenseMatrix& x, const linalg::DenseMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionError("matrix_correlation: shape mismatch");
  }
  if (x.empty()) throw DimensionError("matrix_correlation: empty matrices");
  auto xs = x.data();
  auto ys = y.data();
  const auto is_constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (is_constant(xs) || is_constant(ys)) return 0.0;

  const double count = static_cast<double>(xs.size());
  double x_sum = 0.0;
  double y_sum = 0.0;
  double x_sq = 0.0;
  double y_sq = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x_sum += xs[i];
    y_sum += ys[i];
    x_sq += xs[i] * xs[i];
    y_sq += ys[i] * ys[i];
  }
  const double x_mean = x_sum / count;
  const double y_mean = y_sum / count;
  const double fx = x_sq / count;
  const double fy = y_sq / count;
  if (fx == 0.0 || fy == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    acc += ((xs[i] - x_mean) / fx) * ((ys[i] - y_mean) / fy);
  }
  return std::abs(acc / count);
}

std::size_t shared_term_count(std::span<const TermId> a, std::span<const TermId> b) noexcept {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

std::vector<TermId> shared_terms(std::span<const TermId> a, std::span<const TermId> b) {
  std::vector<TermId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

namespace {

// (1/S + l)^-1, with S = 0 mapping to 0, clamped to [0, 1].
double compose(double s, std::size_t hops) {
  if (!(s > 0.0)) return 0.0;
  return std::min(1.0, 1.0 / (1.0 / s + static_cast<double>(hops)));
}

double direct_s1(std::size_t shared, std::size_t ti, std::size_t tj) {
  if (shared == 0 || ti == 0 || tj == 0) return 0.0;
  const double s = static_cast<double>(shared);
  return (s * s) / (static_cast<double>(ti) * static_cast<double>(tj));
}

double one_hop_s1(std::size_t shared_im, std::size_t shared_mj, std::size_t ti, std::size_t tm,
                  std::size_t tj) {
  const double a = static_cast<double>(shared_im);
  const double b = static_cast<double>(shared_mj);
  const double m = static_cast<double>(tm);
  return (a * a * b * b) / (static_cast<double>(ti) * m * m * static_cast<double>(tj));
}

double direct_correlation(const ClusterIndex& ci, const ClusterIndex& cj) {
  const auto common = shared_terms(ci.terms(), cj.terms());
  if (common.empty()) return 0.0;
  return matrix_correlation(ci.term_similarity(common), cj.term_similarity(common));
}

void check_pair(std::span<const ClusterIndex> clusters, std::size_t i, std::size_t j) {
  if (i >= clusters.size() || j >= clusters.size()) {
    throw ParameterError("similarity: cluster index out of range");
  }
  if (i == j) throw ParameterError("similarity: a cluster is not paired with itself");
}

}  // namespace

Proximity proximity(std::span<const ClusterIndex> clusters, std::size_t i, std::size_t j) {
  check_pair(clusters, i, j);
  if (shared_term_count(clusters[i].terms(), clusters[j].terms()) > 0) return Proximity::Direct;
  for (std::size_t m = 0; m < clusters.size(); ++m) {
    if (m == i || m == j) continue;
    if (shared_term_count(clusters[i].terms(), clusters[m].terms()) > 0 &&
        shared_term_count(clusters[m].terms(), clusters[j].terms()) > 0) {
      return Proximity::OneHop;
    }
  }
  return Proximity::Unreachable;
}

double s1_similarity(std::span<const ClusterIndex> clusters, std::size_t i, std::size_t j) {
  check_pair(clusters, i, j);
  const auto& ci = clusters[i];
  const auto& cj = clusters[j];
  const std::size_t direct = shared_term_count(ci.terms(), cj.terms());
  if (direct > 0) return compose(direct_s1(direct, ci.terms().size(), cj.terms().size()), 0);
  double best = 0.0;
  for (std::size_t m = 0; m < clusters.size(); ++m) {
    if (m == i || m == j) continue;
    const std::size_t im = shared_term_count(ci.terms(), clusters[m].terms());
    const std::size_t mj = shared_term_count(clusters[m].terms(), cj.terms());
    if (im == 0 || mj == 0) continue;
    best = std::max(best, one_hop_s1(im, mj, ci.terms().size(), clusters[m].terms().size(),
                                     cj.terms().size()));
  }
  return compose(best, 1);
}

double s2_similarity(std::span<const ClusterIndex> clusters, std::size_t i, std::size_t j) {
  check_pair(clusters, i, j);
  const auto& ci = clusters[i];
  const auto& cj = clusters[j];
  if (shared_term_count(ci.terms(), cj.terms()) > 0) return compose(direct_correlation(ci, cj), 0);
  double best = 0.0;
  for (std::size_t m = 0; m < clusters.size(); ++m) {
    if (m == i || m == j) continue;
    if (shared_term_count(ci.terms(), clusters[m].terms()) == 0 ||
        shared_term_count(clusters[m].terms(), cj.terms()) == 0) {
      continue;
    }
    best = std::max(best, direct_correlation(ci, clusters[m]) * direct_correlation(clusters[m], cj));
  }
  return compose(best, 1);
}

SimilarityNetwork SimilarityNetwork::empty(std::size_t cluster_count) {
  SimilarityNetwork net;
  net.n_ = cluster_count;
  net.pairs_.assign(cluster_count * cluster_count, PairSimilarity{});
  for (std::size_t i = 0; i < cluster_count; ++i) {
    net.pairs_[i * cluster_count + i] = {Proximity::Direct, 1.0, 1.0, 1.0};
  }
  return net;
}

SimilarityNetwork SimilarityNetwork::compute(std::span<const ClusterIndex> clusters) {
  SimilarityNetwork net = empty(clusters.size());
  net.tracked_ = true;
  const std::size_t n = clusters.size();
  net.shared_.assign(n * n, 0);
  net.correlation_.assign(n * n, 0.0);
  net.term_counts_.resize(n);
  for (std::size_t i = 0; i < n; ++i) net.term_counts_[i] = clusters[i].terms().size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) net.refresh_direct(clusters, i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) net.evaluate_pair(i, j);
  return net;
}

void SimilarityNetwork::refresh_direct(std::span<const ClusterIndex> clusters, std::size_t i, std::size_t j) {
  const std::size_t shared = shared_term_count(clusters[i].terms(), clusters[j].terms());
  const double r = shared > 0 ? direct_correlation(clusters[i], clusters[j]) : 0.0;
  shared_[i * n_ + j] = shared_[j * n_ + i] = shared;
  correlation_[i * n_ + j] = correlation_[j * n_ + i] = r;
}

void SimilarityNetwork::evaluate_pair(std::size_t i, std::size_t j) {
  PairSimilarity p;
  const std::size_t direct = shared_[i * n_ + j];
  if (direct > 0) {
    p.proximity = Proximity::Direct;
    p.s1 = compose(direct_s1(direct, term_counts_[i], term_counts_[j]), 0);
    p.s2 = compose(correlation_[i * n_ + j], 0);
  } else {
    double best_s1 = 0.0;
    double best_s2 = 0.0;
    bool linked = false;
    for (std::size_t m = 0; m < n_; ++m) {
      if (m == i || m == j) continue;
      const std::size_t im = shared_[i * n_ + m];
      const std::size_t mj = shared_[m * n_ + j];
      if (im == 0 || mj == 0) continue;
      linked = true;
      best_s1 = std::max(best_s1, one_hop_s1(im, mj, term_counts_[i], term_counts_[m], term_counts_[j]));
      best_s2 = std::max(best_s2, correlation_[i * n_ + m] * correlation_[m * n_ + j]);
    }
    if (linked) {
      p.proximity = Proximity::OneHop;
      p.s1 = compose(best_s1, 1);
      p.s2 = compose(best_s2, 1);
    }
  }
  p.s = p.s1 * p.s2;
  pairs_[i * n_ + j] = p;
  pairs_[j * n_ + i] = p;
}

void SimilarityNetwork::update(std::span<const ClusterIndex> clusters, std::span<const std::size_t> changed) {
  if (!tracked_) return;  // relation-free network stays empty
  if (clusters.size() != n_) throw DimensionError("similarity network: cluster count changed");
  std::vector<bool> dirty(n_, false);
  for (std::size_t c : changed) {
    if (c >= n_) throw ParameterError("similarity network: cluster index out of range");
    dirty[c] = true;
    term_counts_[c] = clusters[c].terms().size();
  }
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (dirty[i] || dirty[j]) refresh_direct(clusters, i, j);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (dirty[i] || dirty[j] || shared_[i * n_ + j] == 0) evaluate_pair(i, j);
}

const PairSimilarity& SimilarityNetwork::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw ParameterError("similarity network: index out of range");
  return pairs_[i * n_ + j];
}

std::vector<std::size_t> SimilarityNetwork::relevant_clusters(std::size_t i, double delta) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j) {
    if (j != i && at(i, j).s > delta) out.push_back(j);
  }
  std::stable_sort(out.begin(), out.end(),
                   [&](std::size_t a, std::size_t b) { return at(i, a).s > at(i, b).s; });
  return out;
}

}  // namespace cdlsi::peer

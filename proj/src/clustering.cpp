#include "cdlsi/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "cdlsi/error.hpp"

namespace cdlsi::clustering {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) noexcept {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::size_t dimension_of(std::span<const corpus::WeightedDoc> docs) {
  std::size_t dim = 0;
  for (const auto& d : docs) {
    if (!d.weights.empty()) dim = std::max<std::size_t>(dim, d.weights.entries().back().index + 1);
  }
  return dim;
}

// Dense centroid sums for every cluster, accumulated in processing order.
struct Accumulator {
  std::vector<std::vector<double>> sums;
  std::vector<std::size_t> counts;

  Accumulator(std::size_t k, std::size_t dim) : sums(k, std::vector<double>(dim, 0.0)), counts(k, 0) {}

  void add(std::size_t c, const SparseVector& v) {
    for (const auto& e : v) sums[c][e.index] += e.value;
    ++counts[c];
  }

  [[nodiscard]] std::vector<std::vector<double>> means() const {
    auto out = sums;
    for (std::size_t c = 0; c < out.size(); ++c) {
      if (counts[c] == 0) continue;
      const double inv = 1.0 / static_cast<double>(counts[c]);
      for (double& x : out[c]) x *= inv;
    }
    return out;
  }

  // sum_i n_i mu_i^T mu_i = sum_i |s_i|^2 / n_i.
  [[nodiscard]] double objective() const {
    double total = 0.0;
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (counts[c] == 0) continue;
      double sq = 0.0;
      for (double x : sums[c]) sq += x * x;
      total += sq / static_cast<double>(counts[c]);
    }
    return total;
  }
};

double squared_distance(const SparseVector& v, double v_sq, const std::vector<double>& mu, double mu_sq) {
  return v_sq - 2.0 * dot(v, mu) + mu_sq;
}

double squared_norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

double partition_objective(std::span<const corpus::WeightedDoc> docs,
                           std::span<const std::size_t> assignment, std::size_t k) {
  if (assignment.size() != docs.size()) throw DimensionError("partition_objective: size mismatch");
  Accumulator acc(k, dimension_of(docs));
  for (std::size_t j = 0; j < docs.size(); ++j) {
    if (assignment[j] >= k) throw ParameterError("partition_objective: cluster id out of range");
    acc.add(assignment[j], docs[j].weights);
  }
  return acc.objective();
}

namespace {

// One seeded k-means++ start followed by Lloyd iterations.
Clustering lloyd(std::span<const corpus::WeightedDoc> docs, std::size_t k, std::uint64_t seed, std::size_t max_iters) {
  const std::size_t n = docs.size();
  const std::size_t dim = dimension_of(docs);

  // Processing order depends on (id, seed) only.
  const std::uint64_t salt = fnv1a(std::to_string(seed));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> keys(n);
  for (std::size_t j = 0; j < n; ++j) keys[j] = fnv1a(docs[j].id, salt);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return docs[a].id < docs[b].id;
  });

  std::vector<double> doc_sq(n);
  for (std::size_t j = 0; j < n; ++j) doc_sq[j] = docs[j].weights.squared_norm();

  // k-means++ seeding over the hashed order.
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  auto densify = [&](std::size_t j) {
    std::vector<double> c(dim, 0.0);
    for (const auto& e : docs[j].weights) c[e.index] = e.value;
    return c;
  };
  std::vector<bool> chosen(n, false);
  {
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    const std::size_t pick = order[first(rng)];
    chosen[pick] = true;
    centroids.push_back(densify(pick));
  }
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centroids.size() < k) {
    const auto& last = centroids.back();
    const double last_sq = squared_norm(last);
    double total = 0.0;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::size_t j = order[pos];
      nearest[j] = std::min(nearest[j], std::max(0.0, squared_distance(docs[j].weights, doc_sq[j], last, last_sq)));
      if (!chosen[j]) total += nearest[j];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t j = order[pos];
        if (chosen[j]) continue;
        pick = j;
        target -= nearest[j];
        if (target < 0.0) break;
      }
    } else {
      // Remaining documents coincide with existing centroids.
      for (std::size_t pos = 0; pos < n && pick == n; ++pos) {
        if (!chosen[order[pos]]) pick = order[pos];
      }
    }
    chosen[pick] = true;
    centroids.push_back(densify(pick));
  }

  Clustering result;
  result.k = k;
  result.assignment.assign(n, k);  // k marks "unassigned"

  std::vector<double> centroid_sq(k);
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    for (std::size_t c = 0; c < k; ++c) centroid_sq[c] = squared_norm(centroids[c]);
    bool changed = false;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::size_t j = order[pos];
      const std::size_t current = result.assignment[j];
      std::size_t best = current;
      double best_dist = current < k
                             ? squared_distance(docs[j].weights, doc_sq[j], centroids[current], centroid_sq[current])
                             : std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dist = squared_distance(docs[j].weights, doc_sq[j], centroids[c], centroid_sq[c]);
        // Strict improvement moves a document; equal distances keep it put.
        if (dist < best_dist || (best == k && dist == best_dist)) {
          best = c;
          best_dist = dist;
        }
      }
      if (best != current) {
        result.assignment[j] = best;
        changed = true;
      }
    }

    Accumulator acc(k, dim);
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::size_t j = order[pos];
      acc.add(result.assignment[j], docs[j].weights);
    }

    // Empty cluster repair: move the member farthest from its own centroid
    // (taken from a cluster with at least two members) into the empty one.
    for (std::size_t c = 0; c < k; ++c) {
      if (acc.counts[c] != 0) continue;
      const auto means = acc.means();
      std::size_t far = n;
      double far_dist = -1.0;
      for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t j = order[pos];
        const std::size_t a = result.assignment[j];
        if (acc.counts[a] < 2) continue;
        const double dist = squared_distance(docs[j].weights, doc_sq[j], means[a], squared_norm(means[a]));
        if (dist > far_dist) {
          far_dist = dist;
          far = j;
        }
      }
      result.assignment[far] = c;
      changed = true;
      acc = Accumulator(k, dim);
      for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t j = order[pos];
        acc.add(result.assignment[j], docs[j].weights);
      }
    }

    centroids = acc.means();
    result.objective_trace.push_back(acc.objective());
    result.iterations = iter + 1;
    if (!changed) {
      result.converged = true;
      break;
    }
  }

  result.centroids.reserve(k);
  result.sizes.assign(k, 0);
  for (std::size_t c = 0; c < k; ++c) result.centroids.push_back(SparseVector::from_dense(centroids[c]));
  for (std::size_t a : result.assignment) ++result.sizes[a];
  result.objective = result.objective_trace.empty() ? 0.0 : result.objective_trace.back();
  return result;
}

}  // namespace

Clustering kmeans(std::span<const corpus::WeightedDoc> docs, std::size_t k, std::uint64_t seed,
                  std::size_t max_iters, std::size_t restarts) {
  if (k == 0) throw ParameterError("kmeans: k must be >= 1");
  if (docs.empty()) throw ParameterError("kmeans: no documents");
  if (k > docs.size()) {
    throw ParameterError("kmeans: k=" + std::to_string(k) + " exceeds " +
                         std::to_string(docs.size()) + " documents");
  }
  if (restarts == 0) throw ParameterError("kmeans: restarts must be >= 1");
  Clustering best = lloyd(docs, k, seed, max_iters);
  for (std::size_t r = 1; r < restarts; ++r) {
    auto run = lloyd(docs, k, fnv1a(std::to_string(seed) + ":" + std::to_string(r)), max_iters);
    if (run.objective > best.objective) best = std::move(run);
  }
  return best;
}

NearestCluster assign_to_nearest(const SparseVector& doc, const Clustering& clustering) {
  if (clustering.centroids.empty()) throw ParameterError("assign_to_nearest: no clusters");
  const double norm = doc.norm();
  if (norm == 0.0) return {0, true};
  std::size_t best = 0;
  double best_cos = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < clustering.centroids.size(); ++c) {
    const double cn = clustering.centroids[c].norm();
    const double cosine = cn == 0.0 ? 0.0 : dot(doc, clustering.centroids[c]) / (norm * cn);
    if (cosine > best_cos) {
      best_cos = cosine;
      best = c;
    }
  }
  return {best, false};
}

}  // namespace cdlsi::clustering

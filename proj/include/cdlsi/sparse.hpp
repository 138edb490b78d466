#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cdlsi {

using TermId = std::uint32_t;

struct SparseEntry {
  TermId index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse vector stored as (index, value) pairs with strictly increasing
/// indices. Explicit zeros are allowed: they mark support (for example the
/// term set of a cluster) without contributing to products.
class SparseVector {
 public:
  SparseVector() = default;
  /// Throws ParameterError on unsorted or duplicate indices or non-finite values.
  explicit SparseVector(std::vector<SparseEntry> entries);
  SparseVector(std::initializer_list<SparseEntry> entries);

  /// Builds from unsorted pairs, summing duplicates.
  static SparseVector from_unsorted(std::vector<SparseEntry> entries);
  /// Builds from a dense array, dropping exact zeros.
  static SparseVector from_dense(std::span<const double> dense);

  [[nodiscard]] std::span<const SparseEntry> entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
  [[nodiscard]] auto begin() const noexcept { return entries_.begin(); }
  [[nodiscard]] auto end() const noexcept { return entries_.end(); }

  /// Value at `index`, or nullopt when the index is outside the support.
  [[nodiscard]] std::optional<double> find(TermId index) const noexcept;
  [[nodiscard]] double at(TermId index) const noexcept { return find(index).value_or(0.0); }
  [[nodiscard]] bool contains(TermId index) const noexcept { return find(index).has_value(); }

  [[nodiscard]] double norm() const noexcept;
  [[nodiscard]] double squared_norm() const noexcept;
  /// Unit-L2 copy; the zero vector is returned unchanged.
  [[nodiscard]] SparseVector normalized() const;
  [[nodiscard]] SparseVector scaled(double factor) const;
  /// Support indices in increasing order.
  [[nodiscard]] std::vector<TermId> support() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<SparseEntry> entries_;
};

/// Inner product over shared indices.
[[nodiscard]] double dot(const SparseVector& x, const SparseVector& y) noexcept;
/// Inner product of a sparse vector with a dense one indexed by term id.
[[nodiscard]] double dot(const SparseVector& x, std::span<const double> dense) noexcept;

}  // namespace cdlsi

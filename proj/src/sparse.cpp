#include "cdlsi/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdlsi/error.hpp"

namespace cdlsi {

SparseVector::SparseVector(std::vector<SparseEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i].value)) {
      throw ParameterError("sparse vector: non-finite value at index " +
                           std::to_string(entries_[i].index));
    }
    if (i > 0 && entries_[i - 1].index >= entries_[i].index) {
      throw ParameterError("sparse vector: indices must be strictly increasing (index " +
                           std::to_string(entries_[i].index) + ")");
    }
  }
}

SparseVector::SparseVector(std::initializer_list<SparseEntry> entries)
    : SparseVector(std::vector<SparseEntry>(entries)) {}

SparseVector SparseVector::from_unsorted(std::vector<SparseEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  std::vector<SparseEntry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().index == e.index) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  return SparseVector(std::move(merged));
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  std::vector<SparseEntry> out;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) out.push_back({static_cast<TermId>(i), dense[i]});
  }
  return SparseVector(std::move(out));
}

std::optional<double> SparseVector::find(TermId index) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const SparseEntry& e, TermId i) { return e.index < i; });
  if (it == entries_.end() || it->index != index) return std::nullopt;
  return it->value;
}

double SparseVector::squared_norm() const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) s += e.value * e.value;
  return s;
}

double SparseVector::norm() const noexcept { return std::sqrt(squared_norm()); }

SparseVector SparseVector::normalized() const {
  const double n = norm();
  if (n == 0.0) return *this;
  return scaled(1.0 / n);
}

SparseVector SparseVector::scaled(double factor) const {
  SparseVector out = *this;
  for (auto& e : out.entries_) e.value *= factor;
  return out;
}

std::vector<TermId> SparseVector::support() const {
  std::vector<TermId> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.index);
  return out;
}

double dot(const SparseVector& x, const SparseVector& y) noexcept {
  auto a = x.entries();
  auto b = y.entries();
  std::size_t i = 0;
  std::size_t j = 0;
  double s = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index < b[j].index) {
      ++i;
    } else if (b[j].index < a[i].index) {
      ++j;
    } else {
      s += a[i].value * b[j].value;
      ++i;
      ++j;
    }
  }
  return s;
}

double dot(const SparseVector& x, std::span<const double> dense) noexcept {
  double s = 0.0;
  for (const auto& e : x) {
    if (e.index < dense.size()) s += e.value * dense[e.index];
  }
  return s;
}

}  // namespace cdlsi

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cdlsi/sparse.hpp"

namespace cdlsi::linalg {

/// Row-major dense matrix of finite reals.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  /// Throws DimensionError when `entries.size() != rows * cols`, ParameterError
  /// on non-finite entries.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> values);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  [[nodiscard]] DenseMatrix transposed() const;
  [[nodiscard]] double frobenius_norm() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

[[nodiscard]] DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
[[nodiscard]] DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

/// Thin SVD restricted to the numerically nonzero singular triplets:
/// `u` is m x r, `v` is n x r, `sigma` holds r values in non-increasing order.
struct SvdFactors {
  DenseMatrix u;
  std::vector<double> sigma;
  DenseMatrix v;

  [[nodiscard]] std::size_t rank() const noexcept { return sigma.size(); }
};

/// Truncated LSI space. The rows of `u_k` index whatever row space the source
/// matrix had (a cluster's local term list in the peer index).
struct LsiSpace {
  DenseMatrix u_k;
  std::vector<double> sigma_k;

  [[nodiscard]] std::size_t k() const noexcept { return sigma_k.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return u_k.rows(); }
};

/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankTolerance = 1e-12;

/// One-sided Jacobi SVD. Throws DimensionError for an empty matrix.
[[nodiscard]] SvdFactors svd(const DenseMatrix& a);

/// Keeps every singular triplet with sigma >= epsilon (k may be 0).
[[nodiscard]] LsiSpace truncate_by_threshold(const SvdFactors& f, double epsilon);

/// Keeps the first k triplets; ParameterError unless 1 <= k <= rank.
[[nodiscard]] LsiSpace truncate_by_rank(const SvdFactors& f, std::size_t k);

/// Number of singular values >= epsilon.
[[nodiscard]] std::size_t threshold_rank(const SvdFactors& f, double epsilon) noexcept;

/// U_k * Sigma_k * V_k^T for the leading k triplets.
[[nodiscard]] DenseMatrix low_rank_approximation(const SvdFactors& f, std::size_t k);

/// u_k * u_k^T * d. `d` is indexed over the space's row dimension; DimensionError
/// when it has an index outside it. The result carries every row of the space
/// as support, zeros included.
[[nodiscard]] SparseVector project(const LsiSpace& space, const SparseVector& d);

/// Dense variant of `project` over a vector of length `space.dimension()`.
[[nodiscard]] std::vector<double> project_dense(const LsiSpace& space, std::span<const double> d);

[[nodiscard]] inline double dot_score(const SparseVector& x, const SparseVector& y) noexcept {
  return dot(x, y);
}

}  // namespace cdlsi::linalg

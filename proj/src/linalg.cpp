#include "cdlsi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cdlsi/error.hpp"

namespace cdlsi::linalg {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix: expected " + std::to_string(rows * cols) + " entries, got " +
                         std::to_string(data_.size()));
  }
  for (double x : data_) {
    if (!std::isfinite(x)) throw ParameterError("matrix: non-finite entry");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> values) {
  DenseMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double DenseMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("multiply: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
  }
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aip * b(p, j);
    }
  }
  return c;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("subtract: shape mismatch");
  }
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

namespace {

// Column-major working storage for the Jacobi sweeps.
struct Columns {
  std::size_t length = 0;
  std::vector<std::vector<double>> cols;
};

double column_dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

// Hestenes one-sided Jacobi on a tall matrix (rows >= cols). Returns the
// orthogonalized columns W = A V and the accumulated rotations V.
void one_sided_jacobi(Columns& w, Columns& v) {
  constexpr double kTolerance = 1e-15;
  constexpr int kMaxSweeps = 80;
  const std::size_t n = w.cols.size();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto& wp = w.cols[p];
        auto& wq = w.cols[q];
        const double alpha = column_dot(wp, wp);
        const double beta = column_dot(wq, wq);
        const double gamma = column_dot(wp, wq);
        if (gamma == 0.0 || std::abs(gamma) <= kTolerance * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < wp.size(); ++i) {
          const double x = wp[i];
          const double y = wq[i];
          wp[i] = c * x - s * y;
          wq[i] = s * x + c * y;
        }
        auto& vp = v.cols[p];
        auto& vq = v.cols[q];
        for (std::size_t i = 0; i < vp.size(); ++i) {
          const double x = vp[i];
          const double y = vq[i];
          vp[i] = c * x - s * y;
          vq[i] = s * x + c * y;
        }
      }
    }
    if (!rotated) return;
  }
}

}  // namespace

SvdFactors svd(const DenseMatrix& a) {
  if (a.empty()) throw DimensionError("svd: empty matrix");
  for (double x : a.data()) {
    if (!std::isfinite(x)) throw ParameterError("svd: non-finite entry");
  }
  // Work on the orientation with at least as many rows as columns.
  const bool transpose = a.rows() < a.cols();
  const DenseMatrix& src = a;
  const std::size_t m = transpose ? a.cols() : a.rows();
  const std::size_t n = transpose ? a.rows() : a.cols();

  Columns w;
  w.length = m;
  w.cols.assign(n, std::vector<double>(m, 0.0));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (transpose) {
        w.cols[r][c] = src(r, c);
      } else {
        w.cols[c][r] = src(r, c);
      }
    }
  }
  Columns v;
  v.length = n;
  v.cols.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v.cols[i][i] = 1.0;

  one_sided_jacobi(w, v);

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(column_dot(w.cols[j], w.cols[j]));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  const double sigma_max = norms[order.front()];
  std::size_t rank = 0;
  while (rank < n && norms[order[rank]] > 0.0 && norms[order[rank]] > kRankTolerance * sigma_max) {
    ++rank;
  }

  // Left vectors of the working orientation are W's normalized columns; the
  // right vectors are the accumulated rotations. Swap back when transposed.
  DenseMatrix left(m, rank);
  DenseMatrix right(n, rank);
  std::vector<double> sigma(rank);
  for (std::size_t j = 0; j < rank; ++j) {
    const std::size_t src_col = order[j];
    sigma[j] = norms[src_col];
    for (std::size_t i = 0; i < m; ++i) left(i, j) = w.cols[src_col][i] / sigma[j];
    for (std::size_t i = 0; i < n; ++i) right(i, j) = v.cols[src_col][i];
  }

  SvdFactors f;
  f.sigma = std::move(sigma);
  if (transpose) {
    f.u = std::move(right);
    f.v = std::move(left);
  } else {
    f.u = std::move(left);
    f.v = std::move(right);
  }
  return f;
}

std::size_t threshold_rank(const SvdFactors& f, double epsilon) noexcept {
  std::size_t k = 0;
  while (k < f.sigma.size() && f.sigma[k] >= epsilon) ++k;
  return k;
}

namespace {

LsiSpace leading(const SvdFactors& f, std::size_t k) {
  LsiSpace s;
  s.u_k = DenseMatrix(f.u.rows(), k);
  for (std::size_t i = 0; i < f.u.rows(); ++i)
    for (std::size_t j = 0; j < k; ++j) s.u_k(i, j) = f.u(i, j);
  s.sigma_k.assign(f.sigma.begin(), f.sigma.begin() + static_cast<std::ptrdiff_t>(k));
  return s;
}

}  // namespace

LsiSpace truncate_by_threshold(const SvdFactors& f, double epsilon) {
  if (!(epsilon >= 0.0)) throw ParameterError("truncate_by_threshold: epsilon must be >= 0");
  return leading(f, threshold_rank(f, epsilon));
}

LsiSpace truncate_by_rank(const SvdFactors& f, std::size_t k) {
  if (k < 1 || k > f.rank()) {
    throw ParameterError("truncate_by_rank: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(f.rank()) + "]");
  }
  return leading(f, k);
}

DenseMatrix low_rank_approximation(const SvdFactors& f, std::size_t k) {
  k = std::min(k, f.rank());
  DenseMatrix out(f.u.rows(), f.v.rows());
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t r = 0; r < out.rows(); ++r) {
      const double us = f.u(r, j) * f.sigma[j];
      if (us == 0.0) continue;
      for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += us * f.v(c, j);
    }
  }
  return out;
}

std::vector<double> project_dense(const LsiSpace& space, std::span<const double> d) {
  const std::size_t m = space.dimension();
  if (d.size() != m) throw DimensionError("project: vector length differs from space dimension");
  const std::size_t k = space.k();
  std::vector<double> coords(k, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (d[i] == 0.0) continue;
    for (std::size_t j = 0; j < k; ++j) coords[j] += space.u_k(i, j) * d[i];
  }
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += space.u_k(i, j) * coords[j];
    out[i] = s;
  }
  return out;
}

SparseVector project(const LsiSpace& space, const SparseVector& d) {
  const std::size_t m = space.dimension();
  std::vector<double> dense(m, 0.0);
  for (const auto& e : d) {
    if (e.index >= m) {
      throw DimensionError("project: index " + std::to_string(e.index) +
                           " outside space dimension " + std::to_string(m));
    }
    dense[e.index] = e.value;
  }
  auto projected = project_dense(space, dense);
  std::vector<SparseEntry> entries;
  entries.reserve(m);
  for (std::size_t i = 0; i < m; ++i) entries.push_back({static_cast<TermId>(i), projected[i]});
  return SparseVector(std::move(entries));
}

}  // namespace cdlsi::linalg

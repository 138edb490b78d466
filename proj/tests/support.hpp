#pragma once

// Shared helpers for the test suites: seeded random inputs and independent
// reference computations built on Eigen.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cdlsi/corpus.hpp"
#include "cdlsi/linalg.hpp"
#include "cdlsi/sparse.hpp"

namespace testing {

using cdlsi::linalg::DenseMatrix;

inline DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                                 double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

inline Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  }
  return e;
}

/// Eigenvalues of the smaller Gram matrix (AᵀA or AAᵀ), descending, clamped
/// at zero. These are the squared singular values, zeros included.
inline std::vector<double> oracle_gram_eigenvalues(const DenseMatrix& m) {
  const Eigen::MatrixXd a = to_eigen(m);
  const Eigen::MatrixXd gram = a.rows() >= a.cols() ? Eigen::MatrixXd(a.transpose() * a) : Eigen::MatrixXd(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) out.push_back(std::max(0.0, solver.eigenvalues()(i)));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Singular values as square roots of the eigenvalues of AᵀA (or AAᵀ for wide
/// matrices), descending, dropping those below the rank tolerance.
inline std::vector<double> oracle_singular_values(const DenseMatrix& m) {
  const Eigen::MatrixXd a = to_eigen(m);
  const Eigen::MatrixXd gram = a.rows() >= a.cols() ? Eigen::MatrixXd(a.transpose() * a) : Eigen::MatrixXd(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) out.push_back(std::sqrt(std::max(0.0, solver.eigenvalues()(i))));
  std::sort(out.begin(), out.end(), std::greater<>());
  const double top = out.empty() ? 0.0 : out.front();
  std::erase_if(out, [&](double s) { return s <= 1e-12 * top || s == 0.0; });
  return out;
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// ‖XᵀX − I‖_max for the columns of x.
inline double orthonormality_error(const DenseMatrix& x) {
  const Eigen::MatrixXd e = to_eigen(x);
  return max_abs(e.transpose() * e - Eigen::MatrixXd::Identity(e.cols(), e.cols()));
}

/// Dense column j of a term-document matrix built from sparse documents over
/// the given row terms.
inline DenseMatrix term_document_matrix(const std::vector<cdlsi::corpus::WeightedDoc>& docs,
                                        const std::vector<cdlsi::TermId>& terms) {
  DenseMatrix a(terms.size(), docs.size());
  for (std::size_t j = 0; j < docs.size(); ++j) {
    for (std::size_t i = 0; i < terms.size(); ++i) a(i, j) = docs[j].weights.at(terms[i]);
  }
  return a;
}

/// Random non-negative sparse document over `terms`, normalized.
inline cdlsi::corpus::WeightedDoc random_doc(std::mt19937_64& rng, const std::string& id,
                                             const std::vector<cdlsi::TermId>& terms, double density = 0.6) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::bernoulli_distribution keep(density);
  std::vector<cdlsi::SparseEntry> entries;
  for (auto t : terms) {
    if (keep(rng)) entries.push_back({t, weight(rng)});
  }
  if (entries.empty()) entries.push_back({terms[rng() % terms.size()], weight(rng)});
  return {id, cdlsi::SparseVector::from_unsorted(std::move(entries)).normalized()};
}

inline std::vector<cdlsi::TermId> term_range(cdlsi::TermId first, cdlsi::TermId count) {
  std::vector<cdlsi::TermId> out(count);
  for (cdlsi::TermId i = 0; i < count; ++i) out[i] = first + i;
  return out;
}

inline cdlsi::corpus::Query query_of(std::string id, std::vector<cdlsi::SparseEntry> entries) {
  return {std::move(id), cdlsi::SparseVector::from_unsorted(std::move(entries))};
}

/// Random unit query over a few of the given terms.
inline cdlsi::corpus::Query random_query(std::mt19937_64& rng, const std::string& id, cdlsi::TermId vocabulary,
                                         std::size_t length) {
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::vector<cdlsi::SparseEntry> entries;
  for (std::size_t i = 0; i < length; ++i) entries.push_back({static_cast<cdlsi::TermId>(rng() % vocabulary), weight(rng)});
  return {id, cdlsi::SparseVector::from_unsorted(std::move(entries)).normalized()};
}

}  // namespace testing

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cdlsi/error.hpp"
#include "cdlsi/linalg.hpp"
#include "support.hpp"

using namespace cdlsi;
using namespace cdlsi::linalg;

namespace {

double reconstruction_error(const DenseMatrix& a, const SvdFactors& f) {
  const auto rebuilt = low_rank_approximation(f, f.rank());
  return subtract(a, rebuilt).frobenius_norm();
}

}  // namespace

TEST_SUITE("sparse") {
  TEST_CASE("construction validates ordering and finiteness") {
    CHECK_THROWS_AS(SparseVector({{2, 1.0}, {1, 1.0}}), ParameterError);
    CHECK_THROWS_AS(SparseVector({{1, 1.0}, {1, 2.0}}), ParameterError);
    CHECK_THROWS_AS(SparseVector({{1, std::nan("")}}), ParameterError);
    CHECK_NOTHROW(SparseVector({{0, 0.0}, {3, 1.0}}));
  }

  TEST_CASE("from_unsorted sums duplicates") {
    const auto v = SparseVector::from_unsorted({{5, 1.0}, {2, 0.5}, {5, 2.0}});
    REQUIRE(v.size() == 2);
    CHECK(v.at(2) == 0.5);
    CHECK(v.at(5) == 3.0);
    CHECK(v.at(7) == 0.0);
    CHECK_FALSE(v.contains(7));
  }

  TEST_CASE("norms and normalization") {
    const SparseVector v{{0, 3.0}, {4, 4.0}};
    CHECK(v.norm() == doctest::Approx(5.0));
    const auto n = v.normalized();
    CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(SparseVector{}.normalized().empty());
  }

  TEST_CASE("dot products") {
    const SparseVector x{{0, 1.0}, {2, 2.0}, {5, 3.0}};
    const SparseVector y{{2, 4.0}, {3, 1.0}, {5, -1.0}};
    CHECK(dot(x, y) == doctest::Approx(5.0));
    CHECK(dot(x, y) == dot(y, x));
    const std::vector<double> dense{1.0, 0.0, 1.0, 0.0, 0.0, 1.0};
    CHECK(dot(x, dense) == doctest::Approx(6.0));
  }
}

TEST_SUITE("svd") {
  TEST_CASE("identity has unit singular values") {
    const auto f = svd(DenseMatrix::identity(2));
    REQUIRE(f.rank() == 2);
    CHECK(f.sigma[0] == doctest::Approx(1.0));
    CHECK(f.sigma[1] == doctest::Approx(1.0));
  }

  TEST_CASE("diagonal matrix") {
    const std::vector<double> d{3.0, 1.0};
    const auto f = svd(DenseMatrix::diagonal(d));
    REQUIRE(f.rank() == 2);
    CHECK(f.sigma[0] == doctest::Approx(3.0));
    CHECK(f.sigma[1] == doctest::Approx(1.0));
  }

  TEST_CASE("upper shear gives the golden ratio pair") {
    const double phi = std::numbers::phi;
    const auto f = svd(DenseMatrix(2, 2, {1, 1, 0, 1}));
    REQUIRE(f.rank() == 2);
    CHECK(std::abs(f.sigma[0] - phi) < 1e-12);
    CHECK(std::abs(f.sigma[1] - 1.0 / phi) < 1e-12);
  }

  TEST_CASE("empty matrix is rejected") {
    CHECK_THROWS_AS((void)svd(DenseMatrix()), DimensionError);
    CHECK_THROWS_AS((void)svd(DenseMatrix(0, 3)), DimensionError);
  }

  TEST_CASE("zero matrix has rank 0") {
    const auto f = svd(DenseMatrix(3, 2));
    CHECK(f.rank() == 0);
    CHECK(f.u.rows() == 3);
    CHECK(f.v.rows() == 2);
  }

  TEST_CASE("random matrices agree with the eigen oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 150; ++trial) {
      const std::size_t rows = 1 + rng() % 9;
      const std::size_t cols = 1 + rng() % 9;
      auto a = testing::random_matrix(rng, rows, cols);
      if (trial % 5 == 0 && rows > 1) {
        // Duplicate a row to force rank deficiency.
        for (std::size_t j = 0; j < cols; ++j) a(rows - 1, j) = a(0, j);
      }
      const auto f = svd(a);
      const auto eigenvalues = testing::oracle_gram_eigenvalues(a);
      CAPTURE(rows);
      CAPTURE(cols);
      REQUIRE(f.rank() <= eigenvalues.size());
      for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        const double sigma = i < f.rank() ? f.sigma[i] : 0.0;
        if (eigenvalues[i] > 1e-10) {
          CHECK(std::abs(sigma - std::sqrt(eigenvalues[i])) < 1e-8);
        } else {
          // Zero singular values: compare squares, the square root of
          // eigenvalue round-off is far above 1e-8.
          CHECK(std::abs(sigma * sigma - eigenvalues[i]) < 1e-12);
        }
      }
      if (trial % 5 == 0 && rows > 1) CHECK(f.rank() <= std::min(rows - 1, cols));
      for (std::size_t i = 1; i < f.rank(); ++i) CHECK(f.sigma[i] <= f.sigma[i - 1]);
      CHECK(testing::orthonormality_error(f.u) < 1e-8);
      CHECK(testing::orthonormality_error(f.v) < 1e-8);
      CHECK(reconstruction_error(a, f) < 1e-8);
    }
  }

  TEST_CASE("badly scaled columns") {
    DenseMatrix a(3, 3, {1e6, 1, 0, 0, 1e-6, 1, 1, 0, 1e-3});
    const auto f = svd(a);
    const auto expected = testing::oracle_singular_values(a);
    REQUIRE(f.rank() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(f.sigma[i] == doctest::Approx(expected[i]).epsilon(1e-9));
    CHECK(reconstruction_error(a, f) < 1e-8);
  }
}

TEST_SUITE("truncation") {
  const std::vector<double> diag31{3.0, 1.0};

  TEST_CASE("threshold between values") {
    const auto s = truncate_by_threshold(svd(DenseMatrix::diagonal(diag31)), 2.0);
    REQUIRE(s.k() == 1);
    CHECK(s.sigma_k[0] == doctest::Approx(3.0));
  }

  TEST_CASE("zero threshold keeps full rank") {
    std::mt19937_64 rng(3);
    const auto f = svd(testing::random_matrix(rng, 5, 4));
    CHECK(truncate_by_threshold(f, 0.0).k() == f.rank());
  }

  TEST_CASE("singular value equal to the threshold is kept") {
    const auto f = svd(DenseMatrix::diagonal(diag31));
    CHECK(truncate_by_threshold(f, 1.0).k() == 2);
    CHECK(truncate_by_threshold(f, std::nextafter(1.0, 2.0)).k() == 1);
    CHECK(truncate_by_threshold(f, 10.0).k() == 0);
  }

  TEST_CASE("shear truncated at one") {
    const auto f = svd(DenseMatrix(2, 2, {1, 1, 0, 1}));
    const auto by_eps = truncate_by_threshold(f, 1.0);
    REQUIRE(by_eps.k() == 1);
    CHECK(by_eps.sigma_k[0] == doctest::Approx(std::numbers::phi));
    const auto by_rank = truncate_by_rank(f, 1);
    CHECK(by_rank.sigma_k == by_eps.sigma_k);
    CHECK(by_rank.u_k == by_eps.u_k);
  }

  TEST_CASE("rank truncation bounds") {
    const auto f = svd(DenseMatrix::diagonal(diag31));
    CHECK(truncate_by_rank(f, 1).sigma_k == std::vector<double>{3.0});
    CHECK(truncate_by_rank(f, 2).k() == 2);
    CHECK_THROWS_AS((void)truncate_by_rank(f, 0), ParameterError);
    CHECK_THROWS_AS((void)truncate_by_rank(f, 3), ParameterError);
    CHECK_THROWS_AS((void)truncate_by_threshold(f, -0.5), ParameterError);
  }

  TEST_CASE("threshold and rank truncation agree") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
      const auto f = svd(testing::random_matrix(rng, 6, 5, 0.0, 2.0));
      const double eps = std::uniform_real_distribution<double>(0.0, f.sigma.front())(rng);
      const auto k = threshold_rank(f, eps);
      REQUIRE(k >= 1);
      const auto a = truncate_by_threshold(f, eps);
      const auto b = truncate_by_rank(f, k);
      CHECK(a.u_k == b.u_k);
      CHECK(a.sigma_k == b.sigma_k);
    }
  }

  TEST_CASE("Eckart-Young spot check") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = testing::random_matrix(rng, 5, 4);
      const auto f = svd(a);
      for (std::size_t k = 1; k < f.rank(); ++k) {
        const double best = subtract(a, low_rank_approximation(f, k)).frobenius_norm();
        double tail = 0.0;
        for (std::size_t i = k; i < f.rank(); ++i) tail += f.sigma[i] * f.sigma[i];
        CHECK(best == doctest::Approx(std::sqrt(tail)).epsilon(1e-10));
        for (int sample = 0; sample < 100; ++sample) {
          const auto b = multiply(testing::random_matrix(rng, 5, k), testing::random_matrix(rng, k, 4));
          CHECK(best <= subtract(a, b).frobenius_norm() + 1e-9);
        }
      }
    }
  }
}

TEST_SUITE("projection") {
  TEST_CASE("axis projection") {
    LsiSpace s{DenseMatrix(2, 1, {1.0, 0.0}), {1.0}};
    const auto p = project(s, SparseVector{{0, 3.0}, {1, 4.0}});
    CHECK(p.at(0) == doctest::Approx(3.0));
    CHECK(p.at(1) == 0.0);
  }

  TEST_CASE("vectors in the span are unchanged, orthogonal ones vanish") {
    std::mt19937_64 rng(23);
    const auto f = svd(testing::random_matrix(rng, 6, 3));
    const auto s = truncate_by_rank(f, 3);
    // Column 0 of U lies in the span.
    std::vector<SparseEntry> in_span;
    for (TermId i = 0; i < 6; ++i) in_span.push_back({i, f.u(i, 0) * 2.0 + f.u(i, 2)});
    const SparseVector d(in_span);
    const auto p = project(s, d);
    for (TermId i = 0; i < 6; ++i) CHECK(std::abs(p.at(i) - d.at(i)) < 1e-12);

    // Remove the span component from a random vector.
    auto r = testing::random_matrix(rng, 6, 1);
    const auto full = project_dense(s, r.data());
    std::vector<SparseEntry> orth;
    for (TermId i = 0; i < 6; ++i) orth.push_back({i, r(i, 0) - full[i]});
    const auto q = project(s, SparseVector(orth));
    CHECK(q.norm() < 1e-12);
  }

  TEST_CASE("projection is idempotent") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
      const auto f = svd(testing::random_matrix(rng, 7, 4));
      const auto s = truncate_by_rank(f, 1 + rng() % f.rank());
      const auto d = testing::random_doc(rng, "d", testing::term_range(0, 7)).weights;
      const auto once = project(s, d);
      const auto twice = project(s, once);
      for (TermId i = 0; i < 7; ++i) CHECK(std::abs(once.at(i) - twice.at(i)) < 1e-10);
    }
  }

  TEST_CASE("out-of-range index is a dimension error") {
    LsiSpace s{DenseMatrix(2, 1, {1.0, 0.0}), {1.0}};
    CHECK_THROWS_AS((void)project(s, SparseVector{{2, 1.0}}), DimensionError);
  }

  TEST_CASE("dot_score") {
    CHECK(dot_score(SparseVector{{0, 1.0}}, SparseVector{{1, 1.0}}) == 0.0);
    const auto unit = SparseVector{{0, 1.0}, {3, 2.0}, {4, 2.0}}.normalized();
    CHECK(dot_score(unit, unit) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dot_score(SparseVector{{0, 0.5}, {1, 0.5}}, SparseVector{{0, 1.0}}) == 0.5);
  }
}

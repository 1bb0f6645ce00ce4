#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "graphon/constructions.hpp"
#include "graphon/rng.hpp"

using namespace graphon;

namespace {

bool is_sign_matrix(const Matrix& b) {
  return b.isApprox(b.transpose(), 0.0) && (b.array().abs() == 1.0).all();
}

/// min over all row/column permutation pairs of ||b1 - b2^{p, q}||_F^2.
double brute_permutation_distance(const Matrix& b1, const Matrix& b2) {
  const auto k = static_cast<int>(b1.rows());
  std::vector<int> p(k), q(k);
  std::iota(p.begin(), p.end(), 0);
  double best = 1e300;
  do {
    std::iota(q.begin(), q.end(), 0);
    do {
      double d = 0.0;
      for (int a = 0; a < k; ++a)
        for (int c = 0; c < k; ++c) d += std::pow(b1(a, c) - b2(p[a], q[c]), 2);
      best = std::min(best, d);
    } while (std::next_permutation(q.begin(), q.end()));
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

}  // namespace

TEST_CASE("two-class packing matrix and W_u") {
  const PackingMatrix b = PackingMatrix::two_class();
  Matrix expect(2, 2);
  expect << 1, 1, 1, -1;
  CHECK(b.entries == expect);

  const double eps = 0.1;
  Vector u(2);
  u << eps, -eps;
  const StepGraphon w = build_w_u(2, eps, b, u);
  CHECK(w.weights()[0] == doctest::Approx(0.6));
  CHECK(w.weights()[1] == doctest::Approx(0.4));
  Matrix q(2, 2);
  q << 1, 1, 1, 0;
  CHECK(w.values() == q);

  const StepGraphon balanced = build_w_u(2, eps, b, Vector::Zero(2));
  CHECK(balanced.weights().isApprox(Vector::Constant(2, 0.5)));

  CHECK_THROWS_AS(build_w_u(2, 0.125, b, Vector::Zero(2)), InvalidArgument);
  Vector unbalanced(2);
  unbalanced << eps, 0.0;
  CHECK_THROWS_AS(build_w_u(2, eps, b, unbalanced), InvalidArgument);
  Vector too_big(2);
  too_big << 0.11, -0.11;
  CHECK_THROWS_AS(build_w_u(2, eps, b, too_big), InvalidArgument);
}

TEST_CASE("W_u weights sum to one for random admissible u") {
  const Index k = 8;
  const double eps = 0.9 / (4.0 * k);
  PackingMatrix b;
  b.entries = Matrix::Ones(k, k);
  CounterRng rng(3, Stream::kTest);
  for (int t = 0; t < 50; ++t) {
    Vector u(k);
    for (Index a = 0; a < k; a += 2) {
      const double s = rng.bernoulli(0.5) ? eps : -eps;
      u[a] = s;
      u[a + 1] = -s;
    }
    const StepGraphon w = build_w_u(k, eps, b, u);
    CHECK(w.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((w.weights().array() >= 1.0 / k - eps - 1e-15).all());
    CHECK((w.weights().array() <= 1.0 / k + eps + 1e-15).all());
    CHECK((w.values().array() == 1.0).all());
  }
}

TEST_CASE("two-point pair") {
  const auto [w1, w2] = two_point_pair(0.25);
  CHECK(w1.classes() == 1);
  CHECK(w1.values()(0, 0) == 0.5);
  CHECK(w2.values()(0, 0) == 0.75);
  CHECK(w2.values()(0, 1) == 0.25);
  CHECK(w2.values()(1, 1) == 0.75);
  for (double e : {0.01, 0.1, 0.25}) {
    const auto [a, b] = two_point_pair(e);
    const double mean = b.weights().dot(b.values() * b.weights());
    CHECK(mean == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a.values()(0, 0) == 0.5);
  }
  CHECK_THROWS_AS(two_point_pair(0.0), InvalidArgument);
  CHECK_THROWS_AS(two_point_pair(0.3), InvalidArgument);
}

TEST_CASE("property checks on known matrices") {
  Matrix h(1, 1);
  h << 1;
  for (int d = 0; d < 5; ++d) {
    Matrix next(2 * h.rows(), 2 * h.rows());
    next << h, h, h, -h;
    h = next;
  }
  REQUIRE(h.rows() == 32);
  CHECK(is_sign_matrix(h));
  CHECK(packing_property1(h));
  CHECK_FALSE(packing_property1(Matrix::Ones(32, 32)));
  CHECK(packing_property2_failures(Matrix::Ones(32, 32), 100, 1) == 100);
}

TEST_CASE("random rows violate the inner-product bound rarely") {
  const Index k = 64;
  const int pairs = 10000;
  CounterRng rng(11, Stream::kTest);
  int violations = 0;
  for (int t = 0; t < pairs; ++t) {
    // Rows a != b of a symmetric Rademacher matrix share one entry B_ab.
    int dot = 1;
    for (Index c = 0; c < k - 1; ++c) {
      const int x = rng.bernoulli(0.5) ? 1 : -1;
      const int y = rng.bernoulli(0.5) ? 1 : -1;
      dot += x * y;
    }
    if (std::abs(dot) > k / 4) ++violations;
  }
  const double freq = static_cast<double>(violations) / pairs;
  CHECK(freq < 3.0 * 2.0 * std::exp(-static_cast<double>(k) / 32.0));
}

TEST_CASE("packing matrix at k = 128") {
  const PackingMatrix b = make_packing_matrix(128, 5, 20, 200);
  CHECK(b.size() == 128);
  CHECK(is_sign_matrix(b.entries));
  CHECK(b.property1_checked);
  CHECK(packing_property1(b.entries));
  CHECK(b.property2_samples == 200);
  const PackingMatrix again = make_packing_matrix(128, 5, 20, 200);
  CHECK(again.entries == b.entries);
}

TEST_CASE("packing matrix failure is reported") {
  try {
    make_packing_matrix(32, 1, 2, 500);
    FAIL("expected PackingNotFound");
  } catch (const PackingNotFound& e) {
    CHECK(e.failures().property2 > 0);
    CHECK(e.failures().best_property2_rate > 0.0);
    CHECK(std::string(e.what()).find("submatrix trials failed") != std::string::npos);
  }
  CHECK_THROWS_AS(make_packing_matrix(40, 1), InvalidArgument);
  CHECK_THROWS_AS(make_packing_matrix(16, 1), InvalidArgument);
}

TEST_CASE("subset packing") {
  const SubsetPacking p = varshamov_packing_vectors(32, 9);
  CHECK(p.subsets.size() >= 8);
  for (std::size_t i = 0; i < p.subsets.size(); ++i) {
    CHECK(p.subsets[i].size() == 16);
    CHECK(std::is_sorted(p.subsets[i].begin(), p.subsets[i].end()));
    for (std::size_t j = 0; j < i; ++j) {
      std::vector<int> diff;
      std::set_symmetric_difference(p.subsets[i].begin(), p.subsets[i].end(), p.subsets[j].begin(),
                                    p.subsets[j].end(), std::back_inserter(diff));
      CHECK(diff.size() > 8);
    }
  }
  const SubsetPacking q = varshamov_packing_vectors(32, 9);
  CHECK(q.subsets == p.subsets);
  CHECK_THROWS_AS(varshamov_packing_vectors(15, 1), InvalidArgument);
}

TEST_CASE("permutation distance") {
  CounterRng rng(13, Stream::kTest);
  for (int t = 0; t < 10; ++t) {
    Matrix b1(3, 3), b2(3, 3);
    for (Index a = 0; a < 3; ++a)
      for (Index c = 0; c <= a; ++c) {
        b1(a, c) = b1(c, a) = rng.bernoulli(0.5) ? 1.0 : -1.0;
        b2(a, c) = b2(c, a) = rng.bernoulli(0.5) ? 1.0 : -1.0;
      }
    CHECK(permutation_distance(b1, b2) == brute_permutation_distance(b1, b2));
    CHECK(permutation_distance(b1, b2, 100, 1) >= permutation_distance(b1, b2));
  }
}

TEST_CASE("sign-matrix packings") {
  const MatrixPacking p3 = varshamov_packing_matrices(3, 2, 100);
  CHECK(p3.certified);
  CHECK(p3.members.size() >= 2);
  for (std::size_t i = 0; i < p3.members.size(); ++i) {
    CHECK(is_sign_matrix(p3.members[i]));
    for (std::size_t j = 0; j < i; ++j) CHECK(brute_permutation_distance(p3.members[i], p3.members[j]) >= 4.5);
  }
  const MatrixPacking p4 = varshamov_packing_matrices(4, 2, 8);
  CHECK(p4.certified);
  CHECK(p4.members.size() == 8);
  for (std::size_t i = 0; i < p4.members.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(brute_permutation_distance(p4.members[i], p4.members[j]) >= 8.0);
  const MatrixPacking p6 = varshamov_packing_matrices(6, 2, 3, 200);
  CHECK_FALSE(p6.certified);
}

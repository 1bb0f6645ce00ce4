#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "graphon/estimators.hpp"
#include "graphon/rng.hpp"
#include "oracles.hpp"

using namespace graphon;

namespace {

AdjacencyObservation random_graph(Index n, double p, std::uint64_t seed) {
  Matrix t = Matrix::Constant(n, n, p);
  t.diagonal().setZero();
  return sample_network_sequence(ProbabilityMatrix(t), seed);
}

AdjacencyObservation cliques(Index count, Index size) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index c = 0; c < count; ++c) {
    for (Index i = 0; i < size; ++i) {
      for (Index j = 0; j < i; ++j) edges.emplace_back(c * size + i, c * size + j);
    }
  }
  return AdjacencyObservation::from_edge_list(count * size, edges);
}

Matrix sym2(double a, double b, double c) {
  Matrix q(2, 2);
  q << a, b, b, c;
  return q;
}

}  // namespace

TEST_CASE("partition bookkeeping") {
  const Partition z({1, 1, 0, 2}, 3);
  CHECK(z.class_sizes() == std::vector<Index>{1, 2, 1});
  std::vector<int> relabel;
  const Partition c = z.canonical(&relabel);
  CHECK(c.assignment() == std::vector<int>{0, 0, 1, 2});
  CHECK(relabel == std::vector<int>{1, 0, 2});
  CHECK_THROWS_AS(Partition({0, 3}, 2), InvalidArgument);
  CHECK_THROWS_AS(Partition({0, 0, 1}, 2, 2), InvalidArgument);
}

TEST_CASE("residual sum of squares") {
  const auto empty = AdjacencyObservation(EdgeMatrix::Zero(4, 4));
  CHECK(residual_sum_of_squares(empty, Matrix::Zero(2, 2), Partition({0, 0, 1, 1}, 2)) == 0.0);
  // Nodes 1, 2, 3 with z = (1, 1, 2) and A12 = 1, A13 = 0, A23 = 1.
  const auto a = AdjacencyObservation::from_edge_list(3, {{1, 0}, {2, 1}});
  CHECK(residual_sum_of_squares(a, sym2(1.0, 0.5, 0.0), Partition({0, 0, 1}, 2)) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(residual_sum_of_squares(a, Matrix::Zero(3, 3), Partition({0, 0, 1}, 2)),
                  InvalidArgument);
}

TEST_CASE("block averages") {
  const auto complete = cliques(1, 5);
  const Partition z({0, 1, 0, 1, 1}, 2);
  CHECK(block_averages(complete, z) == Matrix::Ones(2, 2));
  const auto single = AdjacencyObservation::from_edge_list(4, {{1, 0}});
  CHECK(block_averages(single, Partition({0, 0, 1, 1}, 2)) == sym2(1.0, 0.0, 0.0));
  // Singleton diagonal block has no pair.
  CHECK_THROWS_WITH_AS(block_averages(single, Partition({0, 1, 1, 1}, 2)),
                       doctest::Contains("block (0, 0)"), InvalidArgument);
  CHECK(block_averages(single, Partition({0, 1, 1, 1}, 2), EmptyBlock::kZero)(0, 0) == 0.0);
}

TEST_CASE("block-constant graphs are recovered exactly") {
  const Partition z({0, 1, 0, 2, 1, 2, 0}, 3);
  Matrix q(3, 3);
  q << 1, 0, 1, 0, 1, 0, 1, 0, 0;
  const Matrix t = block_constant_matrix(q, z);
  EdgeMatrix e = t.cast<std::uint8_t>();
  const AdjacencyObservation a(e);
  const Matrix est = block_averages(a, z);
  CHECK(est == q);
}

TEST_CASE("block averages minimise the residual for fixed z") {
  const auto a = random_graph(12, 0.4, 3);
  const Partition z({0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 0, 1}, 3);
  const Matrix best = block_averages(a, z);
  const double base = residual_sum_of_squares(a, best, z);
  CounterRng rng(11, Stream::kTest);
  for (int t = 0; t < 100; ++t) {
    Matrix other = best;
    for (Index i = 0; i < 3; ++i) {
      for (Index j = 0; j <= i; ++j) {
        other(i, j) = std::clamp(best(i, j) + 0.2 * (rng.uniform() - 0.5), 0.0, 1.0);
        other(j, i) = other(i, j);
      }
    }
    CHECK(base <= residual_sum_of_squares(a, other, z) + 1e-12);
  }
}

TEST_CASE("clipped averages minimise over the sup-norm ball (grid search)") {
  const auto a = random_graph(9, 0.6, 8);
  const Partition z({0, 0, 0, 0, 1, 1, 1, 1, 1}, 2);
  for (double r : {0.2, 0.45, 0.7}) {
    Matrix clipped = block_averages(a, z).cwiseMin(r);
    const double base = residual_sum_of_squares(a, clipped, z);
    double grid_best = 1e300;
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j)
        for (int l = 0; l <= 40; ++l) {
          const Matrix q = sym2(r * i / 40.0, r * j / 40.0, r * l / 40.0);
          grid_best = std::min(grid_best, residual_sum_of_squares(a, q, z));
        }
    CHECK(base <= grid_best + 1e-12);
  }
}

TEST_CASE("exact least squares on two cliques") {
  const auto a = cliques(2, 3);
  const BlockFit fit = least_squares_exact(a, 2, 1);
  CHECK(fit.objective == 0.0);
  CHECK(fit.partition.assignment() == std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK(fit.block_values == Matrix::Identity(2, 2));
  CHECK(fit.method == FitMethod::kExact);
}

TEST_CASE("exact least squares with k = 1 is the mean edge indicator") {
  const auto a = random_graph(7, 0.5, 21);
  const BlockFit fit = least_squares_exact(a, 1, 1);
  CHECK(fit.block_values(0, 0) == doctest::Approx(a.edge_density()).epsilon(1e-15));
}

TEST_CASE("exact least squares matches the brute-force oracle") {
  CounterRng rng(99, Stream::kTest);
  for (int t = 0; t < 30; ++t) {
    const Index n = 4 + static_cast<Index>(rng.below(4));
    const int k = 2 + static_cast<int>(rng.below(2));
    const int n0 = k * 2 <= n ? 1 + static_cast<int>(rng.below(2)) : 1;
    const auto a = random_graph(n, 0.2 + 0.6 * rng.uniform(), 500 + t);
    const BlockFit fit = least_squares_exact(a, k, n0);
    CHECK(std::abs(fit.objective - oracle::brute_force_ls(a.as_matrix(), k, n0)) <= 1e-12);
    CHECK(std::abs(fit.objective - residual_sum_of_squares(a, fit.block_values, fit.partition)) <= 1e-10);
  }
}

TEST_CASE("exact least squares errors") {
  const auto a = random_graph(6, 0.5, 1);
  CHECK_THROWS_AS(least_squares_exact(a, 4, 2), InvalidArgument);
  const auto big = random_graph(40, 0.5, 1);
  CHECK_THROWS_AS(least_squares_exact(big, 3, 1), BudgetExceeded);
  try {
    least_squares_exact(big, 3, 1);
  } catch (const BudgetExceeded& e) {
    CHECK(std::string(e.what()).find("least_squares_local") != std::string::npos);
  }
}

TEST_CASE("exact least squares beats random candidates") {
  const auto a = random_graph(8, 0.45, 77);
  const BlockFit fit = least_squares_exact(a, 2, 1);
  CounterRng rng(5, Stream::kTest);
  for (int t = 0; t < 1000; ++t) {
    std::vector<int> z(8);
    for (auto& v : z) v = static_cast<int>(rng.below(2));
    if (std::count(z.begin(), z.end(), 0) == 0 || std::count(z.begin(), z.end(), 1) == 0) continue;
    const Matrix q = sym2(rng.uniform(), rng.uniform(), rng.uniform());
    CHECK(fit.objective <= residual_sum_of_squares(a, q, Partition(z, 2)) + 1e-12);
  }
}

TEST_CASE("exact least squares is permutation equivariant") {
  const auto a = random_graph(8, 0.5, 31);
  const BlockFit fit = least_squares_exact(a, 3, 1);
  const std::vector<Index> perm{3, 7, 0, 5, 1, 6, 2, 4};
  EdgeMatrix e(8, 8);
  for (Index i = 0; i < 8; ++i)
    for (Index j = 0; j < 8; ++j) e(i, j) = a.edges()(perm[i], perm[j]);
  const BlockFit moved = least_squares_exact(AdjacencyObservation(e), 3, 1);
  CHECK(moved.objective == doctest::Approx(fit.objective).epsilon(1e-12));
  std::vector<double> q1(fit.block_values.data(), fit.block_values.data() + 9);
  std::vector<double> q2(moved.block_values.data(), moved.block_values.data() + 9);
  std::sort(q1.begin(), q1.end());
  std::sort(q2.begin(), q2.end());
  for (int i = 0; i < 9; ++i) CHECK(q1[i] == doctest::Approx(q2[i]).epsilon(1e-12));
}

TEST_CASE("restricted least squares") {
  const auto c = cliques(2, 3);
  const BlockFit half = least_squares_restricted(c, 2, 0.5);
  CHECK(half.block_values == sym2(0.5, 0.0, 0.5));
  CHECK(half.partition.assignment() == std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK(half.radius == 0.5);
  const auto empty = AdjacencyObservation(EdgeMatrix::Zero(5, 5));
  for (double r : {0.1, 1.0}) {
    const BlockFit f = least_squares_restricted(empty, 3, r);
    CHECK(f.objective == 0.0);
    CHECK(f.block_values.isZero());
  }
  CHECK_THROWS_AS(least_squares_restricted(c, 2, 0.0), InvalidArgument);
  CHECK_THROWS_AS(least_squares_restricted(c, 2, 1.5), InvalidArgument);
}

TEST_CASE("restricted least squares matches clipped brute force") {
  CounterRng rng(42, Stream::kTest);
  for (int t = 0; t < 20; ++t) {
    const Index n = 4 + static_cast<Index>(rng.below(4));
    const int k = 2 + static_cast<int>(rng.below(2));
    const double r = 0.2 + 0.8 * rng.uniform();
    const auto a = random_graph(n, 0.5, 900 + t);
    const BlockFit fit = least_squares_restricted(a, k, r);
    CHECK(std::abs(fit.objective - oracle::brute_force_ls(a.as_matrix(), k, 1, r)) <= 1e-12);
    CHECK(fit.block_values.maxCoeff() <= r);
    const BlockFit unrestricted = least_squares_exact(a, k, 1);
    if (r == 1.0) CHECK(fit.objective == unrestricted.objective);
  }
  const auto a = random_graph(7, 0.5, 3);
  CHECK(least_squares_restricted(a, 3, 1.0).objective == least_squares_exact(a, 3, 1).objective);
}

TEST_CASE("local search") {
  const auto c = cliques(2, 8);
  LocalSearchOptions opts;
  opts.restarts = 10;
  opts.seed = 4;
  const BlockFit fit = least_squares_local(c, 2, 1, opts);
  CHECK(fit.objective == 0.0);
  CHECK(fit.method == FitMethod::kLocalSearch);
  for (std::size_t i = 1; i < fit.trace.size(); ++i) CHECK(fit.trace[i] <= fit.trace[i - 1] + 1e-12);
  CHECK_THROWS_AS(least_squares_local(c, 9, 2, opts), InvalidArgument);
}

TEST_CASE("local search never beats the exact optimum and restarts help") {
  for (int t = 0; t < 30; ++t) {
    const auto a = random_graph(9, 0.5, 3000 + t);
    LocalSearchOptions one;
    one.restarts = 1;
    one.seed = t;
    LocalSearchOptions twenty = one;
    twenty.restarts = 20;
    const double exact = least_squares_exact(a, 2, 1).objective;
    const double best1 = least_squares_local(a, 2, 1, one).objective;
    const double best20 = least_squares_local(a, 2, 1, twenty).objective;
    CHECK(best1 >= exact - 1e-12);
    CHECK(best20 >= exact - 1e-12);
    CHECK(best20 <= best1 + 1e-12);
  }
}

TEST_CASE("local search trace is monotone and respects the radius") {
  const auto a = random_graph(40, 0.3, 17);
  LocalSearchOptions opts;
  opts.restarts = 3;
  opts.seed = 8;
  opts.radius = 0.25;
  const BlockFit fit = least_squares_local(a, 3, 4, opts);
  for (std::size_t i = 1; i < fit.trace.size(); ++i) CHECK(fit.trace[i] <= fit.trace[i - 1] + 1e-12);
  CHECK(fit.block_values.maxCoeff() <= 0.25);
  for (Index s : fit.partition.class_sizes()) CHECK(s >= 4);
  CHECK((fit.theta_hat.entries().array() >= 0.0).all());
}

TEST_CASE("data-driven radius") {
  CHECK(data_driven_radius(AdjacencyObservation(EdgeMatrix::Zero(5, 5)), 3.0) == 0.0);
  CHECK(data_driven_radius(cliques(1, 6), 1.0) == 1.0);
  const auto three = AdjacencyObservation::from_edge_list(4, {{1, 0}, {2, 0}, {3, 0}});
  CHECK(data_driven_radius(three, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(default_radius_multiplier(100) == doctest::Approx(std::log(std::log(100.0))));
}

TEST_CASE("oracle bias") {
  const Partition z({0, 0, 1, 1, 1, 0}, 2);
  const Matrix t = block_constant_matrix(sym2(0.7, 0.1, 0.4), z);
  CHECK(oracle_bias(ProbabilityMatrix(t), 2, 2).bias == doctest::Approx(0.0).epsilon(1e-15));
  CounterRng rng(6, Stream::kTest);
  Matrix r = Matrix::Zero(6, 6);
  for (Index i = 1; i < 6; ++i)
    for (Index j = 0; j < i; ++j) r(i, j) = r(j, i) = rng.uniform();
  const ProbabilityMatrix theta(r);
  CHECK(oracle_bias(theta, 6, 1).bias == doctest::Approx(0.0).epsilon(1e-15));
  const OracleBias b = oracle_bias(theta, 2, 1);
  // Both triangles count, so twice the unordered residual.
  CHECK(std::abs(b.bias - 2.0 * oracle::brute_force_ls(r, 2, 1)) <= 1e-10);
}

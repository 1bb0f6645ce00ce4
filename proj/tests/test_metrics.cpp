#include <doctest.h>

#include <cmath>
#include <numeric>
#include <span>

#include "graphon/constructions.hpp"
#include "graphon/estimators.hpp"
#include "graphon/metrics.hpp"
#include "graphon/rng.hpp"
#include "oracles.hpp"

using namespace graphon;

namespace {

Matrix random_symmetric(Index k, CounterRng& rng) {
  Matrix m(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b <= a; ++b) m(a, b) = m(b, a) = rng.uniform();
  return m;
}

StepGraphon random_equal_cells(Index m, CounterRng& rng) {
  return StepGraphon(Vector::Constant(m, 1.0 / static_cast<double>(m)), random_symmetric(m, rng));
}

ProbabilityMatrix random_theta(Index n, CounterRng& rng) {
  Matrix t = random_symmetric(n, rng);
  t.diagonal().setZero();
  return ProbabilityMatrix(t);
}

/// Random feasible coupling: random positive matrix scaled to the marginals.
Matrix random_coupling(const Vector& r, const Vector& c, CounterRng& rng) {
  Matrix w(r.size(), c.size());
  for (Index a = 0; a < w.rows(); ++a)
    for (Index b = 0; b < w.cols(); ++b) w(a, b) = 0.1 + rng.uniform();
  for (int it = 0; it < 5000; ++it) {
    for (Index a = 0; a < w.rows(); ++a) w.row(a) *= r[a] / w.row(a).sum();
    for (Index b = 0; b < w.cols(); ++b) w.col(b) *= c[b] / w.col(b).sum();
  }
  return w;
}

Matrix permutation_coupling(const std::vector<int>& p) {
  const auto m = static_cast<Index>(p.size());
  Matrix w = Matrix::Zero(m, m);
  for (Index a = 0; a < m; ++a) w(a, p[a]) = 1.0 / static_cast<double>(m);
  return w;
}

}  // namespace

TEST_CASE("frobenius risk") {
  CounterRng rng(1, Stream::kTest);
  const auto x = random_theta(7, rng);
  const auto y = random_theta(7, rng);
  CHECK(frobenius_risk(x, x) == 0.0);
  CHECK(frobenius_risk(x, y) == doctest::Approx(frobenius_risk(y, x)).epsilon(1e-15));
  Matrix c = Matrix::Constant(5, 5, 0.3);
  c.diagonal().setZero();
  CHECK(frobenius_risk(ProbabilityMatrix(c), ProbabilityMatrix::zeros(5)) ==
        doctest::Approx(0.09 * 20.0 / 25.0).epsilon(1e-14));
  CHECK_THROWS_AS(frobenius_risk(x, ProbabilityMatrix::zeros(4)), InvalidArgument);
}

TEST_CASE("empirical graphon") {
  CounterRng rng(2, Stream::kTest);
  const auto theta = random_theta(6, rng);
  const StepGraphon f = empirical_graphon(theta);
  CHECK(f.classes() == 6);
  CHECK(f(2.5 / 6.0, 4.2 / 6.0) == theta(2, 4));
  CHECK(f(1.0, 0.5 / 6.0) == theta(5, 0));
  CHECK(empirical_graphon(ProbabilityMatrix::zeros(3)).values().isZero());
  const Index res = 4 * 6;
  double integral = 0.0;
  for (Index i = 0; i < res; ++i)
    for (Index j = 0; j < res; ++j) {
      const double v = f((i + 0.5) / res, (j + 0.5) / res);
      integral += v * v;
    }
  integral /= static_cast<double>(res * res);
  CHECK(std::abs(integral - theta.entries().squaredNorm() / 36.0) < 1e-9);
}

TEST_CASE("common grid refinement") {
  Matrix q = Matrix::Constant(2, 2, 0.5);
  Vector third(2);
  third << 1.0 / 3.0, 2.0 / 3.0;
  const StepGraphon f(Vector::Constant(2, 0.5), q);
  const StepGraphon g(third, q);
  const RefinedPair r = refine_common_grid(f, g, 6);
  CHECK(r.grid.cells == 6);
  CHECK(r.grid.exact);
  CHECK(r.f.classes() == 6);
  CHECK(r.grid.g_counts == std::vector<std::int64_t>{2, 4});

  CounterRng rng(3, Stream::kTest);
  const StepGraphon e1 = random_equal_cells(4, rng);
  const StepGraphon e2 = random_equal_cells(4, rng);
  const RefinedPair same = refine_common_grid(e1, e2, 120);
  CHECK(same.grid.cells == 4);
  CHECK(same.f.values() == e1.values());
  CHECK(same.g.values() == e2.values());

  Vector w49(2);
  w49 << 0.49, 0.51;
  const CommonGrid hundred = common_grid(f, StepGraphon(w49, q), 100);
  CHECK(hundred.cells == 100);
  CHECK(hundred.exact);
  CHECK(hundred.g_counts == std::vector<std::int64_t>{49, 51});

  CHECK_THROWS_AS(common_grid(e1, e2, 3), InvalidArgument);
  Vector odd(2);
  odd << 1.0 / std::sqrt(2.0), 1.0 - 1.0 / std::sqrt(2.0);
  const CommonGrid snapped = common_grid(f, StepGraphon(odd, q), 10);
  CHECK_FALSE(snapped.exact);
  CHECK(snapped.snapped_mass > 0.0);
  CHECK(snapped.perturbation_bound == doctest::Approx(2.0 * 1.0 * snapped.snapped_mass));
}

TEST_CASE("coupling validation and composition") {
  const Vector half = Vector::Constant(2, 0.5);
  CHECK_NOTHROW(Coupling::independent(half, half));
  Matrix bad(2, 2);
  bad << 0.5, 0.0, 0.1, 0.4;
  CHECK_THROWS_AS(Coupling(bad, half, half), InvalidArgument);
  Matrix neg(2, 2);
  neg << 0.6, -0.1, -0.1, 0.6;
  CHECK_THROWS_AS(Coupling(neg, half, half), InvalidArgument);
  const Coupling id(Matrix(half.asDiagonal()), half, half);
  const Coupling c = compose(id, Coupling::independent(half, half));
  CHECK(c.omega().isApprox(Matrix::Constant(2, 2, 0.25)));
}

TEST_CASE("J matches the quadruple-loop oracle") {
  CounterRng rng(4, Stream::kTest);
  for (int t = 0; t < 20; ++t) {
    const Index k = 2 + static_cast<Index>(rng.below(3));
    const Index kp = 1 + static_cast<Index>(rng.below(4));
    const Matrix f = random_symmetric(k, rng);
    const Matrix g = random_symmetric(kp, rng);
    Vector r = Vector::Constant(k, 1.0 / k), c = Vector::Constant(kp, 1.0 / kp);
    const Matrix w1 = random_coupling(r, c, rng);
    const Matrix w2 = random_coupling(r, c, rng);
    CHECK(coupling_cross_objective(f, g, w1, w2) ==
          doctest::Approx(oracle::cross_objective(f, g, w1, w2)).epsilon(1e-12));
  }
}

TEST_CASE("decomposition of J over permutation pairs") {
  CounterRng rng(5, Stream::kTest);
  for (Index m = 2; m <= 5; ++m) {
    const Matrix f = random_symmetric(m, rng);
    const Matrix g = random_symmetric(m, rng);
    std::vector<int> p1(m), p2(m);
    std::iota(p1.begin(), p1.end(), 0);
    std::iota(p2.begin(), p2.end(), 0);
    CounterRng shuf(static_cast<std::uint64_t>(m), Stream::kTest);
    shuf.shuffle(std::span<int>(p1));
    shuf.shuffle(std::span<int>(p2));
    const Matrix h1 = permutation_coupling(p1), h2 = permutation_coupling(p2);
    const Matrix avg = 0.5 * (h1 + h2);
    const double expansion = 0.25 * (coupling_cross_objective(f, g, h1, h1) + coupling_cross_objective(f, g, h1, h2) +
                                     coupling_cross_objective(f, g, h2, h1) + coupling_cross_objective(f, g, h2, h2));
    CHECK(coupling_cross_objective(f, g, avg, avg) == doctest::Approx(expansion).epsilon(1e-13));
    // A cross term is the pair value (1/m^2) sum (f_ab - g_{p1(a) p2(b)})^2.
    double pair = 0.0;
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b) pair += std::pow(f(a, b) - g(p1[a], p2[b]), 2);
    CHECK(coupling_cross_objective(f, g, h1, h2) == doctest::Approx(pair / (m * m)).epsilon(1e-13));
  }
}

TEST_CASE("delta2 bounds: identical and constant graphons") {
  CounterRng rng(6, Stream::kTest);
  const StepGraphon f = random_equal_cells(4, rng);
  const DeltaBounds same = delta2_bounds_step(f, f);
  CHECK(same.upper == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(same.lower == 0.0);
  CHECK(same.lower_certified);
  const DeltaBounds consts = delta2_bounds_step(StepGraphon::constant(0.2), StepGraphon::constant(0.7));
  CHECK(consts.lower == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(consts.upper == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("delta2 bounds agree with permutation enumeration on equal cells") {
  CounterRng rng(7, Stream::kTest);
  for (int t = 0; t < 10; ++t) {
    const Index m = 3 + static_cast<Index>(rng.below(3));
    const StepGraphon f = random_equal_cells(m, rng);
    const StepGraphon g = random_equal_cells(m, rng);
    const DeltaBounds b = delta2_bounds_step(f, g);
    const auto minima = oracle::permutation_minima(f.values(), g.values());
    REQUIRE(b.lower_certified);
    REQUIRE(b.upper_exhaustive);
    CHECK(b.lower == doctest::Approx(std::min(minima.pair, b.upper)).epsilon(1e-12));
    CHECK(b.upper <= minima.single + 1e-12);
    CHECK(b.lower <= b.upper);
    CHECK(b.upper == doctest::Approx(coupling_objective(f, g, *b.upper_witness)).epsilon(1e-12));
  }
}

TEST_CASE("delta2 bounds are symmetric and relabeling invariant") {
  CounterRng rng(8, Stream::kTest);
  for (int t = 0; t < 5; ++t) {
    const StepGraphon f = random_equal_cells(4, rng);
    const StepGraphon g = random_equal_cells(4, rng);
    const DeltaBounds fg = delta2_bounds_step(f, g);
    const DeltaBounds gf = delta2_bounds_step(g, f);
    CHECK(std::abs(fg.lower - gf.lower) <= 1e-9);
    CHECK(std::max(fg.lower, gf.lower) <= std::min(fg.upper, gf.upper) + 1e-12);
    const std::vector<int> perm{2, 0, 3, 1};
    Matrix moved(4, 4);
    for (Index a = 0; a < 4; ++a)
      for (Index b = 0; b < 4; ++b) moved(a, b) = g.values()(perm[a], perm[b]);
    const DeltaBounds relabeled = delta2_bounds_step(f, StepGraphon(g.weights(), moved));
    CHECK(std::abs(relabeled.lower - fg.lower) <= 1e-9);
    CHECK(std::max(relabeled.lower, fg.lower) <= std::min(relabeled.upper, fg.upper) + 1e-12);
  }
}

TEST_CASE("bracketing against random feasible couplings") {
  CounterRng rng(9, Stream::kTest);
  Vector w(3);
  w << 0.25, 0.25, 0.5;
  for (int t = 0; t < 10; ++t) {
    const StepGraphon f(w, random_symmetric(3, rng));
    const StepGraphon g = random_equal_cells(2, rng);
    const DeltaBounds b = delta2_bounds_step(f, g);
    for (int s = 0; s < 10; ++s) {
      const Matrix c = random_coupling(f.weights(), g.weights(), rng);
      CHECK(b.lower <= coupling_cross_objective(f.values(), g.values(), c, c) + 1e-12);
    }
    CHECK(b.lower <= b.upper);
  }
}

TEST_CASE("composed witnesses satisfy the triangle inequality") {
  CounterRng rng(10, Stream::kTest);
  for (int t = 0; t < 5; ++t) {
    const StepGraphon f = random_equal_cells(3, rng);
    const StepGraphon g = random_equal_cells(3, rng);
    const StepGraphon h = random_equal_cells(3, rng);
    const DeltaBounds fg = delta2_bounds_step(f, g);
    const DeltaBounds gh = delta2_bounds_step(g, h);
    const Coupling composed = compose(*fg.upper_witness, *gh.upper_witness);
    const double direct = coupling_objective(f, h, composed);
    CHECK(std::sqrt(direct) <= std::sqrt(fg.upper) + std::sqrt(gh.upper) + 1e-9);
  }
}

TEST_CASE("lower-bound family and two-point pair") {
  const double eps = 0.05;
  Vector u1(2), u2(2);
  u1 << eps, -eps;
  u2 << -eps, eps;
  const auto b = PackingMatrix::two_class();
  const DeltaBounds wu = delta2_bounds_step(build_w_u(2, eps, b, u1), build_w_u(2, eps, b, u2));
  CHECK(wu.lower_certified);
  CHECK(wu.lower >= eps);
  for (double e : {0.05, 0.1, 0.25}) {
    const auto [w1, w2] = two_point_pair(e);
    const DeltaBounds tp = delta2_bounds_step(w1, w2);
    CHECK(tp.lower_certified);
    CHECK(std::abs(tp.lower - e * e) <= 1e-9);
    CHECK(std::abs(tp.upper - e * e) <= 1e-9);
  }
}

TEST_CASE("delta2 reports truncated searches") {
  CounterRng rng(11, Stream::kTest);
  const StepGraphon f = random_equal_cells(12, rng);
  const StepGraphon g = random_equal_cells(12, rng);
  DeltaSearchConfig cfg;
  cfg.max_plans_upper = 1000;
  cfg.max_plans_lower = 1000;
  const DeltaBounds b = delta2_bounds_step(f, g, cfg);
  CHECK_FALSE(b.upper_exhaustive);
  CHECK_FALSE(b.lower_certified);
  CHECK(b.lower == 0.0);
  CHECK(b.upper > 0.0);
  CHECK(b.upper == doctest::Approx(coupling_objective(f, g, *b.upper_witness)).epsilon(1e-12));
}

TEST_CASE("snapped grids widen the bounds") {
  Vector odd(2);
  odd << 1.0 / std::sqrt(2.0), 1.0 - 1.0 / std::sqrt(2.0);
  Matrix q(2, 2);
  q << 0.9, 0.1, 0.1, 0.4;
  DeltaSearchConfig cfg;
  cfg.max_cells = 10;
  const DeltaBounds b = delta2_bounds_step(StepGraphon(odd, q), StepGraphon::constant(0.5), cfg);
  CHECK_FALSE(b.grid_exact);
  CHECK(b.snapping_bound > 0.0);
  CHECK(b.lower <= b.upper);
}

TEST_CASE("labeled coupling bound") {
  const StepGraphon w0(Vector::Constant(2, 0.5), Matrix::Identity(2, 2));
  std::vector<int> labels(100);
  for (int i = 0; i < 100; ++i) labels[i] = i < 46 ? 0 : 1;
  const auto theta = ProbabilityMatrix::zeros(100);
  CHECK(delta2_coupling_upper_labeled(theta, labels, w0, 1.0) == doctest::Approx(0.09).epsilon(1e-14));
  for (int i = 0; i < 100; ++i) labels[i] = i % 2;
  CHECK(delta2_coupling_upper_labeled(theta, labels, w0, 0.6) == doctest::Approx(0.36 / 100).epsilon(1e-14));
  CHECK(delta2_coupling_upper_labeled(theta, labels, w0, 0.0) == 0.0);
  labels[3] = 2;
  CHECK_THROWS_AS(delta2_coupling_upper_labeled(theta, labels, w0, 1.0), InvalidArgument);
}

TEST_CASE("sorted-design quadrature bound") {
  const Index n = 20;
  const double c = 0.4;
  const auto w = SmoothGraphon::constant(c);
  Vector design(n);
  for (Index i = 0; i < n; ++i) design[i] = std::fmod(0.37 * (i + 1), 1.0);
  const ProbabilityMatrix theta = graphon_probability_matrix(w, 1.0, design);
  // Only the zero diagonal differs: n cells of area 1/n^2 at height c.
  CHECK(delta2_sorted_upper_smooth(theta, design, w, 1.0) == doctest::Approx(c * c / n).epsilon(1e-12));
  CHECK(delta2_sorted_upper_smooth(ProbabilityMatrix::zeros(n), design, w, 0.0) == 0.0);
  CHECK_THROWS_AS(delta2_sorted_upper_smooth(theta, std::nullopt, w, 1.0), InvalidArgument);
}

TEST_CASE("sorted-design bound decays like 1/n for xy") {
  const auto w = SmoothGraphon::product();
  const double rho = 1.0;
  double previous = 0.0;
  for (Index n : {32, 64}) {
    double mean = 0.0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
      const GraphonSample s = sample_graphon_network(w, rho, n, 4000 + r);
      mean += delta2_sorted_upper_smooth(s.theta, s.observation.latent_design(), w, rho, 2);
    }
    mean /= reps;
    CHECK(mean <= 10.0 * rho * rho / static_cast<double>(n));
    if (previous > 0.0) CHECK(mean / previous < 0.75);
    previous = mean;
  }
}

TEST_CASE("triangle inequality with the same witness") {
  CounterRng rng(12, Stream::kTest);
  Matrix q(2, 2);
  q << 0.7, 0.2, 0.2, 0.5;
  const StepGraphon f0(Vector::Constant(2, 0.5), q);
  for (int t = 0; t < 5; ++t) {
    const GraphonSample s = sample_graphon_network(f0, 1.0, 8, 70 + t);
    const ProbabilityMatrix est = random_theta(8, rng);
    const double lhs = delta2_bounds_step(empirical_graphon(est), f0).upper;
    const double rhs = 2.0 * frobenius_risk(est, s.theta) +
                       2.0 * delta2_bounds_step(empirical_graphon(s.theta), f0).upper;
    CHECK(lhs <= rhs + 1e-12);
  }
}

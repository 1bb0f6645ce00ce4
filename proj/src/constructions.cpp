#include "graphon/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "graphon/rng.hpp"

namespace graphon {

namespace {

using IntMat = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

double excess(int inner, int limit) {
  const int over = std::abs(inner) - limit;
  return over > 0 ? static_cast<double>(over) * over : 0.0;
}

/// Penalty of rows i (and j) against all other rows.
double row_penalty(const IntMat& gram, Index i, Index j, int limit) {
  double total = 0.0;
  for (Index c = 0; c < gram.rows(); ++c) {
    if (c != i) total += excess(gram(i, c), limit);
    if (j != i && c != j && c != i) total += excess(gram(j, c), limit);
  }
  return total;
}

void flip(IntMat& b, IntMat& gram, Index i, Index j) {
  b(i, j) = -b(i, j);
  if (i != j) b(j, i) = -b(j, i);
  const IntMat ri = b.row(i) * b.transpose();
  gram.row(i) = ri;
  gram.col(i) = ri.transpose();
  if (i != j) {
    const IntMat rj = b.row(j) * b.transpose();
    gram.row(j) = rj;
    gram.col(j) = rj.transpose();
  }
}

/// Local search over symmetric sign flips that never increases the total
/// violation of the inner-product bound.
bool repair(IntMat& b, int limit, CounterRng& rng, std::int64_t max_flips) {
  const Index k = b.rows();
  IntMat gram = b * b.transpose();
  double total = 0.0;
  for (Index a = 0; a < k; ++a) {
    for (Index c = a + 1; c < k; ++c) total += excess(gram(a, c), limit);
  }
  for (std::int64_t step = 0; step < max_flips && total > 0.0; ++step) {
    const auto i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(k)));
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(k)));
    const double before = row_penalty(gram, i, j, limit);
    flip(b, gram, i, j);
    const double after = row_penalty(gram, i, j, limit);
    if (after > before) {
      flip(b, gram, i, j);
    } else {
      total += after - before;
    }
  }
  return total == 0.0;
}

std::vector<Index> identity(Index k) {
  std::vector<Index> p(static_cast<std::size_t>(k));
  std::iota(p.begin(), p.end(), Index{0});
  return p;
}

double permuted_distance(const Matrix& b1, const Matrix& b2, const std::vector<Index>& pi,
                         const std::vector<Index>& pj) {
  double total = 0.0;
  const Index k = b1.rows();
  for (Index a = 0; a < k; ++a) {
    for (Index c = 0; c < k; ++c) {
      const double d = b1(a, c) - b2(pi[static_cast<std::size_t>(a)], pj[static_cast<std::size_t>(c)]);
      total += d * d;
    }
  }
  return total;
}

}  // namespace

PackingMatrix PackingMatrix::two_class() {
  PackingMatrix out;
  out.entries.resize(2, 2);
  out.entries << 1.0, 1.0, 1.0, -1.0;
  out.property1_checked = packing_property1(out.entries);
  return out;
}

bool packing_property1(const Matrix& b) {
  require(b.rows() == b.cols(), "packing matrix must be square");
  const Matrix gram = b * b.transpose();
  const double limit = static_cast<double>(b.rows()) / 4.0;
  for (Index a = 0; a < b.rows(); ++a) {
    for (Index c = a + 1; c < b.rows(); ++c) {
      if (std::abs(gram(a, c)) > limit) return false;
    }
  }
  return true;
}

std::int64_t packing_property2_failures(const Matrix& b, std::int64_t trials,
                                        std::uint64_t seed) {
  const Index k = b.rows();
  require(k >= 16 && k % 16 == 0, "k must be a positive multiple of 16");
  const Index s = k / 16;
  const double threshold = static_cast<double>(k * k) / 512.0;
  std::vector<Index> order = identity(k);
  std::int64_t failures = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    CounterRng rng(seed, Stream::kConstruction, static_cast<std::uint64_t>(t));
    // The first s entries label X in order, the next s label Y.
    std::iota(order.begin(), order.end(), Index{0});
    rng.shuffle(std::span<Index>(order));
    double sum = 0.0;
    for (Index a = 0; a < s; ++a) {
      for (Index c = 0; c < s; ++c) {
        const double d = b(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(c)]) -
                         b(order[static_cast<std::size_t>(s + a)], order[static_cast<std::size_t>(s + c)]);
        sum += d * d;
      }
    }
    if (sum < threshold) ++failures;
  }
  return failures;
}

PackingMatrix make_packing_matrix(Index k, std::uint64_t seed, int max_tries,
                                  std::int64_t property2_trials) {
  require(k >= 32 && k % 16 == 0, "k must be a multiple of 16 and at least 32");
  require(max_tries >= 1, "max_tries must be positive");
  require(property2_trials >= 0, "property2_trials must be nonnegative");
  const int limit = static_cast<int>(k / 4);
  PackingFailure failures;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    CounterRng rng(derive_seed(seed, {static_cast<std::uint64_t>(attempt)}), Stream::kConstruction);
    IntMat b(k, k);
    for (Index a = 0; a < k; ++a) {
      for (Index c = a; c < k; ++c) {
        b(a, c) = rng.bernoulli(0.5) ? 1 : -1;
        b(c, a) = b(a, c);
      }
    }
    if (!repair(b, limit, rng, 200 * k * k)) {
      ++failures.property1;
      continue;
    }
    PackingMatrix out;
    out.entries = b.cast<double>();
    if (!packing_property1(out.entries)) {
      ++failures.property1;
      continue;
    }
    out.property1_checked = true;
    const std::int64_t bad = packing_property2_failures(
        out.entries, property2_trials, derive_seed(seed, {static_cast<std::uint64_t>(attempt), 2}));
    if (property2_trials > 0) {
      failures.best_property2_rate =
          std::min(failures.best_property2_rate,
                   static_cast<double>(bad) / static_cast<double>(property2_trials));
    }
    if (bad > 0) {
      ++failures.property2;
      continue;
    }
    out.property2_samples = property2_trials;
    return out;
  }
  throw PackingNotFound("no packing matrix after " + std::to_string(max_tries) +
                            " tries: inner-product repair failed " +
                            std::to_string(failures.property1) + " times, submatrix trials failed " +
                            std::to_string(failures.property2) + " times (best violation rate " +
                            std::to_string(failures.best_property2_rate) + ")",
                        failures);
}

StepGraphon build_w_u(Index k, double epsilon, const PackingMatrix& b, const Vector& u) {
  require(k >= 1 && b.size() == k && u.size() == k, "B and u must have k rows");
  require(epsilon >= 0.0 && epsilon < 1.0 / (4.0 * static_cast<double>(k)),
          "epsilon must lie in [0, 1/(4k))");
  require((u.array().abs() <= epsilon * (1.0 + 1e-12)).all(), "entries of u must lie in [-eps, eps]");
  require(std::abs(u.sum()) <= 1e-12, "u must sum to zero");
  const Matrix& sign = b.entries;
  require((sign.array().abs() == 1.0).all() && sign == sign.transpose(),
          "B must be a symmetric {-1, +1} matrix");
  Vector weights = Vector::Constant(k, 1.0 / static_cast<double>(k)) + u;
  Matrix values = (Matrix::Ones(k, k) + sign) / 2.0;
  return StepGraphon(std::move(weights), std::move(values));
}

SubsetPacking varshamov_packing_vectors(Index k, std::uint64_t seed, std::int64_t candidates) {
  require(k >= 16 && k % 2 == 0, "k must be even and at least 16");
  SubsetPacking out;
  out.k = k;
  std::vector<std::vector<char>> members;
  std::vector<Index> order = identity(k);
  for (std::int64_t t = 0; t < candidates; ++t) {
    CounterRng rng(seed, Stream::kConstruction, static_cast<std::uint64_t>(t));
    std::iota(order.begin(), order.end(), Index{0});
    rng.shuffle(std::span<Index>(order));
    std::vector<char> in(static_cast<std::size_t>(k), 0);
    for (Index a = 0; a < k / 2; ++a) in[static_cast<std::size_t>(order[static_cast<std::size_t>(a)])] = 1;
    const bool separated = std::all_of(members.begin(), members.end(), [&](const auto& other) {
      Index diff = 0;
      for (Index a = 0; a < k; ++a) diff += in[static_cast<std::size_t>(a)] != other[static_cast<std::size_t>(a)];
      return 4 * diff > k;
    });
    ++out.candidates;
    if (!separated) continue;
    std::vector<int> subset;
    for (Index a = 0; a < k; ++a) {
      if (in[static_cast<std::size_t>(a)]) subset.push_back(static_cast<int>(a));
    }
    out.subsets.push_back(std::move(subset));
    members.push_back(std::move(in));
  }
  return out;
}

double permutation_distance(const Matrix& b1, const Matrix& b2, std::int64_t sampled_pairs,
                            std::uint64_t seed) {
  require(b1.rows() == b1.cols() && b1.rows() == b2.rows() && b2.rows() == b2.cols(),
          "matrices must be square and of the same size");
  const Index k = b1.rows();
  double best = std::numeric_limits<double>::infinity();
  if (sampled_pairs == 0) {
    std::vector<Index> pi = identity(k);
    do {
      std::vector<Index> pj = identity(k);
      do {
        best = std::min(best, permuted_distance(b1, b2, pi, pj));
      } while (std::next_permutation(pj.begin(), pj.end()));
    } while (std::next_permutation(pi.begin(), pi.end()));
    return best;
  }
  std::vector<Index> pi = identity(k);
  std::vector<Index> pj = identity(k);
  for (std::int64_t t = 0; t < sampled_pairs; ++t) {
    CounterRng rng(seed, Stream::kConstruction, static_cast<std::uint64_t>(t));
    rng.shuffle(std::span<Index>(pi));
    rng.shuffle(std::span<Index>(pj));
    best = std::min(best, permuted_distance(b1, b2, pi, pj));
  }
  return best;
}

MatrixPacking varshamov_packing_matrices(Index k, std::uint64_t seed, Index target,
                                         std::int64_t candidates) {
  require(k >= 1, "k must be positive");
  require(target >= 1, "target must be positive");
  MatrixPacking out;
  out.k = k;
  out.certified = k <= 5;
  const double separation = static_cast<double>(k * k) / 2.0;
  const Index free_entries = k * (k + 1) / 2;
  for (std::int64_t t = 0; t < candidates && static_cast<Index>(out.members.size()) < target; ++t) {
    CounterRng rng(seed, Stream::kConstruction, static_cast<std::uint64_t>(t));
    Matrix b(k, k);
    for (Index a = 0; a < k; ++a) {
      for (Index c = a; c < k; ++c) {
        b(a, c) = rng.bernoulli(0.5) ? 1.0 : -1.0;
        b(c, a) = b(a, c);
      }
    }
    ++out.candidates;
    const bool separated = std::all_of(out.members.begin(), out.members.end(), [&](const Matrix& m) {
      const std::int64_t sampled = out.certified ? 0 : 2000;
      return permutation_distance(b, m, sampled, derive_seed(seed, {static_cast<std::uint64_t>(t)})) >=
             separation;
    });
    if (separated) out.members.push_back(std::move(b));
    // Small k: stop once every sign pattern has had a fair chance.
    if (free_entries < 20 && t >= (std::int64_t{64} << free_entries)) break;
  }
  return out;
}

std::pair<StepGraphon, StepGraphon> two_point_pair(double epsilon) {
  require(epsilon > 0.0 && epsilon <= 0.25, "epsilon must lie in (0, 1/4]");
  Matrix values(2, 2);
  values << 0.5 + epsilon, 0.5 - epsilon, 0.5 - epsilon, 0.5 + epsilon;
  return {StepGraphon::constant(0.5), StepGraphon(Vector::Constant(2, 0.5), values)};
}

}  // namespace graphon

#include "graphon/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "graphon/rng.hpp"

namespace graphon {

namespace {

constexpr double kTieSlack = 1e-12;

double clip_value(double v, std::optional<double> radius) {
  return radius ? std::min(v, *radius) : v;
}

/// Objective (unordered pairs) of the best q for given ordered block sums.
double block_objective(const Matrix& sums, const Matrix& square_sums, const Matrix& pairs,
                       std::optional<double> radius, Matrix* q_out) {
  const Index k = sums.rows();
  double total = 0.0;
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) {
      double q = 0.0;
      if (pairs(a, b) > 0.0) {
        q = clip_value(sums(a, b) / pairs(a, b), radius);
        total += square_sums(a, b) - 2.0 * q * sums(a, b) + q * q * pairs(a, b);
      }
      if (q_out) (*q_out)(a, b) = q;
    }
  }
  return 0.5 * std::max(total, 0.0);
}

struct SearchResult {
  double objective = std::numeric_limits<double>::infinity();
  std::vector<int> assignment;
  Matrix q;
};

/// Depth-first enumeration of restricted growth strings with exactly k
/// classes of size >= n0; incremental block sums make each leaf O(k^2).
class PartitionEnumerator {
 public:
  PartitionEnumerator(const Matrix& x, int k, int n0, std::optional<double> radius)
      : x_(x),
        n_(x.rows()),
        k_(k),
        n0_(n0),
        radius_(radius),
        z_(static_cast<std::size_t>(n_), -1),
        sizes_(static_cast<std::size_t>(k), 0),
        sums_(Matrix::Zero(k, k)),
        square_sums_(Matrix::Zero(k, k)),
        pairs_(Matrix::Zero(k, k)) {}

  SearchResult run() {
    visit(0, 0);
    return best_;
  }

 private:
  void visit(Index i, int used) {
    if (i == n_) {
      if (used != k_) return;
      const double value = block_objective(sums_, square_sums_, pairs_, radius_, nullptr);
      if (value < best_.objective - kTieSlack) {
        best_.objective = value;
        best_.assignment = z_;
      }
      return;
    }
    // Per-class sums of x(i, j) over already placed j < i.
    std::vector<double> row(static_cast<std::size_t>(k_), 0.0);
    std::vector<double> row_sq(static_cast<std::size_t>(k_), 0.0);
    for (Index j = 0; j < i; ++j) {
      const double v = x_(i, j);
      row[static_cast<std::size_t>(z_[j])] += v;
      row_sq[static_cast<std::size_t>(z_[j])] += v * v;
    }
    const int top = std::min(used, k_ - 1);
    for (int c = 0; c <= top; ++c) {
      const int next_used = std::max(used, c + 1);
      place(i, c, row, row_sq, +1.0);
      if (feasible(i + 1, next_used)) visit(i + 1, next_used);
      place(i, c, row, row_sq, -1.0);
    }
  }

  bool feasible(Index placed, int used) const {
    Index needed = static_cast<Index>(k_ - used) * std::max(n0_, 1);
    for (int c = 0; c < used; ++c) {
      needed += std::max<Index>(0, n0_ - sizes_[static_cast<std::size_t>(c)]);
    }
    return needed <= n_ - placed;
  }

  void place(Index i, int c, const std::vector<double>& row,
             const std::vector<double>& row_sq, double sign) {
    if (sign < 0) --sizes_[static_cast<std::size_t>(c)];
    for (int d = 0; d < k_; ++d) {
      const auto du = static_cast<std::size_t>(d);
      const double s = sign * row[du];
      const double ss = sign * row_sq[du];
      const double np = sign * static_cast<double>(sizes_[du]);
      sums_(c, d) += s;
      sums_(d, c) += s;
      square_sums_(c, d) += ss;
      square_sums_(d, c) += ss;
      pairs_(c, d) += np;
      pairs_(d, c) += np;
    }
    if (sign > 0) ++sizes_[static_cast<std::size_t>(c)];
    z_[static_cast<std::size_t>(i)] = sign > 0 ? c : -1;
  }

  const Matrix& x_;
  Index n_;
  int k_;
  int n0_;
  std::optional<double> radius_;
  std::vector<int> z_;
  std::vector<Index> sizes_;
  Matrix sums_;
  Matrix square_sums_;
  Matrix pairs_;
  SearchResult best_;
};

void check_enumeration(Index n, int k, int n0, const EnumerationOptions& options) {
  require(k >= 1, "k must be at least 1");
  require(n0 >= 1, "n0 must be at least 1");
  require(static_cast<Index>(k) * n0 <= n, "infeasible: k * n0 exceeds n");
  const double count = partition_count(n, k);
  if (count > options.budget) {
    throw BudgetExceeded("exhaustive least squares needs about " + std::to_string(count) +
                         " partition evaluations, above the budget of " +
                         std::to_string(options.budget) + "; use least_squares_local");
  }
}

BlockFit make_fit(const Matrix& x, Partition z, std::optional<double> radius,
                  FitMethod method) {
  const BlockStats s = block_statistics(x, z);
  Matrix q(z.classes(), z.classes());
  const double objective = block_objective(s.sums, s.square_sums, s.pairs, radius, &q);
  ProbabilityMatrix theta(block_constant_matrix(q, z));
  return BlockFit{std::move(z), std::move(q), objective, std::move(theta), method, radius, {}};
}

BlockFit enumerate_fit(const Matrix& x, int k, int n0, std::optional<double> radius,
                       FitMethod method, const EnumerationOptions& options) {
  check_enumeration(x.rows(), k, n0, options);
  SearchResult best = PartitionEnumerator(x, k, n0, radius).run();
  return make_fit(x, Partition(std::move(best.assignment), k, n0), radius, method);
}

}  // namespace

Partition::Partition(std::vector<int> assignment, int k, int min_class_size)
    : assignment_(std::move(assignment)), k_(k), min_class_size_(min_class_size) {
  require(k_ >= 1, "partition needs at least one class");
  require(min_class_size_ >= 0, "minimum class size must be nonnegative");
  for (int label : assignment_) {
    require(label >= 0 && label < k_, "class label out of range");
  }
  for (Index s : class_sizes()) {
    require(s >= min_class_size_, "class smaller than the minimum class size");
  }
}

std::vector<Index> Partition::class_sizes() const {
  std::vector<Index> sizes(static_cast<std::size_t>(k_), 0);
  for (int label : assignment_) ++sizes[static_cast<std::size_t>(label)];
  return sizes;
}

Partition Partition::canonical(std::vector<int>* relabel) const {
  std::vector<int> map(static_cast<std::size_t>(k_), -1);
  int next = 0;
  for (int label : assignment_) {
    if (map[static_cast<std::size_t>(label)] < 0) map[static_cast<std::size_t>(label)] = next++;
  }
  for (int& m : map) {
    if (m < 0) m = next++;
  }
  std::vector<int> out(assignment_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = map[static_cast<std::size_t>(assignment_[i])];
  }
  if (relabel) *relabel = map;
  return Partition(std::move(out), k_, min_class_size_);
}

std::string to_string(FitMethod method) {
  switch (method) {
    case FitMethod::kExact:
      return "exact";
    case FitMethod::kRestricted:
      return "restricted";
    case FitMethod::kLocalSearch:
      return "local_search";
  }
  return "unknown";
}

FitMethod parse_fit_method(const std::string& text) {
  if (text == "exact") return FitMethod::kExact;
  if (text == "restricted") return FitMethod::kRestricted;
  if (text == "local_search" || text == "local") return FitMethod::kLocalSearch;
  throw InvalidArgument("unknown fit method '" + text + "'");
}

Matrix block_averages(const AdjacencyObservation& a, const Partition& z, EmptyBlock policy) {
  return block_average_matrix(a.as_matrix(), z, policy);
}

Matrix block_constant_matrix(const Matrix& q, const Partition& z) {
  require(q.rows() == z.classes() && q.cols() == z.classes(), "q must be k x k");
  const Index n = z.size();
  Matrix out = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      out(i, j) = q(z[i], z[j]);
      out(j, i) = out(i, j);
    }
  }
  return out;
}

double residual_sum_of_squares(const Matrix& x, const Matrix& q, const Partition& z) {
  require(x.rows() == x.cols() && x.rows() == z.size(), "matrix and partition sizes differ");
  require(q.rows() == z.classes() && q.cols() == z.classes(), "q must be k x k");
  double total = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < i; ++j) {
      const double d = x(i, j) - q(z[i], z[j]);
      total += d * d;
    }
  }
  return total;
}

double residual_sum_of_squares(const AdjacencyObservation& a, const Matrix& q,
                               const Partition& z) {
  return residual_sum_of_squares(a.as_matrix(), q, z);
}

double partition_count(Index n, int k) {
  if (k <= 0 || k > n) return k == 0 && n == 0 ? 1.0 : 0.0;
  // Stirling numbers of the second kind, S(i, j) for j <= k.
  std::vector<double> row(static_cast<std::size_t>(k) + 1, 0.0);
  row[0] = 1.0;
  for (Index i = 1; i <= n; ++i) {
    for (int j = std::min<Index>(i, k); j >= 1; --j) {
      row[static_cast<std::size_t>(j)] =
          j * row[static_cast<std::size_t>(j)] + row[static_cast<std::size_t>(j) - 1];
    }
    row[0] = 0.0;
  }
  return row[static_cast<std::size_t>(k)];
}

BlockFit least_squares_exact(const AdjacencyObservation& a, int k, int n0,
                             const EnumerationOptions& options) {
  return enumerate_fit(a.as_matrix(), k, n0, std::nullopt, FitMethod::kExact, options);
}

BlockFit least_squares_restricted(const AdjacencyObservation& a, int k, double r,
                                  const EnumerationOptions& options) {
  require(r > 0.0 && r <= 1.0, "restriction radius must lie in (0, 1]");
  return enumerate_fit(a.as_matrix(), k, 1, r, FitMethod::kRestricted, options);
}

BlockFit least_squares_local(const AdjacencyObservation& a, int k, int n0,
                             const LocalSearchOptions& options) {
  const Index n = a.size();
  require(k >= 1, "k must be at least 1");
  require(n0 >= 1, "n0 must be at least 1");
  require(static_cast<Index>(k) * n0 <= n, "infeasible: k * n0 exceeds n");
  require(options.restarts >= 1, "restarts must be at least 1");
  if (options.radius) {
    require(*options.radius > 0.0 && *options.radius <= 1.0,
            "restriction radius must lie in (0, 1]");
  }
  const Matrix x = a.as_matrix();
  std::optional<BlockFit> best;

  for (int restart = 0; restart < options.restarts; ++restart) {
    CounterRng rng(options.seed, Stream::kInit, static_cast<std::uint64_t>(restart));
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    rng.shuffle(std::span<Index>(order));
    std::vector<int> z(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      z[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = static_cast<int>(i % k);
    }
    std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
    for (int c : z) ++sizes[static_cast<std::size_t>(c)];

    std::vector<double> trace;
    std::vector<double> neighbours(static_cast<std::size_t>(k));
    std::vector<double> members(static_cast<std::size_t>(k));
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      const Partition current(z, k, n0);
      Matrix q = block_average_matrix(x, current, EmptyBlock::kZero);
      if (options.radius) q = q.cwiseMin(*options.radius);
      trace.push_back(residual_sum_of_squares(x, q, current));

      bool improved = false;
      for (Index i = 0; i < n; ++i) {
        const int from = z[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(from)] - 1 < n0) continue;
        std::fill(neighbours.begin(), neighbours.end(), 0.0);
        for (Index j = 0; j < n; ++j) {
          if (j != i) neighbours[static_cast<std::size_t>(z[static_cast<std::size_t>(j)])] += x(i, j);
        }
        for (int d = 0; d < k; ++d) {
          members[static_cast<std::size_t>(d)] =
              static_cast<double>(sizes[static_cast<std::size_t>(d)] - (d == from ? 1 : 0));
        }
        // Residual of node i's pairs if it sat in class c, with q held fixed.
        auto cost = [&](int c) {
          double total = 0.0;
          for (int d = 0; d < k; ++d) {
            const double s = neighbours[static_cast<std::size_t>(d)];
            const double m = members[static_cast<std::size_t>(d)];
            const double v = q(c, d);
            total += s * (1.0 - v) * (1.0 - v) + (m - s) * v * v;
          }
          return total;
        };
        int target = from;
        double target_cost = cost(from);
        const double from_cost = target_cost;
        for (int c = 0; c < k; ++c) {
          if (c == from) continue;
          const double v = cost(c);
          if (v < target_cost) {
            target = c;
            target_cost = v;
          }
        }
        if (target != from && target_cost < from_cost - kTieSlack) {
          z[static_cast<std::size_t>(i)] = target;
          --sizes[static_cast<std::size_t>(from)];
          ++sizes[static_cast<std::size_t>(target)];
          improved = true;
        }
      }
      if (!improved) break;
    }

    std::vector<int> relabel;
    Partition canonical = Partition(z, k, n0).canonical(&relabel);
    BlockFit fit = make_fit(x, std::move(canonical), options.radius, FitMethod::kLocalSearch);
    trace.push_back(fit.objective);
    fit.trace = std::move(trace);
    const bool better =
        !best || fit.objective < best->objective - kTieSlack ||
        (fit.objective <= best->objective + kTieSlack &&
         fit.partition.assignment() < best->partition.assignment());
    if (better) best = std::move(fit);
  }
  return std::move(*best);
}

double data_driven_radius(const AdjacencyObservation& a, double u_n) {
  return u_n * a.edge_density();
}

double default_radius_multiplier(Index n) {
  return std::log(std::log(static_cast<double>(n)));
}

OracleBias oracle_bias(const ProbabilityMatrix& theta0, int k, int n0,
                       const EnumerationOptions& options) {
  check_enumeration(theta0.size(), k, n0, options);
  SearchResult best = PartitionEnumerator(theta0.entries(), k, n0, std::nullopt).run();
  Partition z(std::move(best.assignment), k, n0);
  const Matrix q = block_average_matrix(theta0.entries(), z, EmptyBlock::kZero);
  const double bias = 2.0 * residual_sum_of_squares(theta0.entries(), q, z);
  return {bias, std::move(z)};
}

}  // namespace graphon

#include "graphon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "graphon/assignment.hpp"
#include "graphon/rng.hpp"

namespace graphon {

namespace {

constexpr double kMarginalTolerance = 1e-10;

std::vector<std::int64_t> exact_counts(const Vector& w, Index m) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(w.size()));
  for (Index a = 0; a < w.size(); ++a) {
    const double scaled = w[a] * static_cast<double>(m);
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-9) return {};
    counts[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(rounded);
  }
  if (std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) != m) return {};
  return counts;
}

std::vector<std::int64_t> snapped_counts(const Vector& w, Index m, double* mass) {
  const auto k = static_cast<std::size_t>(w.size());
  std::vector<std::int64_t> counts(k);
  std::vector<std::pair<double, std::size_t>> remainders(k);
  std::int64_t total = 0;
  for (std::size_t a = 0; a < k; ++a) {
    const double scaled = w[static_cast<Index>(a)] * static_cast<double>(m);
    counts[a] = static_cast<std::int64_t>(std::floor(scaled));
    remainders[a] = {scaled - std::floor(scaled), a};
    total += counts[a];
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t r = 0; total < m; ++r, ++total) ++counts[remainders[r % k].second];
  for (std::size_t a = 0; a < k; ++a) {
    *mass += std::abs(w[static_cast<Index>(a)] -
                      static_cast<double>(counts[a]) / static_cast<double>(m));
  }
  return counts;
}

Vector counts_to_weights(const std::vector<std::int64_t>& counts, Index m) {
  Vector w(static_cast<Index>(counts.size()));
  for (std::size_t a = 0; a < counts.size(); ++a) {
    w[static_cast<Index>(a)] = static_cast<double>(counts[a]) / static_cast<double>(m);
  }
  return w;
}

std::vector<Index> expand_classes(const std::vector<std::int64_t>& counts) {
  std::vector<Index> cls;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    for (std::int64_t c = 0; c < counts[a]; ++c) cls.push_back(static_cast<Index>(a));
  }
  return cls;
}

Matrix expand_values(const Matrix& q, const std::vector<Index>& cls) {
  const auto m = static_cast<Index>(cls.size());
  Matrix out(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      out(i, j) = q(cls[static_cast<std::size_t>(i)], cls[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

/// H(w)_{ac} = sum_{b,d} w_bd (f_ab - g_cd)^2, so J(w1, w2) = <w1, H(w2)>.
Matrix linearisation(const Matrix& f, const Matrix& g, const Matrix& w) {
  const Vector rows = w.rowwise().sum();
  const Vector cols = w.colwise().sum().transpose();
  Matrix h = -2.0 * f * w * g.transpose();
  h.colwise() += f.cwiseAbs2() * rows;
  h.rowwise() += (g.cwiseAbs2() * cols).transpose();
  return h;
}

struct PlanEntry {
  Index a;
  Index c;
  double weight;
};

std::vector<PlanEntry> plan_entries(const IntMatrix& plan, Index m) {
  std::vector<PlanEntry> out;
  for (Index a = 0; a < plan.rows(); ++a) {
    for (Index c = 0; c < plan.cols(); ++c) {
      if (plan(a, c) != 0) {
        out.push_back({a, c, static_cast<double>(plan(a, c)) / static_cast<double>(m)});
      }
    }
  }
  return out;
}

double plan_objective(const Matrix& f, const Matrix& g, const std::vector<PlanEntry>& e) {
  double total = 0.0;
  for (const auto& x : e) {
    for (const auto& y : e) {
      const double d = f(x.a, y.a) - g(x.c, y.c);
      total += x.weight * y.weight * d * d;
    }
  }
  return total;
}

Matrix plan_matrix(const IntMatrix& plan, Index m) {
  return plan.cast<double>() / static_cast<double>(m);
}

/// Calls visit(plan) for every nonnegative integer matrix with the given row
/// and column sums; returns false once more than `limit` plans were seen.
bool for_each_plan(const std::vector<std::int64_t>& rows, const std::vector<std::int64_t>& cols,
                   std::int64_t limit, const std::function<void(const IntMatrix&)>& visit) {
  const auto k = static_cast<Index>(rows.size());
  const auto kp = static_cast<Index>(cols.size());
  IntMatrix plan = IntMatrix::Zero(k, kp);
  std::vector<std::int64_t> col_left = cols;
  std::int64_t seen = 0;
  bool aborted = false;
  std::function<void(Index, Index, std::int64_t)> fill = [&](Index a, Index c,
                                                             std::int64_t row_left) {
    if (aborted) return;
    if (a == k) {
      if (++seen > limit) {
        aborted = true;
        return;
      }
      visit(plan);
      return;
    }
    if (c == kp - 1) {
      auto& left = col_left[static_cast<std::size_t>(c)];
      if (row_left > left) return;
      plan(a, c) = row_left;
      left -= row_left;
      const std::int64_t next_row = a + 1 < k ? rows[static_cast<std::size_t>(a + 1)] : 0;
      fill(a + 1, 0, next_row);
      left += row_left;
      plan(a, c) = 0;
      return;
    }
    // Remaining columns of this row must be able to absorb what is left.
    std::int64_t capacity_after = 0;
    for (Index d = c + 1; d < kp; ++d) capacity_after += col_left[static_cast<std::size_t>(d)];
    auto& left = col_left[static_cast<std::size_t>(c)];
    const std::int64_t hi = std::min(row_left, left);
    const std::int64_t lo = std::max<std::int64_t>(0, row_left - capacity_after);
    for (std::int64_t x = lo; x <= hi && !aborted; ++x) {
      plan(a, c) = x;
      left -= x;
      fill(a, c + 1, row_left - x);
      left += x;
    }
    plan(a, c) = 0;
  };
  if (k > 0 && kp > 0) fill(0, 0, rows[0]);
  return !aborted;
}

/// Exact minimum of <cost, plan> over integer plans with the given margins
/// (successive shortest paths on the bipartite transportation network).
double min_cost_transport(const Matrix& cost, const std::vector<std::int64_t>& supply,
                          const std::vector<std::int64_t>& demand) {
  const auto k = static_cast<Index>(supply.size());
  const auto kp = static_cast<Index>(demand.size());
  IntMatrix flow = IntMatrix::Zero(k, kp);
  std::vector<std::int64_t> supply_left = supply;
  std::vector<std::int64_t> demand_left = demand;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Nodes: rows 0..k-1, columns k..k+kp-1. Bellman-Ford from all rows with
  // spare supply through forward arcs (any row->col) and backward arcs
  // (col->row where flow > 0).
  for (;;) {
    const Index nodes = k + kp;
    std::vector<double> dist(static_cast<std::size_t>(nodes), kInf);
    std::vector<Index> parent(static_cast<std::size_t>(nodes), -1);
    for (Index a = 0; a < k; ++a) {
      if (supply_left[static_cast<std::size_t>(a)] > 0) dist[static_cast<std::size_t>(a)] = 0.0;
    }
    for (Index iter = 0; iter < nodes; ++iter) {
      bool changed = false;
      for (Index a = 0; a < k; ++a) {
        const double da = dist[static_cast<std::size_t>(a)];
        for (Index c = 0; c < kp; ++c) {
          const auto cu = static_cast<std::size_t>(k + c);
          if (da < kInf && da + cost(a, c) < dist[cu] - 1e-15) {
            dist[cu] = da + cost(a, c);
            parent[cu] = a;
            changed = true;
          }
          const double dc = dist[cu];
          if (flow(a, c) > 0 && dc < kInf && dc - cost(a, c) < dist[static_cast<std::size_t>(a)] - 1e-15) {
            dist[static_cast<std::size_t>(a)] = dc - cost(a, c);
            parent[static_cast<std::size_t>(a)] = k + c;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    Index sink = -1;
    double best = kInf;
    for (Index c = 0; c < kp; ++c) {
      const auto cu = static_cast<std::size_t>(k + c);
      if (demand_left[static_cast<std::size_t>(c)] > 0 && dist[cu] < best) {
        best = dist[cu];
        sink = c;
      }
    }
    if (sink < 0) break;
    // Bottleneck along the path.
    std::int64_t push = demand_left[static_cast<std::size_t>(sink)];
    Index node = k + sink;
    while (parent[static_cast<std::size_t>(node)] >= 0) {
      const Index prev = parent[static_cast<std::size_t>(node)];
      if (prev >= k) push = std::min(push, flow(node, prev - k));  // backward arc
      node = prev;
    }
    push = std::min(push, supply_left[static_cast<std::size_t>(node)]);
    const Index root = node;
    node = k + sink;
    while (parent[static_cast<std::size_t>(node)] >= 0) {
      const Index prev = parent[static_cast<std::size_t>(node)];
      if (prev < k) {
        flow(prev, node - k) += push;
      } else {
        flow(node, prev - k) -= push;
      }
      node = prev;
    }
    supply_left[static_cast<std::size_t>(root)] -= push;
    demand_left[static_cast<std::size_t>(sink)] -= push;
  }
  double total = 0.0;
  for (Index a = 0; a < k; ++a) {
    for (Index c = 0; c < kp; ++c) total += static_cast<double>(flow(a, c)) * cost(a, c);
  }
  return total;
}

void sinkhorn(Matrix& w, const Vector& rows, const Vector& cols) {
  for (int it = 0; it < 5000; ++it) {
    for (Index a = 0; a < w.rows(); ++a) {
      const double s = w.row(a).sum();
      if (rows[a] == 0.0 || s == 0.0) {
        w.row(a).setZero();
      } else {
        w.row(a) *= rows[a] / s;
      }
    }
    double err = 0.0;
    for (Index c = 0; c < w.cols(); ++c) {
      const double s = w.col(c).sum();
      if (cols[c] == 0.0 || s == 0.0) {
        w.col(c).setZero();
      } else {
        w.col(c) *= cols[c] / s;
      }
    }
    for (Index a = 0; a < w.rows(); ++a) err = std::max(err, std::abs(w.row(a).sum() - rows[a]));
    if (err < 1e-14) break;
  }
}

bool marginals_ok(const Matrix& w, const Vector& rows, const Vector& cols) {
  return ((w.rowwise().sum() - rows).cwiseAbs().maxCoeff() <= kMarginalTolerance) &&
         ((w.colwise().sum().transpose() - cols).cwiseAbs().maxCoeff() <= kMarginalTolerance) &&
         (w.array() >= 0.0).all();
}

}  // namespace

StepGraphon empirical_graphon(const ProbabilityMatrix& theta) {
  const Index n = theta.size();
  require(n >= 1, "empty probability matrix");
  return StepGraphon(Vector::Constant(n, 1.0 / static_cast<double>(n)), theta.entries());
}

CommonGrid common_grid(const StepGraphon& f, const StepGraphon& g, Index max_cells) {
  const auto positive = [](const Vector& w) { return (w.array() > 0.0).count(); };
  if (max_cells < 1 || max_cells < std::max(positive(f.weights()), positive(g.weights()))) {
    throw InvalidArgument("max_cells = " + std::to_string(max_cells) +
                          " is too small for the number of classes");
  }
  CommonGrid grid;
  for (Index m = 1; m <= max_cells; ++m) {
    auto fc = exact_counts(f.weights(), m);
    if (fc.empty()) continue;
    auto gc = exact_counts(g.weights(), m);
    if (gc.empty()) continue;
    grid.cells = m;
    grid.f_counts = std::move(fc);
    grid.g_counts = std::move(gc);
    return grid;
  }
  grid.cells = max_cells;
  grid.exact = false;
  grid.f_counts = snapped_counts(f.weights(), max_cells, &grid.snapped_mass);
  grid.g_counts = snapped_counts(g.weights(), max_cells, &grid.snapped_mass);
  const double sup = f.sup_norm() + g.sup_norm();
  grid.perturbation_bound = 2.0 * sup * sup * grid.snapped_mass;
  return grid;
}

RefinedPair refine_common_grid(const StepGraphon& f, const StepGraphon& g, Index max_cells) {
  CommonGrid grid = common_grid(f, g, max_cells);
  const Vector uniform = Vector::Constant(grid.cells, 1.0 / static_cast<double>(grid.cells));
  StepGraphon rf(uniform, expand_values(f.values(), expand_classes(grid.f_counts)));
  StepGraphon rg(uniform, expand_values(g.values(), expand_classes(grid.g_counts)));
  return {std::move(rf), std::move(rg), std::move(grid)};
}

Coupling::Coupling(Matrix omega, Vector row_marginals, Vector col_marginals)
    : omega_(std::move(omega)),
      row_marginals_(std::move(row_marginals)),
      col_marginals_(std::move(col_marginals)) {
  require(omega_.rows() == row_marginals_.size() && omega_.cols() == col_marginals_.size(),
          "coupling dimensions do not match its marginals");
  require(marginals_ok(omega_, row_marginals_, col_marginals_),
          "coupling is negative or violates its marginals");
}

Coupling Coupling::independent(const Vector& row_marginals, const Vector& col_marginals) {
  return Coupling(row_marginals * col_marginals.transpose(), row_marginals, col_marginals);
}

double coupling_cross_objective(const Matrix& f_values, const Matrix& g_values,
                                const Matrix& omega1, const Matrix& omega2) {
  require(omega1.rows() == f_values.rows() && omega1.cols() == g_values.rows() &&
              omega2.rows() == omega1.rows() && omega2.cols() == omega1.cols(),
          "coupling dimensions do not match the graphons");
  // A sum of nonnegative terms; the expanded form can round slightly below 0.
  return std::max(0.0, omega1.cwiseProduct(linearisation(f_values, g_values, omega2)).sum());
}

double coupling_objective(const StepGraphon& f, const StepGraphon& g, const Coupling& w) {
  return coupling_cross_objective(f.values(), g.values(), w.omega(), w.omega());
}

Coupling compose(const Coupling& fg, const Coupling& gh) {
  require(fg.omega().cols() == gh.omega().rows(), "couplings do not share a middle graphon");
  Vector inverse(fg.col_marginals().size());
  for (Index b = 0; b < inverse.size(); ++b) {
    inverse[b] = fg.col_marginals()[b] > 0.0 ? 1.0 / fg.col_marginals()[b] : 0.0;
  }
  Matrix omega = fg.omega() * inverse.asDiagonal() * gh.omega();
  return Coupling(std::move(omega), fg.row_marginals(), gh.col_marginals());
}

DeltaBounds delta2_bounds_step(const StepGraphon& f, const StepGraphon& g,
                               const DeltaSearchConfig& config) {
  const CommonGrid grid = common_grid(f, g, config.max_cells);
  const Index m = grid.cells;
  const Matrix& fv = f.values();
  const Matrix& gv = g.values();
  const Vector rows = counts_to_weights(grid.f_counts, m);
  const Vector cols = counts_to_weights(grid.g_counts, m);

  DeltaBounds out;
  out.cells = m;
  out.grid_exact = grid.exact;
  out.snapping_bound = grid.perturbation_bound;
  std::ostringstream notes;

  double upper = std::numeric_limits<double>::infinity();
  Matrix witness;
  auto offer = [&](const Matrix& w, double value) {
    if (value < upper) {
      upper = value;
      witness = w;
    }
  };

  // Stage 1: every permutation coupling of the m cells, grouped by the
  // induced class-level transport plan.
  std::optional<IntMatrix> best_plan;
  double best_plan_value = std::numeric_limits<double>::infinity();
  out.upper_exhaustive =
      for_each_plan(grid.f_counts, grid.g_counts, config.max_plans_upper, [&](const IntMatrix& p) {
        const double v = plan_objective(fv, gv, plan_entries(p, m));
        if (v < best_plan_value) {
          best_plan_value = v;
          best_plan = p;
        }
      });
  if (best_plan) offer(plan_matrix(*best_plan, m), best_plan_value);
  notes << (out.upper_exhaustive ? "upper: exhaustive over permutation couplings"
                                 : "upper: permutation enumeration truncated");

  // Stage 2: alternating linear-assignment search on the cells.
  if (!out.upper_exhaustive) {
    const auto f_cls = expand_classes(grid.f_counts);
    const auto g_cls = expand_classes(grid.g_counts);
    const Matrix fc = expand_values(fv, f_cls);
    const Matrix gc = expand_values(gv, g_cls);
    const double scale = 1.0 / static_cast<double>(m * m);
    auto cells_objective = [&](const std::vector<Index>& pi) {
      double total = 0.0;
      for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b < m; ++b) {
          const double d = fc(a, b) - gc(pi[static_cast<std::size_t>(a)], pi[static_cast<std::size_t>(b)]);
          total += d * d;
        }
      }
      return total * scale;
    };
    for (int start = 0; start < config.assignment_starts; ++start) {
      CounterRng rng(config.seed, Stream::kSearch, static_cast<std::uint64_t>(start));
      std::vector<Index> pi(static_cast<std::size_t>(m));
      std::iota(pi.begin(), pi.end(), Index{0});
      if (start > 0) rng.shuffle(std::span<Index>(pi));
      double value = cells_objective(pi);
      for (int iter = 0; iter < 100; ++iter) {
        Matrix gp(m, m);
        for (Index j = 0; j < m; ++j) {
          for (Index b = 0; b < m; ++b) gp(j, b) = gc(j, pi[static_cast<std::size_t>(b)]);
        }
        Matrix cost = -2.0 * fc * gp.transpose();
        cost.colwise() += fc.rowwise().squaredNorm();
        cost.rowwise() += gp.rowwise().squaredNorm().transpose();
        const Assignment next = solve_assignment(cost);
        const double next_value = cells_objective(next.column);
        if (next_value >= value - 1e-15) break;
        pi = next.column;
        value = next_value;
      }
      IntMatrix plan = IntMatrix::Zero(fv.rows(), gv.rows());
      for (Index i = 0; i < m; ++i) {
        ++plan(f_cls[static_cast<std::size_t>(i)], g_cls[static_cast<std::size_t>(pi[static_cast<std::size_t>(i)])]);
      }
      offer(plan_matrix(plan, m), value);
    }
  }

  // Stage 3: mirror descent over the transport polytope with Sinkhorn
  // renormalisation, from the independent coupling and random interior points.
  for (int start = 0; start < config.descent_starts; ++start) {
    Matrix w;
    if (start == 0) {
      w = rows * cols.transpose();
    } else {
      CounterRng rng(config.seed, Stream::kSearch, 1000 + static_cast<std::uint64_t>(start));
      w.resize(fv.rows(), gv.rows());
      for (Index a = 0; a < w.rows(); ++a) {
        for (Index c = 0; c < w.cols(); ++c) w(a, c) = 0.05 + rng.uniform();
      }
    }
    sinkhorn(w, rows, cols);
    for (int it = 0; it < config.descent_iterations; ++it) {
      if (marginals_ok(w, rows, cols)) offer(w, coupling_cross_objective(fv, gv, w, w));
      const Matrix grad = 2.0 * linearisation(fv, gv, w);
      const double range = grad.cwiseAbs().maxCoeff();
      if (range <= 0.0) break;
      const double step = 4.0 / std::sqrt(1.0 + it);
      w = w.cwiseProduct((-step * grad / range).array().exp().matrix());
      sinkhorn(w, rows, cols);
    }
    if (marginals_ok(w, rows, cols)) offer(w, coupling_cross_objective(fv, gv, w, w));
  }

  // Lower bound: min over pairs of permutation couplings of J(w1, w2). One
  // side is enumerated; for fixed w1 the other side is a transportation
  // problem with integer margins, solved exactly.
  double lower = std::numeric_limits<double>::infinity();
  const bool lower_done =
      for_each_plan(grid.f_counts, grid.g_counts, config.max_plans_lower, [&](const IntMatrix& p) {
        const auto entries = plan_entries(p, m);
        Matrix cost = Matrix::Zero(fv.rows(), gv.rows());
        for (Index b = 0; b < fv.rows(); ++b) {
          for (Index d = 0; d < gv.rows(); ++d) {
            double s = 0.0;
            for (const auto& e : entries) {
              const double diff = fv(e.a, b) - gv(e.c, d);
              s += e.weight * diff * diff;
            }
            cost(b, d) = s / static_cast<double>(m);
          }
        }
        lower = std::min(lower, min_cost_transport(cost, grid.f_counts, grid.g_counts));
      });
  out.lower_certified = lower_done;
  if (!lower_done) {
    lower = 0.0;
    notes << "; lower: pair enumeration truncated, reported as 0 (uncertified)";
  } else {
    notes << "; lower: exhaustive over permutation pairs";
  }

  lower = std::max(0.0, std::min(lower, upper));
  if (!grid.exact) {
    lower = std::max(0.0, lower - grid.perturbation_bound);
    upper += grid.perturbation_bound;
    notes << "; weights snapped to 1/" << m << ", bounds widened by " << grid.perturbation_bound;
  }
  out.lower = lower;
  out.upper = upper;
  out.upper_witness.emplace(witness, rows, cols);
  out.notes = notes.str();
  return out;
}

double delta2_coupling_upper_labeled(const ProbabilityMatrix& theta0,
                                     const std::vector<int>& labels,
                                     const StepGraphon& w0, double rho) {
  const Index n = theta0.size();
  require(static_cast<Index>(labels.size()) == n, "need one label per node");
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  const Index k = w0.classes();
  Vector freq = Vector::Zero(k);
  for (int label : labels) {
    require(label >= 0 && label < k, "label out of range");
    freq[label] += 1.0;
  }
  freq /= static_cast<double>(n);
  const double l1 = (freq - w0.weights()).cwiseAbs().sum();
  return rho * rho * (l1 + 1.0 / static_cast<double>(n));
}

double delta2_sorted_upper_smooth(const ProbabilityMatrix& theta,
                                  const std::optional<Vector>& design,
                                  const SmoothGraphon& w0, double rho, int resolution) {
  require(design.has_value(), "the sorted-design bound needs the latent design");
  require(design->size() == theta.size(), "design length must equal n");
  require(resolution >= 1, "quadrature resolution must be positive");
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  const Index n = theta.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return (*design)[i] < (*design)[j]; });
  std::vector<Index> rank(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;

  // Graphon values on the quadrature lattice of [0,1]^2, indexed by sorted cell.
  const Index points = n * resolution;
  Vector nodes(points);
  for (Index p = 0; p < points; ++p) {
    nodes[p] = (static_cast<double>(p) + 0.5) / static_cast<double>(points);
  }
  Matrix lattice(points, points);
  for (Index p = 0; p < points; ++p) {
    for (Index q = 0; q <= p; ++q) {
      lattice(p, q) = rho * w0(nodes[p], nodes[q]);
      lattice(q, p) = lattice(p, q);
    }
  }
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Index ri = rank[static_cast<std::size_t>(i)] * resolution;
    for (Index j = 0; j < n; ++j) {
      const Index rj = rank[static_cast<std::size_t>(j)] * resolution;
      const double target = theta(i, j);
      total += (lattice.block(ri, rj, resolution, resolution).array() - target).square().sum();
    }
  }
  return total / static_cast<double>(points * points);
}

}  // namespace graphon

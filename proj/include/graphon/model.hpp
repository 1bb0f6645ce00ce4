#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "graphon/common.hpp"

namespace graphon {

/// k-step graphon W(x, y) = Q[phi(x), phi(y)], where phi maps consecutive
/// intervals of lengths weights[0], weights[1], ... to classes 0, 1, ...
class StepGraphon {
 public:
  StepGraphon(Vector weights, Matrix values);

  /// Constant graphon with a single class.
  static StepGraphon constant(double p);

  Index classes() const { return weights_.size(); }
  const Vector& weights() const { return weights_; }
  const Matrix& values() const { return values_; }

  /// Class of x in [0, 1]; the right endpoint belongs to the last class.
  Index class_of(double x) const;
  double operator()(double x, double y) const {
    return values_(class_of(x), class_of(y));
  }
  double sup_norm() const { return values_.cwiseAbs().maxCoeff(); }

  /// Same graphon with every value multiplied by rho (rho W in the sparse model).
  StepGraphon scaled(double rho) const;

 private:
  Vector weights_;
  Matrix values_;
  Vector cumulative_;
};

/// Smooth graphon given by an evaluator and a declared Hoelder bound
/// |W(x',y') - W(x,y)| <= M (|x'-x|^a + |y'-y|^a), a = min(alpha, 1).
class SmoothGraphon {
 public:
  using Evaluator = std::function<double(double, double)>;

  /// Validates symmetry, range and the declared bound on a grid x grid lattice.
  SmoothGraphon(Evaluator evaluator, double holder_alpha, double holder_const,
                std::string name = "custom", int grid = 64);

  double operator()(double x, double y) const { return evaluator_(x, y); }
  double holder_alpha() const { return alpha_; }
  double holder_const() const { return holder_const_; }
  const std::string& name() const { return name_; }

  static SmoothGraphon constant(double p);
  /// W(x, y) = x y.
  static SmoothGraphon product();
  /// W(x, y) = min(x, y).
  static SmoothGraphon minimum();
  /// Additive Weierstrass-type graphon (g(x) + g(y)) / 2 with
  /// g(x) = 1/2 + c sum_j 2^{-j/2} cos(2^j pi x); Hoelder-1/2 everywhere.
  static SmoothGraphon weierstrass_half(int terms = 12);

 private:
  Evaluator evaluator_;
  double alpha_;
  double holder_const_;
  std::string name_;
};

using Graphon = std::variant<StepGraphon, SmoothGraphon>;

double evaluate(const Graphon& w, double x, double y);

/// Symmetric n x n matrix of edge probabilities with zero diagonal.
class ProbabilityMatrix {
 public:
  explicit ProbabilityMatrix(Matrix entries);
  static ProbabilityMatrix zeros(Index n) { return ProbabilityMatrix(Matrix::Zero(n, n)); }

  Index size() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }
  double sup_norm() const { return entries_.cwiseAbs().maxCoeff(); }

 private:
  Matrix entries_;
};

using EdgeMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Observed undirected simple graph (stored symmetrically), plus the latent
/// design when the graph was sampled from a graphon. Estimators never read
/// the design.
class AdjacencyObservation {
 public:
  explicit AdjacencyObservation(EdgeMatrix edges,
                                std::optional<Vector> latent_design = std::nullopt,
                                double sparsity = 1.0);

  static AdjacencyObservation from_edge_list(
      Index n, const std::vector<std::pair<Index, Index>>& edges);

  Index size() const { return edges_.rows(); }
  bool edge(Index i, Index j) const { return edges_(i, j) != 0; }
  const EdgeMatrix& edges() const { return edges_; }
  Matrix as_matrix() const { return edges_.cast<double>(); }
  const std::optional<Vector>& latent_design() const { return latent_design_; }
  double sparsity() const { return sparsity_; }

  std::int64_t edge_count() const;
  /// Mean edge indicator over the n(n-1)/2 unordered pairs.
  double edge_density() const;
  /// Edges as (i, j) with i > j, in row-major order.
  std::vector<std::pair<Index, Index>> edge_list() const;

 private:
  EdgeMatrix edges_;
  std::optional<Vector> latent_design_;
  double sparsity_;
};

/// Independent Bernoulli(theta_ij) edge for every pair j < i.
AdjacencyObservation sample_network_sequence(const ProbabilityMatrix& theta,
                                             std::uint64_t seed);

struct GraphonSample {
  AdjacencyObservation observation;
  ProbabilityMatrix theta;
};

/// The latent design xi_1, ..., xi_n ~ U[0,1] used by sample_graphon_network.
Vector sample_design(Index n, std::uint64_t seed);

/// Draws xi_i ~ U[0,1] i.i.d., sets theta_ij = rho W(xi_i, xi_j) (i != j) and
/// samples the graph from theta. The design is kept in the observation.
GraphonSample sample_graphon_network(const Graphon& w, double rho, Index n,
                                     std::uint64_t seed);

/// Probability matrix rho W(xi_i, xi_j) for a fixed design.
ProbabilityMatrix graphon_probability_matrix(const Graphon& w, double rho,
                                             const Vector& design);

/// Builds a step graphon from sorted interval breakpoints
/// 0 = b_0 < b_1 < ... < b_k = 1; interval a gets class a.
StepGraphon step_from_assignment(const std::vector<double>& breakpoints,
                                 const Matrix& q);

/// Class label phi(xi_i) for each design point.
std::vector<int> design_labels(const StepGraphon& w, const Vector& design);

}  // namespace graphon

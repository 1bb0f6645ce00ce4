#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphon/common.hpp"
#include "graphon/model.hpp"

namespace graphon {

/// Map z: [n] -> [k] (0-based labels) with a minimum class size n0.
class Partition {
 public:
  Partition(std::vector<int> assignment, int k, int min_class_size = 0);

  Index size() const { return static_cast<Index>(assignment_.size()); }
  int classes() const { return k_; }
  int min_class_size() const { return min_class_size_; }
  const std::vector<int>& assignment() const { return assignment_; }
  int operator[](Index i) const { return assignment_[static_cast<std::size_t>(i)]; }
  std::vector<Index> class_sizes() const;

  /// Relabels classes by order of first appearance. `relabel`, if given,
  /// receives old -> new labels (unused labels are appended in order).
  Partition canonical(std::vector<int>* relabel = nullptr) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> assignment_;
  int k_;
  int min_class_size_;
};

enum class FitMethod { kExact, kRestricted, kLocalSearch };

std::string to_string(FitMethod method);
FitMethod parse_fit_method(const std::string& text);

struct BlockFit {
  Partition partition;
  Matrix block_values;
  /// Residual sum of squares over unordered pairs j < i.
  double objective;
  ProbabilityMatrix theta_hat;
  FitMethod method;
  std::optional<double> radius;
  /// Objective after each block-value update (local search only).
  std::vector<double> trace;
};

/// How block_averages treats a block without any off-diagonal pair.
enum class EmptyBlock { kError, kZero };

/// Block sums over ordered pairs (i, j), i != j, with z(i) = a and z(j) = b.
struct BlockStats {
  Matrix sums;
  Matrix square_sums;
  Matrix pairs;
};

template <typename Derived>
BlockStats block_statistics(const Eigen::MatrixBase<Derived>& x, const Partition& z) {
  require(x.rows() == x.cols() && x.rows() == z.size(),
          "matrix and partition sizes differ");
  const int k = z.classes();
  BlockStats s{Matrix::Zero(k, k), Matrix::Zero(k, k), Matrix::Zero(k, k)};
  const auto sizes = z.class_sizes();
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (i == j) continue;
      const double v = x(i, j);
      s.sums(z[i], z[j]) += v;
      s.square_sums(z[i], z[j]) += v * v;
    }
  }
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const auto na = static_cast<double>(sizes[a]);
      const auto nb = static_cast<double>(sizes[b]);
      s.pairs(a, b) = a == b ? na * (na - 1.0) : na * nb;
    }
  }
  return s;
}

/// Mean of x over off-diagonal pairs of each block; the least-squares
/// block-constant fit for fixed z.
template <typename Derived>
Matrix block_average_matrix(const Eigen::MatrixBase<Derived>& x, const Partition& z,
                            EmptyBlock policy = EmptyBlock::kError) {
  const BlockStats s = block_statistics(x, z);
  const int k = z.classes();
  Matrix q(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      if (s.pairs(a, b) == 0.0) {
        if (policy == EmptyBlock::kError) {
          throw InvalidArgument("block (" + std::to_string(a) + ", " + std::to_string(b) +
                                ") contains no off-diagonal pair");
        }
        q(a, b) = 0.0;
      } else {
        q(a, b) = s.sums(a, b) / s.pairs(a, b);
      }
    }
  }
  return q;
}

Matrix block_averages(const AdjacencyObservation& a, const Partition& z,
                      EmptyBlock policy = EmptyBlock::kError);

/// Symmetric matrix with entries q(z(i), z(j)) off the diagonal and zeros on it.
Matrix block_constant_matrix(const Matrix& q, const Partition& z);

/// Sum over j < i of (A_ij - q(z(i), z(j)))^2.
double residual_sum_of_squares(const AdjacencyObservation& a, const Matrix& q,
                               const Partition& z);

/// Same residual for an arbitrary symmetric real matrix.
double residual_sum_of_squares(const Matrix& x, const Matrix& q, const Partition& z);

/// Number of partitions of n nodes into exactly k nonempty unlabeled classes.
double partition_count(Index n, int k);

struct EnumerationOptions {
  double budget = 1e8;
};

BlockFit least_squares_exact(const AdjacencyObservation& a, int k, int n0,
                             const EnumerationOptions& options = {});

/// Least squares over ||Q||_inf <= r and all partitions with nonempty classes.
BlockFit least_squares_restricted(const AdjacencyObservation& a, int k, double r,
                                  const EnumerationOptions& options = {});

struct LocalSearchOptions {
  int restarts = 20;
  std::uint64_t seed = 0;
  std::optional<double> radius;
  int max_sweeps = 10000;
};

/// Alternating minimisation from random balanced starts; best over restarts.
BlockFit least_squares_local(const AdjacencyObservation& a, int k, int n0,
                             const LocalSearchOptions& options);

/// u_n times the edge density.
double data_driven_radius(const AdjacencyObservation& a, double u_n);

/// log log n, the suggested default multiplier for data_driven_radius.
double default_radius_multiplier(Index n);

struct OracleBias {
  /// ||theta0 - best block-constant approximation||_F^2 (both triangles).
  double bias;
  Partition partition;
};

OracleBias oracle_bias(const ProbabilityMatrix& theta0, int k, int n0,
                       const EnumerationOptions& options = {});

}  // namespace graphon

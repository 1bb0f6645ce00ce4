#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphon/common.hpp"
#include "graphon/model.hpp"

namespace graphon {

/// Symmetric k x k matrix over {-1, +1} whose rows are nearly orthogonal
/// (|<B_a, B_b>| <= k/4) and whose principal k/16-submatrices on disjoint
/// index sets stay far apart under relabeling.
struct PackingMatrix {
  Matrix entries;
  bool property1_checked = false;
  /// Random (X, Y, pi1, pi2) tuples checked for the submatrix separation.
  std::int64_t property2_samples = 0;

  Index size() const { return entries.rows(); }

  /// B = [[1, 1], [1, -1]], the matrix used for two classes.
  static PackingMatrix two_class();
};

/// Exhaustive check of |<B_a, B_b>| <= k/4 over all rows a != b.
bool packing_property1(const Matrix& b);

/// Number of violating tuples among `trials` random draws of disjoint
/// X, Y of size k/16 with random labelings, i.e. tuples with
/// sum_{a,b} (B[pi1(a), pi1(b)] - B[pi2(a), pi2(b)])^2 < k^2 / 512.
std::int64_t packing_property2_failures(const Matrix& b, std::int64_t trials,
                                        std::uint64_t seed);

struct PackingFailure {
  std::int64_t property1 = 0;
  std::int64_t property2 = 0;
  /// Smallest fraction of violating property-2 trials seen over all tries.
  double best_property2_rate = 1.0;
};

/// Thrown by make_packing_matrix when every try failed.
class PackingNotFound : public std::runtime_error {
 public:
  PackingNotFound(const std::string& message, PackingFailure failures)
      : std::runtime_error(message), failures_(failures) {}
  const PackingFailure& failures() const { return failures_; }

 private:
  PackingFailure failures_;
};

/// Draws a random symmetric Rademacher matrix, repairs it by sign flips until
/// every row pair satisfies the inner-product bound, and keeps it if all
/// property-2 trials pass. Needs k a multiple of 16 and k >= 32.
PackingMatrix make_packing_matrix(Index k, std::uint64_t seed, int max_tries = 20,
                                  std::int64_t property2_trials = 1000);

/// Step graphon with weights 1/k + u_a and values (1 + B_ab) / 2; entries of
/// u lie in [-epsilon, epsilon], sum to zero, and epsilon < 1/(4k).
StepGraphon build_w_u(Index k, double epsilon, const PackingMatrix& b, const Vector& u);

struct SubsetPacking {
  Index k = 0;
  /// Sorted members of each kept half-subset.
  std::vector<std::vector<int>> subsets;
  std::int64_t candidates = 0;
};

/// Greedy packing of half-subsets of [k] with pairwise symmetric difference
/// greater than k/4, over `candidates` random half-subsets.
SubsetPacking varshamov_packing_vectors(Index k, std::uint64_t seed,
                                        std::int64_t candidates = 20'000);

/// min over row and column permutations (pi, pi') of ||B1 - B2^{pi,pi'}||_F^2.
/// Exhaustive when `sampled_pairs` is 0, otherwise a minimum over random pairs.
double permutation_distance(const Matrix& b1, const Matrix& b2,
                            std::int64_t sampled_pairs = 0, std::uint64_t seed = 0);

struct MatrixPacking {
  Index k = 0;
  std::vector<Matrix> members;
  /// Separation verified over all k!^2 permutation pairs.
  bool certified = false;
  std::int64_t candidates = 0;
};

/// Greedy family of symmetric {-1,+1} matrices with pairwise permutation
/// distance at least k^2/2. Exact for k <= 5; sampled (uncertified) above.
MatrixPacking varshamov_packing_matrices(Index k, std::uint64_t seed, Index target,
                                         std::int64_t candidates = 50'000);

/// (constant 1/2, balanced two-step graphon with 1/2 + eps on the diagonal
/// blocks and 1/2 - eps off them), 0 < eps <= 1/4.
std::pair<StepGraphon, StepGraphon> two_point_pair(double epsilon);

}  // namespace graphon

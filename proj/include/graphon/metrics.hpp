#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphon/common.hpp"
#include "graphon/model.hpp"

namespace graphon {

/// (1/n^2) sum_{i != j} (estimate - truth)_ij^2.
template <typename D1, typename D2>
double frobenius_risk(const Eigen::MatrixBase<D1>& estimate,
                      const Eigen::MatrixBase<D2>& truth) {
  require(estimate.rows() == truth.rows() && estimate.cols() == truth.cols() &&
              estimate.rows() == estimate.cols(),
          "risk needs two square matrices of the same size");
  const auto n = static_cast<double>(estimate.rows());
  if (estimate.rows() == 0) return 0.0;
  return ((estimate - truth).squaredNorm() -
          (estimate.diagonal() - truth.diagonal()).squaredNorm()) /
         (n * n);
}

inline double frobenius_risk(const ProbabilityMatrix& estimate,
                             const ProbabilityMatrix& truth) {
  return frobenius_risk(estimate.entries(), truth.entries());
}

/// n-step graphon with weights 1/n and values theta (zero diagonal kept).
StepGraphon empirical_graphon(const ProbabilityMatrix& theta);

/// Both graphons expressed as counts of m equal cells per class.
struct CommonGrid {
  Index cells = 0;
  std::vector<std::int64_t> f_counts;
  std::vector<std::int64_t> g_counts;
  /// sum_a |w_a - c_a / m| over both graphons; zero when no snapping was needed.
  double snapped_mass = 0.0;
  /// 2 (||f||_inf + ||g||_inf)^2 * snapped_mass.
  double perturbation_bound = 0.0;
  bool exact = true;
};

/// Smallest m <= max_cells with every weight a multiple of 1/m (to 1e-9);
/// otherwise weights are snapped to multiples of 1/max_cells by largest
/// remainder.
CommonGrid common_grid(const StepGraphon& f, const StepGraphon& g, Index max_cells);

struct RefinedPair {
  StepGraphon f;
  StepGraphon g;
  CommonGrid grid;
};

/// Re-expresses both graphons on the common grid of m equal-weight cells.
RefinedPair refine_common_grid(const StepGraphon& f, const StepGraphon& g,
                               Index max_cells);

/// Nonnegative k x k' matrix with prescribed row and column sums; couples
/// the classes of two step graphons.
class Coupling {
 public:
  Coupling(Matrix omega, Vector row_marginals, Vector col_marginals);

  const Matrix& omega() const { return omega_; }
  const Vector& row_marginals() const { return row_marginals_; }
  const Vector& col_marginals() const { return col_marginals_; }

  /// Product coupling omega_ab = row_a col_b.
  static Coupling independent(const Vector& row_marginals, const Vector& col_marginals);

 private:
  Matrix omega_;
  Vector row_marginals_;
  Vector col_marginals_;
};

/// J(w1, w2) = sum w1_{ac} w2_{bd} (f_ab - g_cd)^2. With w1 = w2 = w this is
/// the squared L2 distance of f and g after the rearrangement w describes.
double coupling_cross_objective(const Matrix& f_values, const Matrix& g_values,
                                const Matrix& omega1, const Matrix& omega2);

double coupling_objective(const StepGraphon& f, const StepGraphon& g, const Coupling& w);

/// Coupling of f and h through g: w_fg diag(1 / weight_g) w_gh.
Coupling compose(const Coupling& fg, const Coupling& gh);

struct DeltaSearchConfig {
  Index max_cells = 120;
  /// Transport plans enumerated for the exhaustive permutation upper bound.
  std::int64_t max_plans_upper = 1'000'000;
  /// Plans enumerated on one side of the pair lower bound; the other side is
  /// solved exactly as a transportation problem.
  std::int64_t max_plans_lower = 200'000;
  int assignment_starts = 8;
  int descent_iterations = 50;
  int descent_starts = 8;
  std::uint64_t seed = 0;
};

struct DeltaBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<Coupling> upper_witness;
  /// Lower bound came from the exhaustive pair enumeration.
  bool lower_certified = false;
  /// Upper bound is optimal over all permutation couplings of the grid.
  bool upper_exhaustive = false;
  bool grid_exact = true;
  Index cells = 0;
  double snapping_bound = 0.0;
  std::string notes;
};

/// Certified bracket on delta^2(f, g) for step graphons.
DeltaBounds delta2_bounds_step(const StepGraphon& f, const StepGraphon& g,
                               const DeltaSearchConfig& config = {});

/// Constructive bound rho^2 sum_a |lambda_a - lambda_hat_a| + rho^2 / n on
/// delta^2 between the empirical graphon of theta0 and rho w0, where
/// lambda_hat are the label frequencies.
double delta2_coupling_upper_labeled(const ProbabilityMatrix& theta0,
                                     const std::vector<int>& labels,
                                     const StepGraphon& w0, double rho);

/// Integral of |rho w0(tau x, tau y) - f_theta(x, y)|^2 where tau permutes the
/// n grid intervals into the order of the design; midpoint rule with
/// `resolution` points per interval and axis.
double delta2_sorted_upper_smooth(const ProbabilityMatrix& theta,
                                  const std::optional<Vector>& design,
                                  const SmoothGraphon& w0, double rho, int resolution = 4);

}  // namespace graphon

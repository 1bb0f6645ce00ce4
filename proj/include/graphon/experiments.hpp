#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "graphon/common.hpp"
#include "graphon/estimators.hpp"
#include "graphon/model.hpp"
#include "graphon/parallel.hpp"

namespace graphon {

enum class Metric { kFrobenius, kDelta2, kAgnostic, kBias };

std::string to_string(Metric metric);
Metric parse_metric(const std::string& text);

enum class RadiusMode { kNone, kRho, kFixed, kDataDriven };

std::string to_string(RadiusMode mode);
RadiusMode parse_radius_mode(const std::string& text);

struct EstimatorSpec {
  FitMethod method = FitMethod::kLocalSearch;
  /// Class counts to fit; every value is a separate grid cell.
  std::vector<int> k = {2};
  int n0 = 1;
  RadiusMode radius_mode = RadiusMode::kNone;
  /// Radius for kFixed, multiplier u_n for kDataDriven (0 selects log log n).
  double radius = 0.0;
  int restarts = 20;
  double budget = 1e8;
  /// Use local search when exact enumeration would exceed the budget.
  bool fallback_to_local = true;
};

enum class ExperimentKind { kRisk, kAgnostic, kBias };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);

struct Scenario {
  std::string id = "scenario";
  ExperimentKind kind = ExperimentKind::kRisk;
  Graphon graphon = StepGraphon::constant(0.5);
  std::vector<double> rho = {1.0};
  std::vector<Index> n = {32};
  int replicates = 1;
  std::uint64_t seed = 0;
  std::vector<Metric> metrics = {Metric::kFrobenius};
  EstimatorSpec estimator;
  /// Fill elapsed_ms; off by default so repeated runs give identical bytes.
  bool timing = false;
  unsigned threads = default_thread_count();

  void validate() const;
};

struct RiskRecord {
  std::string scenario_id;
  Index n = 0;
  int k = 0;
  double rho = 0.0;
  std::string method;
  std::string metric;
  double mean = 0.0;
  double stderr_value = 0.0;
  Index replicates = 0;
  double theory_rate = 0.0;
  std::string regime;
  std::uint64_t seed = 0;
  std::optional<double> elapsed_ms;
  /// Set when the cell could not be run; mean and stderr are then NaN.
  std::optional<std::string> skipped;
};

/// Seed of replicate r at sample size n. Independent of rho and k, so cells
/// that differ only in those share their random draws.
std::uint64_t replicate_seed(std::uint64_t master, Index n, int replicate);

/// Fits every sampled network and reports the Frobenius risk against the
/// true probability matrix (and, for step graphons, a delta^2 upper bound).
std::vector<RiskRecord> run_risk_experiment(const Scenario& s);

/// Label-frequency error sum_a |lambda_a - lambda_hat_a| ("frequency_l1") and
/// the coupling bound rho^2 (sum_a |...| + 1/n) ("agnostic_bound") of a step
/// graphon; "delta2" adds step-graphon delta^2 upper bounds when n is small.
std::vector<RiskRecord> run_agnostic_experiment(const Scenario& s);

/// ||theta0 - block average of theta0 over the sorted balanced partition||^2 / n^2.
std::vector<RiskRecord> run_bias_experiment(const Scenario& s);

/// Dispatches on the scenario's experiment kind.
std::vector<RiskRecord> run_experiment(const Scenario& s);

/// Nodes sorted by design value; the first k - 1 classes hold floor(n/k)
/// nodes each and the last class the rest.
Partition sorted_balanced_partition(const Vector& design, int k);

struct RateFit {
  double slope;
  double intercept;
  double r_squared;
};

/// Ordinary least squares of log y on log x; at least 3 positive points.
RateFit rate_regression(const std::vector<std::pair<double, double>>& points);

/// Locale-independent "%.17g".
std::string format_double(double value);

void write_csv(std::ostream& out, const std::vector<RiskRecord>& records);
void write_json_lines(std::ostream& out, const std::vector<RiskRecord>& records);
std::vector<RiskRecord> read_csv(std::istream& in);

enum class PlotAxis { kN, kK, kRho };

PlotAxis parse_plot_axis(const std::string& text);

/// Log-log SVG of mean against the chosen axis, one polyline per remaining
/// (method, metric, k, rho, n) combination.
std::string plot_svg(const std::vector<RiskRecord>& records, PlotAxis axis,
                     const std::string& title = "");

}  // namespace graphon

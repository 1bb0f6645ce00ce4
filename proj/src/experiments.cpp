#include "graphon/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "graphon/metrics.hpp"
#include "graphon/rng.hpp"
#include "graphon/theory.hpp"

namespace graphon {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct Summary {
  double mean;
  double stderr_value;
};

Summary summarize(const std::vector<double>& values) {
  CompensatedSum total;
  for (double v : values) total.add(v);
  const auto count = static_cast<double>(values.size());
  const double mean = total.value() / count;
  if (values.size() < 2) return {mean, 0.0};
  CompensatedSum squares;
  for (double v : values) squares.add((v - mean) * (v - mean));
  return {mean, std::sqrt(squares.value() / (count - 1.0) / count)};
}

/// One (cell, replicate) work item; values are indexed by output metric.
struct Task {
  std::size_t cell;
  int replicate;
};

struct CellResult {
  std::vector<std::vector<double>> values;  // [metric][replicate]
  std::vector<double> elapsed;              // per replicate
  std::vector<std::string> errors;          // per replicate, empty when fine
};

template <typename Work>
void run_tasks(const Scenario& s, std::vector<CellResult>& results, std::size_t metric_count,
               const std::vector<bool>& active, Work&& work) {
  const auto replicates = static_cast<std::size_t>(s.replicates);
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < results.size(); ++c) {
    results[c].values.assign(metric_count, std::vector<double>(replicates, kNaN));
    results[c].elapsed.assign(replicates, 0.0);
    results[c].errors.assign(replicates, "");
    if (!active[c]) continue;
    for (int r = 0; r < s.replicates; ++r) tasks.push_back({c, r});
  }
  parallel_for(tasks.size(), s.threads, [&](std::size_t t) {
    const Task& task = tasks[t];
    CellResult& cell = results[task.cell];
    const auto r = static_cast<std::size_t>(task.replicate);
    const auto start = std::chrono::steady_clock::now();
    try {
      std::vector<double> out(metric_count, kNaN);
      work(task.cell, task.replicate, out);
      for (std::size_t m = 0; m < metric_count; ++m) cell.values[m][r] = out[m];
    } catch (const std::exception& e) {
      cell.errors[r] = e.what();
    }
    cell.elapsed[r] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });
}

std::string regime_of(Index n, int k, double rho) {
  if (k < 2 || rho <= 0.0 || k > n) return "";
  return to_string(sparsity_regime({n, k, rho, std::nullopt, std::nullopt}));
}

double sbm_rate_or_zero(Index n, int k, double rho) {
  if (rho <= 0.0 || k > n) return 0.0;
  return sbm_minimax_rate({n, k, rho, std::nullopt, std::nullopt});
}

RiskRecord base_record(const Scenario& s, Index n, int k, double rho) {
  RiskRecord r;
  r.scenario_id = s.id;
  r.n = n;
  r.k = k;
  r.rho = rho;
  r.seed = s.seed;
  r.replicates = s.replicates;
  return r;
}

void finish_record(const Scenario& s, const CellResult& cell, std::size_t metric, RiskRecord& r) {
  const auto failed = std::find_if(cell.errors.begin(), cell.errors.end(),
                                   [](const std::string& e) { return !e.empty(); });
  if (failed != cell.errors.end()) {
    r.skipped = *failed;
  }
  if (r.skipped) {
    r.method = "skipped";
    r.mean = kNaN;
    r.stderr_value = kNaN;
    r.replicates = 0;
    return;
  }
  const Summary sum = summarize(cell.values[metric]);
  r.mean = sum.mean;
  r.stderr_value = sum.stderr_value;
  if (s.timing) {
    CompensatedSum t;
    for (double e : cell.elapsed) t.add(e);
    r.elapsed_ms = t.value();
  }
}

bool wants(const Scenario& s, Metric m) {
  return std::find(s.metrics.begin(), s.metrics.end(), m) != s.metrics.end();
}

}  // namespace

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::kFrobenius: return "frobenius";
    case Metric::kDelta2: return "delta2";
    case Metric::kAgnostic: return "agnostic";
    case Metric::kBias: return "bias";
  }
  return "unknown";
}

Metric parse_metric(const std::string& text) {
  for (Metric m : {Metric::kFrobenius, Metric::kDelta2, Metric::kAgnostic, Metric::kBias}) {
    if (to_string(m) == text) return m;
  }
  throw InvalidArgument("unknown metric '" + text + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kRisk: return "risk";
    case ExperimentKind::kAgnostic: return "agnostic";
    case ExperimentKind::kBias: return "bias";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  for (ExperimentKind k : {ExperimentKind::kRisk, ExperimentKind::kAgnostic, ExperimentKind::kBias}) {
    if (to_string(k) == text) return k;
  }
  throw InvalidArgument("unknown experiment kind '" + text + "'");
}

std::string to_string(RadiusMode mode) {
  switch (mode) {
    case RadiusMode::kNone: return "none";
    case RadiusMode::kRho: return "rho";
    case RadiusMode::kFixed: return "fixed";
    case RadiusMode::kDataDriven: return "data_driven";
  }
  return "unknown";
}

RadiusMode parse_radius_mode(const std::string& text) {
  for (RadiusMode m : {RadiusMode::kNone, RadiusMode::kRho, RadiusMode::kFixed, RadiusMode::kDataDriven}) {
    if (to_string(m) == text) return m;
  }
  throw InvalidArgument("unknown radius mode '" + text + "'");
}

void Scenario::validate() const {
  require(!rho.empty() && !n.empty() && !estimator.k.empty(), "scenario grids must be nonempty");
  require(!metrics.empty(), "scenario needs at least one metric");
  require(replicates >= 1, "replicates must be at least 1");
  require(id.find_first_of(",\"\n") == std::string::npos,
          "scenario id must not contain commas, quotes or newlines");
  for (double r : rho) require(r >= 0.0 && r <= 1.0, "rho values must lie in [0, 1]");
  for (Index v : n) require(v >= 2, "n values must be at least 2");
  for (int k : estimator.k) require(k >= 1, "k values must be positive");
  require(estimator.n0 >= 1, "n0 must be at least 1");
  require(estimator.restarts >= 1, "restarts must be positive");
  if (estimator.method == FitMethod::kRestricted) {
    require(estimator.radius_mode != RadiusMode::kNone, "restricted least squares needs a radius mode");
  }
}

std::uint64_t replicate_seed(std::uint64_t master, Index n, int replicate) {
  return derive_seed(master, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replicate)});
}

std::vector<RiskRecord> run_risk_experiment(const Scenario& s) {
  s.validate();
  struct Cell {
    Index n;
    int k;
    double rho;
    FitMethod method;
    std::optional<std::string> skipped;
  };
  std::vector<Cell> cells;
  for (Index n : s.n) {
    for (int k : s.estimator.k) {
      for (double rho : s.rho) {
        Cell c{n, k, rho, s.estimator.method, std::nullopt};
        const int n0 = c.method == FitMethod::kRestricted ? 1 : s.estimator.n0;
        if (k > n || static_cast<Index>(k) * std::max(n0, 1) > n) {
          c.skipped = "k * n0 exceeds n";
        } else if (c.method != FitMethod::kLocalSearch &&
                   partition_count(n, k) > s.estimator.budget) {
          if (s.estimator.fallback_to_local) {
            c.method = FitMethod::kLocalSearch;
          } else {
            c.skipped = "exact enumeration exceeds the budget";
          }
        }
        cells.push_back(c);
      }
    }
  }
  const bool want_delta = wants(s, Metric::kDelta2);
  const auto* step = std::get_if<StepGraphon>(&s.graphon);
  std::vector<bool> active(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) active[c] = !cells[c].skipped;

  std::vector<CellResult> results(cells.size());
  run_tasks(s, results, 2, active, [&](std::size_t ci, int r, std::vector<double>& out) {
    const Cell& c = cells[ci];
    const std::uint64_t seed = replicate_seed(s.seed, c.n, r);
    const GraphonSample sample = sample_graphon_network(s.graphon, c.rho, c.n, seed);
    const AdjacencyObservation& obs = sample.observation;
    std::optional<double> radius;
    switch (s.estimator.radius_mode) {
      case RadiusMode::kNone: break;
      case RadiusMode::kRho: radius = c.rho; break;
      case RadiusMode::kFixed: radius = s.estimator.radius; break;
      case RadiusMode::kDataDriven:
        // A radius above 1 is inactive.
        radius = std::min(1.0, data_driven_radius(obs, s.estimator.radius > 0.0
                                                           ? s.estimator.radius
                                                           : default_radius_multiplier(c.n)));
        break;
    }
    const EnumerationOptions enumeration{s.estimator.budget};
    std::optional<BlockFit> fit;
    if (c.method == FitMethod::kExact) {
      fit = least_squares_exact(obs, c.k, s.estimator.n0, enumeration);
    } else if (c.method == FitMethod::kRestricted) {
      fit = least_squares_restricted(obs, c.k, *radius, enumeration);
    } else {
      LocalSearchOptions opts;
      opts.restarts = s.estimator.restarts;
      opts.seed = derive_seed(seed, {static_cast<std::uint64_t>(c.k)});
      opts.radius = radius;
      fit = least_squares_local(obs, c.k, s.estimator.n0, opts);
    }
    out[0] = frobenius_risk(fit->theta_hat, sample.theta);
    if (want_delta && step != nullptr) {
      DeltaSearchConfig cfg;
      cfg.max_cells = std::max<Index>(cfg.max_cells, 4 * c.n);
      cfg.max_plans_upper = 20'000;
      cfg.max_plans_lower = 0;
      cfg.seed = seed;
      out[1] = delta2_bounds_step(empirical_graphon(fit->theta_hat), step->scaled(c.rho), cfg).upper;
    }
  });

  std::vector<RiskRecord> records;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& c = cells[ci];
    const double theory = sbm_rate_or_zero(c.n, c.k, c.rho);
    RiskRecord r = base_record(s, c.n, c.k, c.rho);
    r.method = to_string(c.method);
    r.metric = "frobenius";
    r.theory_rate = theory;
    r.regime = regime_of(c.n, c.k, c.rho);
    r.skipped = c.skipped;
    finish_record(s, results[ci], 0, r);
    records.push_back(r);
    if (want_delta) {
      RiskRecord d = base_record(s, c.n, c.k, c.rho);
      d.method = to_string(c.method);
      d.metric = "delta2";
      d.regime = r.regime;
      d.skipped = c.skipped;
      if (step == nullptr && !d.skipped) d.skipped = "delta2 needs a step graphon";
      if (c.rho > 0.0 && c.k <= c.n) {
        d.theory_rate = graphon_minimax_rate({c.n, c.k, c.rho, std::nullopt, std::nullopt});
      }
      finish_record(s, results[ci], 1, d);
      records.push_back(d);
    }
  }
  return records;
}

std::vector<RiskRecord> run_agnostic_experiment(const Scenario& s) {
  s.validate();
  const auto* step = std::get_if<StepGraphon>(&s.graphon);
  require(step != nullptr, "the agnostic experiment needs a step graphon");
  const Index k = step->classes();
  struct Cell {
    Index n;
    double rho;
  };
  std::vector<Cell> cells;
  for (Index n : s.n) {
    for (double rho : s.rho) cells.push_back({n, rho});
  }
  constexpr Index kMaxDeltaNodes = 256;
  const bool want_delta = wants(s, Metric::kDelta2);
  std::vector<bool> active(cells.size(), true);
  std::vector<CellResult> results(cells.size());
  run_tasks(s, results, 3, active, [&](std::size_t ci, int r, std::vector<double>& out) {
    const Cell& c = cells[ci];
    const std::uint64_t seed = replicate_seed(s.seed, c.n, r);
    const Vector design = sample_design(c.n, seed);
    const std::vector<int> labels = design_labels(*step, design);
    Vector freq = Vector::Zero(k);
    for (int label : labels) freq[label] += 1.0;
    freq /= static_cast<double>(c.n);
    const double l1 = (freq - step->weights()).cwiseAbs().sum();
    out[0] = l1;
    out[1] = c.rho * c.rho * (l1 + 1.0 / static_cast<double>(c.n));
    if (want_delta && c.n <= kMaxDeltaNodes) {
      const ProbabilityMatrix theta = graphon_probability_matrix(*step, c.rho, design);
      DeltaSearchConfig cfg;
      cfg.max_cells = std::max<Index>(cfg.max_cells, 4 * c.n);
      cfg.max_plans_upper = 20'000;
      cfg.max_plans_lower = 0;
      cfg.seed = seed;
      out[2] = delta2_bounds_step(empirical_graphon(theta), step->scaled(c.rho), cfg).upper;
    }
  });

  std::vector<RiskRecord> records;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& c = cells[ci];
    const double shape = std::sqrt(static_cast<double>(k) / static_cast<double>(c.n));
    const std::string regime = regime_of(c.n, static_cast<int>(k), c.rho);
    if (wants(s, Metric::kAgnostic) || !want_delta) {
      RiskRecord f = base_record(s, c.n, static_cast<int>(k), c.rho);
      f.method = "labels";
      f.metric = "frequency_l1";
      f.theory_rate = shape;
      f.regime = regime;
      finish_record(s, results[ci], 0, f);
      records.push_back(f);
      RiskRecord b = base_record(s, c.n, static_cast<int>(k), c.rho);
      b.method = "labels";
      b.metric = "agnostic_bound";
      b.theory_rate = c.rho * c.rho * shape;
      b.regime = regime;
      finish_record(s, results[ci], 1, b);
      records.push_back(b);
    }
    if (want_delta) {
      RiskRecord d = base_record(s, c.n, static_cast<int>(k), c.rho);
      d.method = "coupling_search";
      d.metric = "delta2";
      d.theory_rate = c.rho * c.rho * shape;
      d.regime = regime;
      if (c.n > kMaxDeltaNodes) d.skipped = "delta2 search limited to n <= 256";
      finish_record(s, results[ci], 2, d);
      records.push_back(d);
    }
  }
  return records;
}

std::vector<RiskRecord> run_experiment(const Scenario& s) {
  switch (s.kind) {
    case ExperimentKind::kRisk: return run_risk_experiment(s);
    case ExperimentKind::kAgnostic: return run_agnostic_experiment(s);
    case ExperimentKind::kBias: return run_bias_experiment(s);
  }
  throw InvalidArgument("unknown experiment kind");
}

Partition sorted_balanced_partition(const Vector& design, int k) {
  const Index n = design.size();
  require(k >= 1 && k <= n, "k must lie in [1, n]");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return design[i] < design[j]; });
  const Index n0 = n / k;
  std::vector<int> assignment(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) {
    assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] =
        static_cast<int>(std::min<Index>(r / n0, k - 1));
  }
  return Partition(std::move(assignment), k, static_cast<int>(n0));
}

std::vector<RiskRecord> run_bias_experiment(const Scenario& s) {
  s.validate();
  struct Cell {
    Index n;
    int k;
    double rho;
  };
  std::vector<Cell> cells;
  std::vector<bool> active;
  for (Index n : s.n) {
    for (int k : s.estimator.k) {
      for (double rho : s.rho) {
        cells.push_back({n, k, rho});
        active.push_back(k <= n);
      }
    }
  }
  std::vector<CellResult> results(cells.size());
  run_tasks(s, results, 1, active, [&](std::size_t ci, int r, std::vector<double>& out) {
    const Cell& c = cells[ci];
    const Vector design = sample_design(c.n, replicate_seed(s.seed, c.n, r));
    const ProbabilityMatrix theta = graphon_probability_matrix(s.graphon, c.rho, design);
    const Partition z = sorted_balanced_partition(design, c.k);
    const Matrix q = block_average_matrix(theta.entries(), z, EmptyBlock::kZero);
    out[0] = frobenius_risk(block_constant_matrix(q, z), theta.entries());
  });

  std::vector<RiskRecord> records;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& c = cells[ci];
    RiskRecord b = base_record(s, c.n, c.k, c.rho);
    b.method = "sorted_balanced";
    b.metric = "bias";
    if (const auto* smooth = std::get_if<SmoothGraphon>(&s.graphon)) {
      const double a = std::min(smooth->holder_alpha(), 1.0);
      const double m = smooth->holder_const();
      b.theory_rate = m * m * c.rho * c.rho * std::pow(static_cast<double>(c.k), -2.0 * a);
    }
    b.regime = regime_of(c.n, c.k, c.rho);
    if (!active[ci]) b.skipped = "k exceeds n";
    finish_record(s, results[ci], 0, b);
    records.push_back(b);
  }
  return records;
}

RateFit rate_regression(const std::vector<std::pair<double, double>>& points) {
  require(points.size() >= 3, "rate regression needs at least 3 points");
  const auto count = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : points) {
    require(x > 0.0 && y > 0.0 && std::isfinite(x) && std::isfinite(y),
            "rate regression needs positive finite values");
    mx += std::log(x);
    my += std::log(y);
  }
  mx /= count;
  my /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    const double dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  require(sxx > 0.0, "rate regression needs at least two distinct x values");
  const double slope = sxy / sxx;
  const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return {slope, my - slope * mx, r2};
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

const char* const kColumns[] = {"scenario_id", "n",      "k",           "rho",    "method",
                                "metric",      "mean",   "stderr",      "replicates",
                                "theory_rate", "regime", "seed",        "elapsed_ms"};

std::vector<std::string> fields(const RiskRecord& r) {
  return {r.scenario_id,
          std::to_string(r.n),
          std::to_string(r.k),
          format_double(r.rho),
          r.method,
          r.metric,
          format_double(r.mean),
          format_double(r.stderr_value),
          std::to_string(r.replicates),
          format_double(r.theory_rate),
          r.regime,
          std::to_string(r.seed),
          r.elapsed_ms ? format_double(*r.elapsed_ms) : std::string()};
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

double parse_double(const std::string& text) {
  if (text == "nan" || text == "-nan") return kNaN;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  require(res.ec == std::errc() && res.ptr == text.data() + text.size(),
          "malformed number '" + text + "'");
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<RiskRecord>& records) {
  for (std::size_t c = 0; c < std::size(kColumns); ++c) out << (c ? "," : "") << kColumns[c];
  out << '\n';
  for (const auto& r : records) {
    const auto f = fields(r);
    for (std::size_t c = 0; c < f.size(); ++c) out << (c ? "," : "") << f[c];
    out << '\n';
  }
}

void write_json_lines(std::ostream& out, const std::vector<RiskRecord>& records) {
  for (const auto& r : records) {
    out << "{\"scenario_id\":" << json_string(r.scenario_id) << ",\"n\":" << r.n
        << ",\"k\":" << r.k << ",\"rho\":" << json_number(r.rho)
        << ",\"method\":" << json_string(r.method) << ",\"metric\":" << json_string(r.metric)
        << ",\"mean\":" << json_number(r.mean) << ",\"stderr\":" << json_number(r.stderr_value)
        << ",\"replicates\":" << r.replicates << ",\"theory_rate\":" << json_number(r.theory_rate)
        << ",\"regime\":" << json_string(r.regime) << ",\"seed\":" << r.seed
        << ",\"elapsed_ms\":" << (r.elapsed_ms ? json_number(*r.elapsed_ms) : "null") << "}\n";
  }
}

std::vector<RiskRecord> read_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty CSV input");
  std::vector<RiskRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    require(f.size() == std::size(kColumns), "CSV row has the wrong number of columns");
    RiskRecord r;
    r.scenario_id = f[0];
    r.n = std::stoll(f[1]);
    r.k = std::stoi(f[2]);
    r.rho = parse_double(f[3]);
    r.method = f[4];
    r.metric = f[5];
    r.mean = parse_double(f[6]);
    r.stderr_value = parse_double(f[7]);
    r.replicates = std::stoll(f[8]);
    r.theory_rate = parse_double(f[9]);
    r.regime = f[10];
    r.seed = std::stoull(f[11]);
    if (!f[12].empty()) r.elapsed_ms = parse_double(f[12]);
    records.push_back(r);
  }
  return records;
}

PlotAxis parse_plot_axis(const std::string& text) {
  if (text == "n") return PlotAxis::kN;
  if (text == "k") return PlotAxis::kK;
  if (text == "rho") return PlotAxis::kRho;
  throw InvalidArgument("plot axis must be n, k or rho");
}

std::string plot_svg(const std::vector<RiskRecord>& records, PlotAxis axis, const std::string& title) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : records) {
    if (!(r.mean > 0.0) || r.skipped) continue;
    std::ostringstream key;
    key << r.metric << " " << r.method;
    double x = 0.0;
    switch (axis) {
      case PlotAxis::kN: x = static_cast<double>(r.n); key << " k=" << r.k << " rho=" << r.rho; break;
      case PlotAxis::kK: x = r.k; key << " n=" << r.n << " rho=" << r.rho; break;
      case PlotAxis::kRho: x = r.rho; key << " n=" << r.n << " k=" << r.k; break;
    }
    if (x > 0.0) series[key.str()].emplace_back(x, r.mean);
  }
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, std::log10(x));
      x1 = std::max(x1, std::log10(x));
      y0 = std::min(y0, std::log10(y));
      y1 = std::max(y1, std::log10(y));
    }
  }
  if (series.empty()) x0 = y0 = 0.0, x1 = y1 = 1.0;
  if (x1 - x0 < 1e-9) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
  const double width = 720, height = 480, left = 80, right = 260, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (std::log10(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (std::log10(y) - y0) / (y1 - y0)) * ph; };
  static const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                         "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1)); ++e) {
    const double x = left + (e - x0) / (x1 - x0) * pw;
    svg << "<line x1=\"" << x << "\" y1=\"" << top + ph << "\" x2=\"" << x << "\" y2=\""
        << top + ph + 5 << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << top + ph + 20
        << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1)); ++e) {
    const double y = top + (1.0 - (e - y0) / (y1 - y0)) * ph;
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\"" << y
        << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  const char* axis_name = axis == PlotAxis::kN ? "n" : axis == PlotAxis::kK ? "k" : "rho";
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
      << axis_name << " (log scale)</text>\n";
  std::size_t index = 0;
  for (const auto& [name, pts] : series) {
    const char* color = kPalette[index % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) svg << px(x) << "," << py(y) << " ";
    svg << "\"/>\n";
    for (const auto& [x, y] : pts) {
      svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 16.0 * static_cast<double>(index);
    svg << "<rect x=\"" << left + pw + 12 << "\" y=\"" << ly << "\" width=\"10\" height=\"10\" fill=\""
        << color << "\"/><text x=\"" << left + pw + 28 << "\" y=\"" << ly + 9 << "\">" << name
        << "</text>\n";
    ++index;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace graphon

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "graphon/constructions.hpp"
#include "graphon/estimators.hpp"
#include "graphon/experiments.hpp"
#include "graphon/io.hpp"
#include "graphon/metrics.hpp"
#include "graphon/model.hpp"
#include "graphon/theory.hpp"

namespace {

using namespace graphon;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string output = "-";
  std::string format = "csv";
  unsigned threads = default_thread_count();
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t require_seed(const Globals& g, const std::string& command) {
  if (!g.seed) throw UsageError(command + " is stochastic and needs --seed");
  return *g.seed;
}

/// Writes to --output, or stdout for "-".
void emit(const Globals& g, const std::string& data) {
  if (g.output == "-") {
    std::cout << data;
    std::cout.flush();
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + g.output + "'");
  out << data;
}

std::unique_ptr<std::istream> open_input(const std::string& path) {
  if (path == "-") {
    auto buffer = std::make_unique<std::stringstream>();
    *buffer << std::cin.rdbuf();
    return buffer;
  }
  auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

/// A table of named columns, printed as CSV or JSON lines.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<bool> numeric;

  std::string render(const std::string& format) const {
    std::ostringstream out;
    if (format == "csv") {
      for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
      out << "\n";
      for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << "\n";
      }
    } else {
      for (const auto& row : rows) {
        out << "{";
        for (std::size_t c = 0; c < row.size(); ++c) {
          out << (c ? "," : "") << "\"" << columns[c] << "\":";
          if (numeric[c]) {
            out << (row[c] == "nan" || row[c].empty() ? "null" : row[c]);
          } else {
            out << "\"" << row[c] << "\"";
          }
        }
        out << "}\n";
      }
    }
    return out.str();
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Sparse graphon models, block least squares and delta^2 bounds"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed for stochastic subcommands");
  app.add_option("--output,-o", g.output, "Output file ('-' for stdout)");
  app.add_option("--format", g.format, "Tabular output format")
      ->check(CLI::IsMember({"csv", "json-lines"}));
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  // sample
  auto* sample = app.add_subcommand("sample", "Sample a network from a graphon");
  std::string graphon_path;
  Index n = 0;
  double rho = 1.0;
  std::string probabilities_out;
  std::string design_out;
  sample->add_option("--graphon", graphon_path, "Graphon specification file")->required();
  sample->add_option("--n", n, "Number of nodes")->required()->check(CLI::Range(Index{2}, Index{1} << 20));
  sample->add_option("--rho", rho, "Sparsity level")->check(CLI::Range(0.0, 1.0));
  sample->add_option("--probabilities", probabilities_out, "Also write the probability matrix here");
  sample->add_option("--design", design_out, "Also write the latent design here");

  // fit
  auto* fit = app.add_subcommand("fit", "Block-constant least-squares fit of an edge list");
  std::string edges_path;
  std::string method_name = "exact";
  int k = 2;
  int n0 = 1;
  std::optional<double> radius;
  int restarts = 20;
  double budget = 1e8;
  std::optional<Index> nodes;
  fit->add_option("--edges", edges_path, "Edge list file ('-' for stdin)")->required();
  fit->add_option("--method", method_name, "Estimator")
      ->check(CLI::IsMember({"exact", "restricted", "local_search"}));
  fit->add_option("--k", k, "Number of classes")->check(CLI::PositiveNumber);
  fit->add_option("--n0", n0, "Minimum class size")->check(CLI::NonNegativeNumber);
  fit->add_option("--r", radius, "Sup-norm radius (restricted / local search)");
  fit->add_option("--restarts", restarts, "Local-search restarts")->check(CLI::PositiveNumber);
  fit->add_option("--budget", budget, "Enumeration budget (partitions)");
  fit->add_option("--nodes", nodes, "Node count (defaults to the edge list header)");

  // risk
  auto* risk = app.add_subcommand("risk", "Normalised Frobenius risk of two probability matrices");
  std::string estimate_path;
  std::string truth_path;
  risk->add_option("--estimate", estimate_path, "Dense matrix file")->required();
  risk->add_option("--truth", truth_path, "Dense matrix file")->required();

  // delta2
  auto* delta = app.add_subcommand("delta2", "Bounds on delta^2 between two step graphons");
  std::string f_path;
  std::string g_path;
  DeltaSearchConfig config;
  delta->add_option("--f", f_path, "First graphon specification")->required();
  delta->add_option("--g", g_path, "Second graphon specification")->required();
  delta->add_option("--max-cells", config.max_cells, "Common grid size limit");
  delta->add_option("--max-plans-upper", config.max_plans_upper, "Upper-bound enumeration budget");
  delta->add_option("--max-plans-lower", config.max_plans_lower, "Lower-bound enumeration budget");

  // rates
  auto* rates = app.add_subcommand("rates", "Rate formulas and sparsity regime");
  std::optional<double> alpha;
  rates->add_option("--n", n, "Number of nodes")->required();
  rates->add_option("--k", k, "Number of classes")->required();
  rates->add_option("--rho", rho, "Sparsity level")->required();
  rates->add_option("--alpha", alpha, "Hoelder exponent for smooth rates");

  // construct
  auto* construct = app.add_subcommand("construct", "Lower-bound constructions");
  std::string kind;
  double epsilon = 0.05;
  std::vector<double> u;
  int max_tries = 20;
  std::int64_t trials = 1000;
  Index target = 8;
  int member = 1;
  construct->add_option("kind", kind, "Construction")
      ->required()
      ->check(CLI::IsMember({"packing", "w_u", "two_point", "subsets", "sign_matrices"}));
  construct->add_option("--k", k, "Size parameter");
  construct->add_option("--epsilon", epsilon, "Perturbation size");
  construct->add_option("--u", u, "Weight perturbation (w_u), comma separated")->delimiter(',');
  construct->add_option("--max-tries", max_tries, "Packing matrix attempts");
  construct->add_option("--trials", trials, "Random submatrix checks for the packing matrix");
  construct->add_option("--target", target, "Family size for sign matrices");
  construct->add_option("--member", member, "Which graphon of the two-point pair (1 or 2)");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo scenario");
  std::string scenario_path;
  experiment->add_option("--scenario", scenario_path, "Scenario file")->required();

  // plot
  auto* plot = app.add_subcommand("plot", "Render experiment CSV as a log-log SVG");
  std::string input_path;
  std::string axis = "n";
  std::string metric_filter;
  std::string title;
  plot->add_option("--input", input_path, "Experiment CSV")->required();
  plot->add_option("--axis", axis, "Horizontal axis")->check(CLI::IsMember({"n", "k", "rho"}));
  plot->add_option("--metric", metric_filter, "Only plot this metric");
  plot->add_option("--title", title, "Plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*sample) {
    const std::uint64_t seed = require_seed(g, "sample");
    const Graphon w = load_graphon_spec(graphon_path);
    const GraphonSample s = sample_graphon_network(w, rho, n, seed);
    std::ostringstream out;
    write_edge_list(out, s.observation);
    emit(g, out.str());
    if (!probabilities_out.empty()) {
      std::ofstream p(probabilities_out);
      write_dense_matrix(p, s.theta.entries());
    }
    if (!design_out.empty()) {
      std::ofstream d(design_out);
      write_dense_matrix(d, *s.observation.latent_design());
    }
  } else if (*fit) {
    const FitMethod method = parse_fit_method(method_name);
    auto in = open_input(edges_path);
    const AdjacencyObservation obs = read_edge_list(*in, nodes);
    const EnumerationOptions enumeration{budget};
    std::optional<BlockFit> result;
    if (method == FitMethod::kExact) {
      result = least_squares_exact(obs, k, n0, enumeration);
    } else if (method == FitMethod::kRestricted) {
      if (!radius) throw UsageError("restricted least squares needs --r");
      result = least_squares_restricted(obs, k, *radius, enumeration);
    } else {
      LocalSearchOptions opts;
      opts.seed = require_seed(g, "fit --method local_search");
      opts.restarts = restarts;
      opts.radius = radius;
      result = least_squares_local(obs, k, n0, opts);
    }
    emit(g, dump_fit(*result));
  } else if (*risk) {
    auto e = open_input(estimate_path);
    auto t = open_input(truth_path);
    const double value = frobenius_risk(ProbabilityMatrix(read_dense_matrix(*e)),
                                        ProbabilityMatrix(read_dense_matrix(*t)));
    Table table{{"risk"}, {{format_double(value)}}, {true}};
    emit(g, table.render(g.format));
  } else if (*delta) {
    const Graphon f = load_graphon_spec(f_path);
    const Graphon h = load_graphon_spec(g_path);
    const auto* fs = std::get_if<StepGraphon>(&f);
    const auto* hs = std::get_if<StepGraphon>(&h);
    if (fs == nullptr || hs == nullptr) throw UsageError("delta2 needs two step graphons");
    config.seed = g.seed.value_or(0);
    emit(g, dump_delta_bounds(delta2_bounds_step(*fs, *hs, config)));
  } else if (*rates) {
    RateInputs in{n, k, rho, alpha, std::nullopt};
    Table table{{"n", "k", "rho", "sbm_rate", "graphon_rate", "regime"}, {}, {true, true, true, true, true, false}};
    std::vector<std::string> row{std::to_string(n), std::to_string(k), format_double(rho),
                                 format_double(sbm_minimax_rate(in)),
                                 format_double(graphon_minimax_rate(in)),
                                 k >= 2 ? to_string(sparsity_regime(in)) : ""};
    if (alpha) {
      const SmoothRates sr = smooth_rates(in);
      table.columns.insert(table.columns.end(), {"alpha", "k_star", "smooth_matrix_rate", "smooth_graphon_rate"});
      table.numeric.insert(table.numeric.end(), {true, true, true, true});
      row.insert(row.end(), {format_double(*alpha), std::to_string(sr.k_star),
                             format_double(sr.matrix_rate), format_double(sr.graphon_rate)});
    }
    table.rows.push_back(row);
    emit(g, table.render(g.format));
  } else if (*construct) {
    std::ostringstream out;
    if (kind == "packing") {
      const PackingMatrix b = make_packing_matrix(k, require_seed(g, "construct packing"), max_tries, trials);
      out << "k: " << b.size() << "\nproperty1_checked: " << (b.property1_checked ? "true" : "false")
          << "\nproperty2_samples: " << b.property2_samples << "\nentries: [";
      for (Index a = 0; a < b.size(); ++a) {
        for (Index c = 0; c < b.size(); ++c) out << (a || c ? ", " : "") << b.entries(a, c);
      }
      out << "]\n";
    } else if (kind == "w_u") {
      if (k != 2) throw UsageError("construct w_u supports k = 2 (use a specification file for larger k)");
      Vector uv = Vector::Zero(2);
      if (!u.empty()) uv = Eigen::Map<const Vector>(u.data(), static_cast<Index>(u.size()));
      out << dump_graphon_spec(build_w_u(k, epsilon, PackingMatrix::two_class(), uv));
    } else if (kind == "two_point") {
      if (member != 1 && member != 2) throw UsageError("--member must be 1 or 2");
      const auto pair = two_point_pair(epsilon);
      out << dump_graphon_spec(member == 1 ? pair.first : pair.second);
    } else if (kind == "subsets") {
      const SubsetPacking p = varshamov_packing_vectors(k, require_seed(g, "construct subsets"));
      out << "k: " << p.k << "\ncandidates: " << p.candidates << "\nsize: " << p.subsets.size()
          << "\nsubsets:\n";
      for (const auto& s : p.subsets) {
        out << "  - [";
        for (std::size_t i = 0; i < s.size(); ++i) out << (i ? ", " : "") << s[i];
        out << "]\n";
      }
    } else {
      const MatrixPacking p = varshamov_packing_matrices(k, require_seed(g, "construct sign_matrices"), target);
      out << "k: " << p.k << "\ncertified: " << (p.certified ? "true" : "false")
          << "\ncandidates: " << p.candidates << "\nsize: " << p.members.size() << "\nmembers:\n";
      for (const auto& m : p.members) {
        out << "  - [";
        for (Index a = 0; a < m.rows(); ++a) {
          for (Index c = 0; c < m.cols(); ++c) out << (a || c ? ", " : "") << m(a, c);
        }
        out << "]\n";
      }
    }
    emit(g, out.str());
  } else if (*experiment) {
    Scenario s = load_scenario(scenario_path);
    if (g.seed) s.seed = *g.seed;
    s.threads = g.threads;
    const auto records = run_experiment(s);
    for (const auto& r : records) {
      if (r.skipped) std::cerr << "skipped cell n=" << r.n << " k=" << r.k << " rho=" << r.rho
                               << " (" << r.metric << "): " << *r.skipped << "\n";
    }
    std::ostringstream out;
    if (g.format == "csv") {
      write_csv(out, records);
    } else {
      write_json_lines(out, records);
    }
    emit(g, out.str());
  } else if (*plot) {
    auto in = open_input(input_path);
    auto records = read_csv(*in);
    if (!metric_filter.empty()) {
      std::erase_if(records, [&](const RiskRecord& r) { return r.metric != metric_filter; });
    }
    emit(g, plot_svg(records, parse_plot_axis(axis), title));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const graphon::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

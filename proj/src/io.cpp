#include "graphon/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "graphon/constructions.hpp"

namespace graphon {

namespace {

void check_keys(const YAML::Node& node, std::initializer_list<const char*> allowed,
                const std::string& where) {
  require(node.IsMap(), where + " must be a mapping");
  for (const auto& item : node) {
    const auto key = item.first.as<std::string>();
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    require(known, "unknown key '" + key + "' in " + where);
  }
}

YAML::Node field(const YAML::Node& node, const char* key, const std::string& where) {
  const YAML::Node v = node[key];
  require(v.IsDefined() && !v.IsNull(), where + " is missing '" + key + "'");
  return v;
}

template <typename T>
T get(const YAML::Node& node, const char* key, const std::string& where) {
  try {
    return field(node, key, where).as<T>();
  } catch (const YAML::Exception&) {
    throw InvalidArgument("'" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

template <typename T>
T get_or(const YAML::Node& node, const char* key, T fallback, const std::string& where) {
  if (!node[key].IsDefined() || node[key].IsNull()) return fallback;
  return get<T>(node, key, where);
}

template <typename T>
std::vector<T> list(const YAML::Node& node, const char* key, const std::string& where) {
  const YAML::Node v = field(node, key, where);
  if (v.IsScalar()) return {get<T>(node, key, where)};
  return get<std::vector<T>>(node, key, where);
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

Matrix square_from_row_major(const std::vector<double>& v, const std::string& what) {
  const auto k = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  require(k * k == static_cast<Index>(v.size()), what + " must hold k*k row-major entries");
  Matrix m(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) m(a, b) = v[static_cast<std::size_t>(a * k + b)];
  }
  return m;
}

std::string flow_list(const Vector& v) {
  std::string out = "[";
  for (Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out + "]";
}

std::string flow_list(const Matrix& m) {
  std::string out = "[";
  for (Index a = 0; a < m.rows(); ++a) {
    for (Index b = 0; b < m.cols(); ++b) {
      out += (a || b ? ", " : "") + format_double(m(a, b));
    }
  }
  return out + "]";
}

Graphon graphon_from_node(const YAML::Node& node) {
  const std::string where = "graphon specification";
  require(node.IsMap(), where + " must be a mapping");
  const auto kind = get<std::string>(node, "kind", where);
  if (kind == "step") {
    const auto family = get_or<std::string>(node, "family", "explicit", where);
    if (family == "explicit") {
      check_keys(node, {"kind", "family", "weights", "values"}, where);
      return StepGraphon(to_vector(list<double>(node, "weights", where)),
                         square_from_row_major(list<double>(node, "values", where), "values"));
    }
    if (family == "w_u") {
      check_keys(node, {"kind", "family", "k", "epsilon", "u", "signs"}, where);
      const auto k = get<Index>(node, "k", where);
      PackingMatrix b;
      if (node["signs"].IsDefined()) {
        b.entries = square_from_row_major(list<double>(node, "signs", where), "signs");
      } else {
        require(k == 2, "w_u needs 'signs' unless k = 2");
        b = PackingMatrix::two_class();
      }
      return build_w_u(k, get<double>(node, "epsilon", where), b,
                       to_vector(list<double>(node, "u", where)));
    }
    if (family == "two_point") {
      check_keys(node, {"kind", "family", "epsilon", "member"}, where);
      const auto pair = two_point_pair(get<double>(node, "epsilon", where));
      const int member = get_or<int>(node, "member", 1, where);
      require(member == 1 || member == 2, "two_point member must be 1 or 2");
      return member == 1 ? pair.first : pair.second;
    }
    throw InvalidArgument("unknown step family '" + family + "'");
  }
  if (kind == "smooth") {
    check_keys(node, {"kind", "family", "p", "terms"}, where);
    const auto family = get<std::string>(node, "family", where);
    if (family == "constant") return SmoothGraphon::constant(get<double>(node, "p", where));
    if (family == "product") return SmoothGraphon::product();
    if (family == "min") return SmoothGraphon::minimum();
    if (family == "weierstrass_half") {
      return SmoothGraphon::weierstrass_half(get_or<int>(node, "terms", 12, where));
    }
    throw InvalidArgument("unknown smooth family '" + family + "'");
  }
  throw InvalidArgument("graphon kind must be step or smooth, got '" + kind + "'");
}

YAML::Node parse_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw InvalidArgument(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Graphon parse_graphon_spec(const std::string& text) { return graphon_from_node(parse_yaml(text)); }

Graphon load_graphon_spec(const std::string& path) { return parse_graphon_spec(read_file(path)); }

std::string dump_graphon_spec(const Graphon& w) {
  std::ostringstream out;
  if (const auto* step = std::get_if<StepGraphon>(&w)) {
    out << "kind: step\n"
        << "weights: " << flow_list(step->weights()) << "\n"
        << "values: " << flow_list(step->values()) << "\n";
    return out.str();
  }
  const auto& smooth = std::get<SmoothGraphon>(w);
  out << "kind: smooth\nfamily: " << smooth.name() << "\n";
  if (smooth.name() == "constant") out << "p: " << format_double(smooth(0.0, 0.0)) << "\n";
  return out.str();
}

void write_edge_list(std::ostream& out, const AdjacencyObservation& a) {
  out << "# n " << a.size() << "\n";
  for (const auto& [i, j] : a.edge_list()) out << i << " " << j << "\n";
}

AdjacencyObservation read_edge_list(std::istream& in, std::optional<Index> n) {
  std::vector<std::pair<Index, Index>> edges;
  std::optional<Index> header;
  Index largest = -1;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    if (first[0] == '#') {
      std::string count;
      if (first == "#" && ss >> count && count == "n") {
        Index v = 0;
        if (ss >> v) header = v;
      }
      continue;
    }
    Index i = 0;
    Index j = 0;
    std::istringstream pair(line);
    std::string rest;
    require(static_cast<bool>(pair >> i >> j) && !(pair >> rest),
            "edge list line " + std::to_string(line_no) + " is not an 'i j' pair");
    require(i > j && j >= 0, "edge list line " + std::to_string(line_no) + " needs i > j >= 0");
    largest = std::max(largest, i);
    edges.emplace_back(i, j);
  }
  const Index size = n ? *n : header ? *header : largest + 1;
  require(largest < size, "edge list mentions node " + std::to_string(largest) +
                              " but n = " + std::to_string(size));
  return AdjacencyObservation::from_edge_list(size, edges);
}

Matrix read_dense_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> row;
    std::string token;
    while (ss >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(used == token.size(), "matrix entry '" + token + "' is not a number");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const auto r = static_cast<Index>(rows.size());
  const auto c = r ? static_cast<Index>(rows[0].size()) : 0;
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    require(static_cast<Index>(rows[static_cast<std::size_t>(i)].size()) == c,
            "matrix rows have different lengths");
    for (Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

void write_dense_matrix(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_double(m(i, j));
    out << "\n";
  }
}

std::string dump_fit(const BlockFit& fit) {
  std::ostringstream out;
  out << "n: " << fit.partition.size() << "\n"
      << "k: " << fit.partition.classes() << "\n"
      << "n0: " << fit.partition.min_class_size() << "\n";
  if (fit.radius) out << "r: " << format_double(*fit.radius) << "\n";
  out << "method: " << to_string(fit.method) << "\n"
      << "objective: " << format_double(fit.objective) << "\n"
      << "assignment: [";
  for (Index i = 0; i < fit.partition.size(); ++i) out << (i ? ", " : "") << fit.partition[i];
  out << "]\n"
      << "block_values: " << flow_list(fit.block_values) << "\n";
  return out.str();
}

std::string dump_delta_bounds(const DeltaBounds& b) {
  std::ostringstream out;
  out << "lower: " << format_double(b.lower) << "\n"
      << "upper: " << format_double(b.upper) << "\n"
      << "lower_certified: " << (b.lower_certified ? "true" : "false") << "\n"
      << "upper_exhaustive: " << (b.upper_exhaustive ? "true" : "false") << "\n"
      << "grid_exact: " << (b.grid_exact ? "true" : "false") << "\n"
      << "cells: " << b.cells << "\n"
      << "snapping_bound: " << format_double(b.snapping_bound) << "\n"
      << "notes: \"" << b.notes << "\"\n";
  if (b.upper_witness) {
    const Coupling& w = *b.upper_witness;
    out << "witness:\n"
        << "  rows: " << w.omega().rows() << "\n"
        << "  cols: " << w.omega().cols() << "\n"
        << "  omega: " << flow_list(w.omega()) << "\n"
        << "  row_marginals: " << flow_list(w.row_marginals()) << "\n"
        << "  col_marginals: " << flow_list(w.col_marginals()) << "\n";
  }
  return out.str();
}

Scenario parse_scenario(const std::string& text) {
  const YAML::Node root = parse_yaml(text);
  const std::string where = "scenario";
  check_keys(root, {"id", "experiment", "graphon", "rho", "n", "replicates", "seed", "metrics",
                    "timing", "estimator"},
             where);
  Scenario s;
  s.id = get_or<std::string>(root, "id", s.id, where);
  s.kind = parse_experiment_kind(get_or<std::string>(root, "experiment", "risk", where));
  s.graphon = graphon_from_node(field(root, "graphon", where));
  s.rho = list<double>(root, "rho", where);
  s.n = list<Index>(root, "n", where);
  s.replicates = get_or<int>(root, "replicates", s.replicates, where);
  s.seed = get<std::uint64_t>(root, "seed", where);
  if (root["metrics"].IsDefined()) {
    s.metrics.clear();
    for (const auto& m : list<std::string>(root, "metrics", where)) s.metrics.push_back(parse_metric(m));
  }
  s.timing = get_or<bool>(root, "timing", false, where);
  if (const YAML::Node e = root["estimator"]; e.IsDefined()) {
    const std::string ew = "estimator";
    check_keys(e, {"method", "k", "n0", "radius_mode", "radius", "restarts", "budget",
                   "fallback_to_local"},
               ew);
    EstimatorSpec& spec = s.estimator;
    spec.method = parse_fit_method(get_or<std::string>(e, "method", to_string(spec.method), ew));
    if (e["k"].IsDefined()) spec.k = list<int>(e, "k", ew);
    spec.n0 = get_or<int>(e, "n0", spec.n0, ew);
    spec.radius_mode = parse_radius_mode(get_or<std::string>(e, "radius_mode", to_string(spec.radius_mode), ew));
    spec.radius = get_or<double>(e, "radius", spec.radius, ew);
    spec.restarts = get_or<int>(e, "restarts", spec.restarts, ew);
    spec.budget = get_or<double>(e, "budget", spec.budget, ew);
    spec.fallback_to_local = get_or<bool>(e, "fallback_to_local", spec.fallback_to_local, ew);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

}  // namespace graphon

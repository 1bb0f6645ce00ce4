#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "graphon/estimators.hpp"
#include "graphon/experiments.hpp"
#include "graphon/metrics.hpp"
#include "graphon/model.hpp"

namespace graphon {

/// Graphon specification document, e.g.
///
///   kind: step
///   weights: [0.5, 0.5]
///   values: [0.8, 0.2, 0.2, 0.8]      # row-major
///
///   kind: smooth
///   family: product                   # constant (p), product, min, weierstrass_half (terms)
///
///   kind: step
///   family: w_u                       # k, epsilon, u, optional signs (row-major)
///
///   kind: step
///   family: two_point                 # epsilon, member (1 or 2)
Graphon parse_graphon_spec(const std::string& text);
Graphon load_graphon_spec(const std::string& path);
std::string dump_graphon_spec(const Graphon& w);

/// Edge list: one "i j" pair per line, 0-indexed, i > j. An optional
/// "# n <count>" line records the node count; other '#' lines are ignored.
void write_edge_list(std::ostream& out, const AdjacencyObservation& a);
/// `n` overrides the node count; otherwise the header or the largest index
/// plus one is used.
AdjacencyObservation read_edge_list(std::istream& in, std::optional<Index> n = std::nullopt);

/// Whitespace-separated rows, one matrix row per line; '#' lines ignored.
Matrix read_dense_matrix(std::istream& in);
void write_dense_matrix(std::ostream& out, const Matrix& m);

std::string dump_fit(const BlockFit& fit);
std::string dump_delta_bounds(const DeltaBounds& bounds);

/// Scenario document with top-level keys id, experiment, graphon (a nested
/// graphon specification), rho, n, replicates, seed, metrics, timing and an
/// estimator table (method, k, n0, radius_mode, radius, restarts, budget,
/// fallback_to_local).
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace graphon

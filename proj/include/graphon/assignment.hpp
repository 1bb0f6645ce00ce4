#pragma once

#include <vector>

#include "graphon/common.hpp"

namespace graphon {

struct Assignment {
  /// column[i] is the column matched to row i.
  std::vector<Index> column;
  double cost;
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
/// O(m^3) with potentials).
Assignment solve_assignment(const Matrix& cost);

}  // namespace graphon

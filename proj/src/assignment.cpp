#include "graphon/assignment.hpp"

#include <limits>

namespace graphon {

Assignment solve_assignment(const Matrix& cost) {
  require(cost.rows() == cost.cols(), "assignment cost matrix must be square");
  const Index m = cost.rows();
  if (m == 0) return {{}, 0.0};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; p[j] is the row matched to column j.
  std::vector<double> u(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<Index> p(static_cast<std::size_t>(m) + 1, 0);
  std::vector<Index> way(static_cast<std::size_t>(m) + 1, 0);
  for (Index i = 1; i <= m; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = p[static_cast<std::size_t>(j0)];
      double delta = kInf;
      Index j1 = 0;
      for (Index j = 1; j <= m; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (used[ju]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[ju];
        if (cur < minv[ju]) {
          minv[ju] = cur;
          way[ju] = j0;
        }
        if (minv[ju] < delta) {
          delta = minv[ju];
          j1 = j;
        }
      }
      for (Index j = 0; j <= m; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (used[ju]) {
          u[static_cast<std::size_t>(p[ju])] += delta;
          v[ju] -= delta;
        } else {
          minv[ju] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  Assignment out{std::vector<Index>(static_cast<std::size_t>(m)), 0.0};
  for (Index j = 1; j <= m; ++j) {
    const Index row = p[static_cast<std::size_t>(j)] - 1;
    out.column[static_cast<std::size_t>(row)] = j - 1;
  }
  for (Index i = 0; i < m; ++i) out.cost += cost(i, out.column[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace graphon

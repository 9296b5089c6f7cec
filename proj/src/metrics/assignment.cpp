#include <algorithm>
#include <cmath>
#include <limits>

#include "pagesplit/errors.hpp"
#include "pagesplit/metrics.hpp"

namespace pagesplit {

// Shortest augmenting paths with dual potentials (the Jonker-Volgenant
// augmentation phase without its initialization heuristics). Rows are added
// one at a time; each addition runs a Dijkstra over reduced costs.
AssignmentResult solve_assignment(const std::vector<std::vector<double>>& cost) {
  if (cost.empty() || cost.front().empty()) throw EvaluationError("empty cost matrix");
  const std::size_t rows = cost.size();
  const std::size_t cols = cost.front().size();
  for (const auto& row : cost) {
    if (row.size() != cols) throw EvaluationError("ragged cost matrix");
    for (const double c : row) {
      if (!std::isfinite(c) || c < 0) throw EvaluationError("costs must be finite and >= 0");
    }
  }

  const bool flip = rows > cols;
  const std::size_t n = flip ? cols : rows;  // n <= m
  const std::size_t m = flip ? rows : cols;
  const auto at = [&](std::size_t i, std::size_t j) { return flip ? cost[j][i] : cost[i][j]; };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based; column 0 is the virtual source, owner[j] = row matched to j.
  std::vector<double> u(n + 1, 0), v(m + 1, 0);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double reduced = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  AssignmentResult out;
  std::vector<char> row_used(rows, 0), col_used(cols, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] == 0) continue;
    const std::size_t r = flip ? j - 1 : owner[j] - 1;
    const std::size_t c = flip ? owner[j] - 1 : j - 1;
    out.pairs.emplace_back(r, c);
    row_used[r] = 1;
    col_used[c] = 1;
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  for (const auto& [r, c] : out.pairs) out.total_cost += cost[r][c];
  for (std::size_t r = 0; r < rows; ++r) {
    if (!row_used[r]) out.unmatched_rows.push_back(r);
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!col_used[c]) out.unmatched_cols.push_back(c);
  }
  return out;
}

}  // namespace pagesplit

#include "mec/hungarian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mec {

std::vector<std::size_t> hungarian_min_cost(const std::vector<double>& cost, std::size_t rows,
                                            std::size_t cols) {
  if (rows > cols) throw std::invalid_argument("hungarian_min_cost: more rows than columns");
  if (cost.size() != rows * cols) throw std::invalid_argument("hungarian_min_cost: bad matrix size");
  for (double c : cost)
    if (!std::isfinite(c)) throw std::invalid_argument("hungarian_min_cost: non-finite cost");
  if (rows == 0) return {};

  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual source.
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> match(cols + 1, 0), way(cols + 1, 0);
  auto c = [&](std::size_t i, std::size_t j) { return cost[(i - 1) * cols + (j - 1)]; };

  for (std::size_t i = 1; i <= rows; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = c(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> column(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j)
    if (match[j] != 0) column[match[j] - 1] = j - 1;
  return column;
}

}  // namespace mec

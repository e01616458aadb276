#pragma once

#include <cstddef>
#include <vector>

namespace mec {

/// Minimum-cost assignment of every row to a distinct column (rows <= cols),
/// Kuhn-Munkres with potentials, O(rows^2 * cols). `cost` is row-major
/// rows x cols and must be finite. Returns the chosen column of each row.
std::vector<std::size_t> hungarian_min_cost(const std::vector<double>& cost, std::size_t rows,
                                            std::size_t cols);

}  // namespace mec

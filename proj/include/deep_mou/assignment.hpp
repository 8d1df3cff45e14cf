#pragma once

#include <cstddef>
#include <vector>

#include "deep_mou/matrix.hpp"

namespace deepmou {

// Minimum-cost assignment of rows to distinct columns (Hungarian method,
// O(n^2 m)). Requires rows <= cols. Returns the column chosen for each row.
std::vector<std::size_t> solve_assignment(const Matrix& cost);

// Same, maximizing the total score.
std::vector<std::size_t> solve_assignment_max(const Matrix& score);

}  // namespace deepmou

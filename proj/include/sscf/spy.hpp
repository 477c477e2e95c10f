#pragma once

#include <string>
#include <vector>

#include "sscf/matrix_function.hpp"

namespace sscf {

/// Nonzero pattern of a matrix function: an entry is marked when its sup
/// over the grid exceeds the threshold.
std::vector<std::vector<bool>> nonzero_pattern(const MatrixFunction& M,
                                               double threshold = defaults::check_tol,
                                               int grid = 33);

int pattern_count(const std::vector<std::vector<bool>>& pattern);

/// Panels for N, N^2, ..., N^powers.
std::vector<std::vector<std::vector<bool>>> spy_powers(const MatrixFunction& N,
                                                       int powers,
                                                       double threshold = defaults::check_tol);

/// Deterministic text rendering, one panel per power.
std::string render_ascii(const std::vector<std::vector<std::vector<bool>>>& panels);

/// Deterministic (byte-for-byte) SVG with the panels side by side.
std::string render_svg(const std::vector<std::vector<std::vector<bool>>>& panels);

}  // namespace sscf

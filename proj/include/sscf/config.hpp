#pragma once

namespace sscf::defaults {

inline constexpr double fit_tol = 1e-12;
inline constexpr double check_tol = 1e-9;
inline constexpr double rank_gap_tol = 1e-6;
inline constexpr double singularity_threshold = 1e-8;
inline constexpr int degree_cap = 512;
inline constexpr int verify_grid = 65;
inline constexpr int certificate_grid = 65;

}  // namespace sscf::defaults

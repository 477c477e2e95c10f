#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace sscf {

/// Matrix infinity norm (max absolute row sum).
inline double inf_norm(const Eigen::MatrixXd& m) {
  return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Largest absolute entry.
inline double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// FNV-1a 64-bit hash over raw bytes, as lowercase hex.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace sscf

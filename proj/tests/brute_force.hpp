#pragma once

// Reference implementations that do not go through the library's graph or
// basis code. Used as oracles by the unit and acceptance tests.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "blockade/lattice.hpp"

namespace testing_oracle {

/// Independent-set test straight from the lattice distance.
inline bool independent(const blockade::LatticeSpec& s, std::uint64_t m) {
  const int n = s.num_sites();
  for (int j = 0; j < n; ++j) {
    if (!((m >> j) & 1u)) continue;
    for (int k = j + 1; k < n; ++k) {
      if (((m >> k) & 1u) && s.distance(j, k) <= s.blockade_range) return false;
    }
  }
  return true;
}

/// Nearest-neighbour chain count by bit tricks: no two adjacent set bits
/// (and not both ends when periodic).
inline std::size_t chain_count(int n, bool periodic) {
  std::size_t count = 0;
  const std::uint64_t top = std::uint64_t{1} << (n - 1);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    if (m & (m >> 1)) continue;
    if (periodic && (m & 1u) && (m & top)) continue;
    ++count;
  }
  return count;
}

/// Independent sets of the open rows x cols square grid, 4-neighbourhood.
inline std::size_t grid_count(int rows, int cols) {
  const int n = rows * cols;
  std::uint64_t not_last_col = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) not_last_col |= std::uint64_t{1} << (r * cols + c);
  }
  std::size_t count = 0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    if ((m & not_last_col) & (m >> 1)) continue;
    if (m & (m >> cols)) continue;
    ++count;
  }
  return count;
}

/// Two-site reduced state by explicit partial trace of |psi><psi| over a
/// full 2^N amplitude vector. Basis order gg, ge, eg, ee with j first.
inline Eigen::Matrix4cd partial_trace(const Eigen::VectorXcd& full, int n, int j, int k) {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t a = 0; a < dim; ++a) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      // Environment bits must agree.
      const std::uint64_t env = ~((std::uint64_t{1} << j) | (std::uint64_t{1} << k));
      if ((a & env) != (b & env)) continue;
      const int ra = 2 * static_cast<int>((a >> j) & 1u) + static_cast<int>((a >> k) & 1u);
      const int rb = 2 * static_cast<int>((b >> j) & 1u) + static_cast<int>((b >> k) & 1u);
      rho(ra, rb) += full(static_cast<Eigen::Index>(a)) * std::conj(full(static_cast<Eigen::Index>(b)));
    }
  }
  return rho;
}

}  // namespace testing_oracle

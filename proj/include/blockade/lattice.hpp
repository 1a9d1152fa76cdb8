#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockade {

enum class LatticeKind { chain, grid };
enum class Boundary { open, periodic };

/// Distance used to decide which grid sites block each other.
/// Chains always use the index difference.
enum class GridMetric { manhattan, chebyshev };

/// Geometry of the pseudoatom lattice. Sites are abstract integer
/// coordinates; a grid site (r, c) has index r * cols + c.
struct LatticeSpec {
  LatticeKind kind = LatticeKind::chain;
  int rows = 1;
  int cols = 2;
  Boundary boundary = Boundary::periodic;
  int blockade_range = 1;
  GridMetric metric = GridMetric::manhattan;

  static LatticeSpec chain(int n, Boundary boundary, int range = 1) {
    LatticeSpec s;
    s.kind = LatticeKind::chain;
    s.rows = 1;
    s.cols = n;
    s.boundary = boundary;
    s.blockade_range = range;
    return s;
  }

  static LatticeSpec grid(int rows, int cols, int range = 1,
                          GridMetric metric = GridMetric::manhattan) {
    LatticeSpec s;
    s.kind = LatticeKind::grid;
    s.rows = rows;
    s.cols = cols;
    s.boundary = Boundary::open;
    s.blockade_range = range;
    s.metric = metric;
    return s;
  }

  int num_sites() const { return rows * cols; }

  void validate() const {
    if (rows < 1 || cols < 1) {
      throw std::invalid_argument("lattice dimensions must be positive");
    }
    const int n = num_sites();
    if (n < 2) {
      throw std::invalid_argument("lattice needs at least 2 sites, got " +
                                  std::to_string(n));
    }
    if (n > 64) {
      throw std::invalid_argument("lattice has " + std::to_string(n) +
                                  " sites; at most 64 are supported");
    }
    if (kind == LatticeKind::chain && rows != 1) {
      throw std::invalid_argument("chain lattices have a single row");
    }
    if (kind == LatticeKind::grid && boundary != Boundary::open) {
      throw std::invalid_argument("grid lattices support open boundary only");
    }
    if (blockade_range < 1) {
      throw std::invalid_argument("blockade range must be at least 1");
    }
    if (blockade_range >= n) {
      throw std::invalid_argument(
          "blockade range " + std::to_string(blockade_range) +
          " >= site count " + std::to_string(n) +
          ": every pair is blocked and the dynamics freezes after one "
          "excitation");
    }
  }

  /// Graph distance between two sites: index difference on chains (minimal
  /// image when periodic), Manhattan or Chebyshev distance on grids.
  int distance(int j, int k) const {
    if (kind == LatticeKind::chain) {
      int d = std::abs(j - k);
      if (boundary == Boundary::periodic) d = std::min(d, cols - d);
      return d;
    }
    const int dr = std::abs(j / cols - k / cols);
    const int dc = std::abs(j % cols - k % cols);
    return metric == GridMetric::manhattan ? dr + dc : std::max(dr, dc);
  }
};

/// Symmetric adjacency of the blockade constraint. `masks[k]` carries the
/// same information as `blocked[k]` as a bitmask over sites.
struct BlockadeGraph {
  std::vector<std::vector<int>> blocked;
  std::vector<std::uint64_t> masks;

  int num_sites() const { return static_cast<int>(blocked.size()); }
};

inline BlockadeGraph build_blockade_graph(const LatticeSpec& spec) {
  spec.validate();
  const int n = spec.num_sites();
  BlockadeGraph g;
  g.blocked.resize(n);
  g.masks.assign(n, 0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      if (spec.distance(j, k) <= spec.blockade_range) {
        g.blocked[j].push_back(k);
        g.masks[j] |= std::uint64_t{1} << k;
      }
    }
  }
  return g;
}

// Physical-parameter helpers. They map Rydberg-gas quantities onto the
// dimensionless model and are never consulted by the dynamics.

struct PhysicalParams {
  double C6 = 1.0;
  double Omega = 1.0;
  double density = 1.0;
  double transverse_area = 1.0;
  int Nw = 3;
  double eta = 6.0;
};

/// R_b such that C6 / R_b^6 = Omega.
inline double blockade_radius(double C6, double Omega) {
  if (!(C6 > 0.0) || !(Omega > 0.0)) {
    throw std::invalid_argument("blockade_radius: C6 and Omega must be positive");
  }
  return std::pow(C6 / Omega, 1.0 / 6.0);
}

/// lambda = N_r / Nw with N_r = 2 n R_b A atoms per superatom.
inline double mean_atoms_per_pseudoatom(double density, double Rb, double area,
                                        int Nw) {
  if (!(density > 0.0) || !(Rb > 0.0) || !(area > 0.0) || Nw < 1) {
    throw std::invalid_argument(
        "mean_atoms_per_pseudoatom: all arguments must be positive");
  }
  return 2.0 * density * Rb * area / Nw;
}

/// Largest k with V(k spacings) / Omega > eta when the pseudoatom spacing is
/// 2 R_b / Nw, i.e. the largest integer k < (Nw / 2) eta^(-1/6).
inline int max_blocked_neighbors(int Nw, double eta = 6.0) {
  if (Nw < 2) throw std::invalid_argument("max_blocked_neighbors: Nw >= 2");
  if (!(eta > 0.0)) throw std::invalid_argument("max_blocked_neighbors: eta > 0");
  const double bound = 0.5 * Nw * std::pow(eta, -1.0 / 6.0);
  return std::max(0, static_cast<int>(std::ceil(bound)) - 1);
}

/// Nearest-neighbour van der Waals shift in units of Omega for spacing
/// 2 R_b / Nw; the natural scale for the long-range interaction strength.
inline double nearest_neighbor_interaction(int Nw) {
  if (Nw < 1) throw std::invalid_argument("nearest_neighbor_interaction: Nw >= 1");
  return std::pow(0.5 * Nw, 6);
}

}  // namespace blockade

#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "blockade/lattice.hpp"

namespace blockade {

using Mask = std::uint64_t;

constexpr Mask site_bit(int k) { return Mask{1} << k; }

/// Occupation bitmask; bit k set means site k is excited.
struct BasisState {
  Mask bits = 0;

  bool excited(int k) const { return (bits >> k) & 1u; }
  int excitations() const { return std::popcount(bits); }

  /// Binary string with site 0 first.
  std::string to_string(int n_sites) const {
    std::string s(static_cast<std::size_t>(n_sites), '0');
    for (int k = 0; k < n_sites; ++k) {
      if (excited(k)) s[static_cast<std::size_t>(k)] = '1';
    }
    return s;
  }

  friend bool operator==(BasisState, BasisState) = default;
};

inline bool admissible(Mask state, const BlockadeGraph& graph) {
  for (int k = 0; k < graph.num_sites(); ++k) {
    if (((state >> k) & 1u) && (state & graph.masks[k])) return false;
  }
  return true;
}

inline constexpr std::size_t default_basis_cap = std::size_t{1} << 24;

/// Ordered set of occupation bitmasks spanning a Hilbert space. States are
/// kept in ascending bitmask order; index lookup is a binary search except
/// for the full 2^N basis where the mask is its own index.
class Basis {
 public:
  Basis(int n_sites, std::vector<Mask> states)
      : n_sites_(n_sites), states_(std::move(states)) {
    if (!std::is_sorted(states_.begin(), states_.end()) ||
        std::adjacent_find(states_.begin(), states_.end()) != states_.end()) {
      throw std::invalid_argument("basis states must be strictly ascending");
    }
    full_ = n_sites_ < 64 && states_.size() == (std::size_t{1} << n_sites_);
  }

  int num_sites() const { return n_sites_; }
  std::size_t size() const { return states_.size(); }
  bool is_full() const { return full_; }
  std::span<const Mask> states() const { return states_; }
  Mask operator[](std::size_t p) const { return states_[p]; }
  BasisState state(std::size_t p) const { return {states_[p]}; }

  std::optional<std::size_t> index_of(Mask m) const {
    if (full_) {
      if (m < states_.size()) return static_cast<std::size_t>(m);
      return std::nullopt;
    }
    auto it = std::lower_bound(states_.begin(), states_.end(), m);
    if (it == states_.end() || *it != m) return std::nullopt;
    return static_cast<std::size_t>(it - states_.begin());
  }

 private:
  int n_sites_;
  std::vector<Mask> states_;
  bool full_ = false;
};

/// Independent sets of the blockade graph in ascending bitmask order.
inline Basis enumerate_restricted(const BlockadeGraph& graph,
                                  std::size_t cap = default_basis_cap) {
  const int n = graph.num_sites();
  std::vector<Mask> states;
  // Decide sites in increasing order; a site may be excited only if none of
  // its already-decided partners is.
  std::vector<Mask> stack{0};
  std::vector<int> depth{0};
  while (!stack.empty()) {
    const Mask m = stack.back();
    const int k = depth.back();
    stack.pop_back();
    depth.pop_back();
    if (k == n) {
      if (states.size() >= cap) {
        throw std::length_error("restricted basis exceeds cap of " +
                                std::to_string(cap) + " states");
      }
      states.push_back(m);
      continue;
    }
    stack.push_back(m);
    depth.push_back(k + 1);
    if ((m & graph.masks[k]) == 0) {
      stack.push_back(m | site_bit(k));
      depth.push_back(k + 1);
    }
  }
  std::sort(states.begin(), states.end());
  return Basis(n, std::move(states));
}

inline Basis enumerate_full(int n_sites, std::size_t cap = default_basis_cap) {
  if (n_sites < 1 || n_sites > 40 || (std::size_t{1} << n_sites) > cap) {
    throw std::length_error("full basis for " + std::to_string(n_sites) +
                            " sites exceeds cap of " + std::to_string(cap) +
                            " states");
  }
  std::vector<Mask> states(std::size_t{1} << n_sites);
  for (std::size_t p = 0; p < states.size(); ++p) states[p] = p;
  return Basis(n_sites, std::move(states));
}

inline int max_excitations(const Basis& basis) {
  int best = 0;
  for (Mask m : basis.states()) best = std::max(best, std::popcount(m));
  return best;
}

}  // namespace blockade

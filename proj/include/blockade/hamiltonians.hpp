#pragma once

#include <Eigen/Dense>

#include <complex>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "blockade/basis.hpp"
#include "blockade/lattice.hpp"

namespace blockade {

using Complex = std::complex<double>;

/// For every basis state p and site k, the index of the state with bit k
/// flipped, or -1 when that state is not in the basis.
class SiteFlips {
 public:
  explicit SiteFlips(const Basis& basis)
      : n_sites_(basis.num_sites()),
        table_(basis.size() * static_cast<std::size_t>(basis.num_sites()), -1) {
    for (std::size_t p = 0; p < basis.size(); ++p) {
      for (int k = 0; k < n_sites_; ++k) {
        if (auto q = basis.index_of(basis[p] ^ site_bit(k))) {
          table_[p * n_sites_ + k] = static_cast<std::int32_t>(*q);
        }
      }
    }
  }

  std::int32_t operator()(std::size_t p, int k) const {
    return table_[p * static_cast<std::size_t>(n_sites_) + k];
  }
  int num_sites() const { return n_sites_; }

  /// State with both bits j and k flipped, or -1. Goes through the
  /// intermediate that removes an excitation first, which is admissible
  /// whenever both endpoints are.
  std::int32_t both(std::size_t p, Mask state, int j, int k) const {
    const int first = ((state >> j) & 1u) || !((state >> k) & 1u) ? j : k;
    const int second = first == j ? k : j;
    const std::int32_t mid = (*this)(p, first);
    if (mid < 0) return -1;
    return (*this)(static_cast<std::size_t>(mid), second);
  }

 private:
  int n_sites_;
  std::vector<std::int32_t> table_;
};

namespace detail {

inline void check_couplings(const std::vector<double>& couplings, int n_sites) {
  if (couplings.size() != static_cast<std::size_t>(n_sites)) {
    throw std::invalid_argument("expected " + std::to_string(n_sites) +
                                " couplings, got " +
                                std::to_string(couplings.size()));
  }
}

inline void check_dims(std::size_t dim, std::size_t in, std::size_t out) {
  if (in != dim || out != dim) {
    throw std::invalid_argument("state vector dimension does not match basis (" +
                                std::to_string(dim) + ")");
  }
}

}  // namespace detail

/// H = sum_k J_k P_k sigma_x^k P_k, where P_k projects every blocked partner
/// of k onto the ground state. Acts on the restricted basis. The referenced
/// basis, graph and flip table must outlive the Hamiltonian.
class BlockadeHamiltonian {
 public:
  BlockadeHamiltonian(const Basis& basis, const BlockadeGraph& graph,
                      const SiteFlips& flips, std::vector<double> couplings)
      : basis_(&basis), graph_(&graph), flips_(&flips),
        couplings_(std::move(couplings)) {
    detail::check_couplings(couplings_, basis.num_sites());
    if (graph.num_sites() != basis.num_sites() ||
        flips.num_sites() != basis.num_sites()) {
      throw std::invalid_argument("basis, graph and flip table disagree on site count");
    }
  }

  std::size_t dimension() const { return basis_->size(); }
  const Basis& basis() const { return *basis_; }
  const std::vector<double>& couplings() const { return couplings_; }

  /// Calls f(q, H[p][q]) for each nonzero entry of row p.
  template <class F>
  void visit_row(std::size_t p, F&& f) const {
    const Mask s = (*basis_)[p];
    const int n = basis_->num_sites();
    for (int k = 0; k < n; ++k) {
      if (couplings_[k] == 0.0 || (s & graph_->masks[k])) continue;
      const std::int32_t q = (*flips_)(p, k);
      if (q >= 0) f(static_cast<std::size_t>(q), couplings_[k]);
    }
  }

  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    detail::check_dims(dimension(), in.size(), out.size());
    for (std::size_t p = 0; p < in.size(); ++p) {
      Complex acc = 0.0;
      visit_row(p, [&](std::size_t q, double h) { acc += h * in[q]; });
      out[p] = acc;
    }
  }

 private:
  const Basis* basis_;
  const BlockadeGraph* graph_;
  const SiteFlips* flips_;
  std::vector<double> couplings_;
};

/// The blockade operator sum_k J_k P_k sigma_x^k P_k written on the full
/// 2^N space, including the inadmissible states. Used to check that the
/// restricted subspace is closed under the dynamics.
class ProjectedFullHamiltonian {
 public:
  ProjectedFullHamiltonian(const Basis& full_basis, const BlockadeGraph& graph,
                           std::vector<double> couplings)
      : basis_(&full_basis), graph_(&graph), couplings_(std::move(couplings)) {
    if (!full_basis.is_full()) {
      throw std::invalid_argument("ProjectedFullHamiltonian needs the full basis");
    }
    detail::check_couplings(couplings_, full_basis.num_sites());
  }

  std::size_t dimension() const { return basis_->size(); }
  const Basis& basis() const { return *basis_; }

  template <class F>
  void visit_row(std::size_t p, F&& f) const {
    const Mask s = p;
    for (int k = 0; k < basis_->num_sites(); ++k) {
      if (couplings_[k] == 0.0 || (s & graph_->masks[k])) continue;
      f(static_cast<std::size_t>(s ^ site_bit(k)), couplings_[k]);
    }
  }

  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    detail::check_dims(dimension(), in.size(), out.size());
    for (std::size_t p = 0; p < in.size(); ++p) {
      Complex acc = 0.0;
      visit_row(p, [&](std::size_t q, double h) { acc += h * in[q]; });
      out[p] = acc;
    }
  }

 private:
  const Basis* basis_;
  const BlockadeGraph* graph_;
  std::vector<double> couplings_;
};

/// H' = sum_k J_k sigma_x^k + sum_{j<k} D / r_jk^6 n_j n_k on the full basis,
/// with n = (1 + sigma_z) / 2 and r the chain distance (minimal image when
/// periodic).
class LongRangeHamiltonian {
 public:
  LongRangeHamiltonian(const Basis& full_basis, std::vector<double> couplings,
                       double interaction, Boundary boundary)
      : basis_(&full_basis), couplings_(std::move(couplings)),
        interaction_(interaction), boundary_(boundary) {
    if (!full_basis.is_full()) {
      throw std::invalid_argument("LongRangeHamiltonian needs the full basis");
    }
    const int n = full_basis.num_sites();
    detail::check_couplings(couplings_, n);
    const LatticeSpec chain = LatticeSpec::chain(n, boundary);
    std::vector<double> pair(static_cast<std::size_t>(n * n), 0.0);
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        pair[j * n + k] = interaction_ / std::pow(chain.distance(j, k), 6);
      }
    }
    diagonal_.assign(full_basis.size(), 0.0);
    for (std::size_t p = 0; p < full_basis.size(); ++p) {
      double e = 0.0;
      for (int j = 0; j < n; ++j) {
        if (!((p >> j) & 1u)) continue;
        for (int k = j + 1; k < n; ++k) {
          if ((p >> k) & 1u) e += pair[j * n + k];
        }
      }
      diagonal_[p] = e;
    }
  }

  std::size_t dimension() const { return basis_->size(); }
  const Basis& basis() const { return *basis_; }
  double interaction() const { return interaction_; }
  Boundary boundary() const { return boundary_; }
  const std::vector<double>& couplings() const { return couplings_; }

  template <class F>
  void visit_row(std::size_t p, F&& f) const {
    if (diagonal_[p] != 0.0) f(p, diagonal_[p]);
    for (int k = 0; k < basis_->num_sites(); ++k) {
      if (couplings_[k] != 0.0) f(p ^ site_bit(k), couplings_[k]);
    }
  }

  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    detail::check_dims(dimension(), in.size(), out.size());
    for (std::size_t p = 0; p < in.size(); ++p) {
      Complex acc = 0.0;
      visit_row(p, [&](std::size_t q, double h) { acc += h * in[q]; });
      out[p] = acc;
    }
  }

 private:
  const Basis* basis_;
  std::vector<double> couplings_;
  double interaction_;
  Boundary boundary_;
  std::vector<double> diagonal_;
};

template <class H>
concept Hamiltonian = requires(const H& h, std::span<const Complex> in,
                               std::span<Complex> out) {
  { h.dimension() } -> std::convertible_to<std::size_t>;
  { h.basis() } -> std::convertible_to<const Basis&>;
  h.apply(in, out);
  h.visit_row(std::size_t{0}, [](std::size_t, double) {});
};

inline constexpr std::size_t default_dense_cap = 20000;

/// Dense real symmetric matrix with M(p, q) = <p|H|q>.
template <Hamiltonian H>
Eigen::MatrixXd build_dense(const H& h, std::size_t cap = default_dense_cap) {
  const std::size_t n = h.dimension();
  if (n > cap) {
    throw std::length_error("dense Hamiltonian of dimension " + std::to_string(n) +
                            " exceeds cap of " + std::to_string(cap));
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p) {
    h.visit_row(p, [&](std::size_t q, double v) {
      m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) += v;
    });
  }
  return m;
}

/// Compressed-row snapshot of a Hamiltonian, built from its row visitor.
/// Satisfies the Hamiltonian concept and is what the iterative propagator
/// multiplies with.
class SparseHamiltonian {
 public:
  template <class H>
    requires(!std::same_as<std::remove_cvref_t<H>, SparseHamiltonian>)
  explicit SparseHamiltonian(const H& h) : basis_(&h.basis()) {
    const std::size_t n = h.dimension();
    offsets_.reserve(n + 1);
    offsets_.push_back(0);
    for (std::size_t p = 0; p < n; ++p) {
      h.visit_row(p, [&](std::size_t q, double v) {
        columns_.push_back(static_cast<std::int32_t>(q));
        values_.push_back(v);
      });
      offsets_.push_back(columns_.size());
    }
  }

  std::size_t dimension() const { return offsets_.size() - 1; }
  const Basis& basis() const { return *basis_; }
  std::size_t nonzeros() const { return values_.size(); }

  template <class F>
  void visit_row(std::size_t p, F&& f) const {
    for (std::size_t e = offsets_[p]; e < offsets_[p + 1]; ++e) {
      f(static_cast<std::size_t>(columns_[e]), values_[e]);
    }
  }

  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    detail::check_dims(dimension(), in.size(), out.size());
    const std::size_t n = dimension();
    for (std::size_t p = 0; p < n; ++p) {
      double re = 0.0;
      double im = 0.0;
      for (std::size_t e = offsets_[p]; e < offsets_[p + 1]; ++e) {
        const Complex x = in[static_cast<std::size_t>(columns_[e])];
        re += values_[e] * x.real();
        im += values_[e] * x.imag();
      }
      out[p] = Complex(re, im);
    }
  }

 private:
  const Basis* basis_;
  std::vector<std::size_t> offsets_;
  std::vector<std::int32_t> columns_;
  std::vector<double> values_;
};

/// y = H x for Eigen vectors.
template <Hamiltonian H>
void apply(const H& h, const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
  y.resize(x.size());
  h.apply(std::span<const Complex>(x.data(), static_cast<std::size_t>(x.size())),
          std::span<Complex>(y.data(), static_cast<std::size_t>(y.size())));
}

}  // namespace blockade

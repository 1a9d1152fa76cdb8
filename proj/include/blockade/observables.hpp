#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blockade/basis.hpp"
#include "blockade/dynamics.hpp"
#include "blockade/hamiltonians.hpp"

namespace blockade {

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

/// Eigenvalues closer to zero than this are treated as round-off.
inline constexpr double eigenvalue_clamp = 1e-10;

/// Reduced state of sites (j, k), j < k, in the order {gg, ge, eg, ee} with
/// the first factor on site j.
struct PairDensityMatrix {
  Matrix4c rho = Matrix4c::Zero();
  int j = 0;
  int k = 1;
  double t = 0.0;
};

inline double excitation_fraction(const StateVector& psi) {
  const Basis& basis = *psi.basis;
  double acc = 0.0;
  for (std::size_t p = 0; p < basis.size(); ++p) {
    acc += std::norm(psi.amplitudes(static_cast<Eigen::Index>(p))) *
           std::popcount(basis[p]);
  }
  return acc / basis.num_sites();
}

/// <n_k> for every site.
inline std::vector<double> site_occupations(const StateVector& psi) {
  const Basis& basis = *psi.basis;
  std::vector<double> occ(static_cast<std::size_t>(basis.num_sites()), 0.0);
  for (std::size_t p = 0; p < basis.size(); ++p) {
    const double w = std::norm(psi.amplitudes(static_cast<Eigen::Index>(p)));
    for (Mask m = basis[p]; m != 0; m &= m - 1) {
      occ[static_cast<std::size_t>(std::countr_zero(m))] += w;
    }
  }
  return occ;
}

namespace detail {

inline void check_pair(const Basis& basis, int j, int k) {
  const int n = basis.num_sites();
  if (j == k || j < 0 || k < 0 || j >= n || k >= n) {
    throw std::invalid_argument("invalid site pair (" + std::to_string(j) + ", " +
                                std::to_string(k) + ") for " + std::to_string(n) +
                                " sites");
  }
}

inline int pair_index(Mask s, int lo, int hi) {
  return static_cast<int>(2 * ((s >> lo) & 1u) + ((s >> hi) & 1u));
}

}  // namespace detail

/// Partial trace over every site except j and k, using a precomputed flip
/// table for the off-diagonal partners.
inline PairDensityMatrix reduce_two_site(const StateVector& psi, const SiteFlips& flips,
                                         int j, int k) {
  const Basis& basis = *psi.basis;
  detail::check_pair(basis, j, k);
  if (j > k) std::swap(j, k);
  const auto& c = psi.amplitudes;
  Matrix4c rho = Matrix4c::Zero();
  for (std::size_t p = 0; p < basis.size(); ++p) {
    const Complex cp = c(static_cast<Eigen::Index>(p));
    if (cp == Complex{}) continue;
    const Mask s = basis[p];
    const int x = detail::pair_index(s, j, k);
    rho(x, x) += std::norm(cp);
    if (const auto q = flips(p, k); q >= 0) rho(x, x ^ 1) += cp * std::conj(c(q));
    if (const auto q = flips(p, j); q >= 0) rho(x, x ^ 2) += cp * std::conj(c(q));
    if (const auto q = flips.both(p, s, j, k); q >= 0) {
      rho(x, x ^ 3) += cp * std::conj(c(q));
    }
  }
  return {rho, j, k, 0.0};
}

struct SitePair {
  int j = 0;
  int k = 1;
};

/// Every two-site reduced density matrix from one sweep over the basis.
/// The sweep accumulates the correlator families the 4x4 blocks are built
/// from: occupations, joint occupations, single-excitation coherences split
/// by the state of a second site, and the two double-flip coherences.
class PairCorrelators {
 public:
  void compute(const StateVector& psi, const SiteFlips& flips) { sweep(psi, &flips); }

  /// Occupations and joint occupations only; pair() is then invalid.
  void compute_populations(const StateVector& psi) { sweep(psi, nullptr); }

  int num_sites() const { return n_; }
  double occupation(int k) const { return occ_[static_cast<std::size_t>(k)]; }

  /// <n_j n_k>.
  double joint(int j, int k) const {
    if (j > k) std::swap(j, k);
    return joint_[idx(j, k)];
  }

  /// Reduced state of (j, k) in the PairDensityMatrix convention.
  PairDensityMatrix pair(int j, int k) const {
    if (!coherences_) throw std::logic_error("pair() after compute_populations()");
    if (j == k || j < 0 || k < 0 || j >= n_ || k >= n_) {
      throw std::invalid_argument("invalid site pair");
    }
    if (j > k) std::swap(j, k);
    const double nn = joint_[idx(j, k)];
    const double oj = occ_[static_cast<std::size_t>(j)];
    const double ok = occ_[static_cast<std::size_t>(k)];
    Matrix4c rho;
    rho(0, 0) = total_ - oj - ok + nn;
    rho(1, 1) = ok - nn;
    rho(2, 2) = oj - nn;
    rho(3, 3) = nn;
    rho(0, 1) = add_[static_cast<std::size_t>(k)] - add_given_[idx(j, k)];
    rho(2, 3) = add_given_[idx(j, k)];
    rho(0, 2) = add_[static_cast<std::size_t>(j)] - add_given_[idx(k, j)];
    rho(1, 3) = add_given_[idx(k, j)];
    rho(0, 3) = add_both_[idx(j, k)];
    rho(1, 2) = move_[idx(j, k)];
    for (int r = 0; r < 4; ++r) {
      for (int s = r + 1; s < 4; ++s) rho(s, r) = std::conj(rho(r, s));
    }
    return {rho, j, k, 0.0};
  }

 private:
  void sweep(const StateVector& psi, const SiteFlips* flip_table) {
    const Basis& basis = *psi.basis;
    coherences_ = flip_table != nullptr;
    n_ = basis.num_sites();
    const auto n = static_cast<std::size_t>(n_);
    total_ = 0.0;
    occ_.assign(n, 0.0);
    joint_.assign(n * n, 0.0);
    add_.assign(n, Complex{});
    add_given_.assign(n * n, Complex{});
    add_both_.assign(n * n, Complex{});
    move_.assign(n * n, Complex{});
    const auto& c = psi.amplitudes;
    std::vector<int> excited;
    std::vector<int> addable;
    excited.reserve(n);
    addable.reserve(n);
    if (!coherences_) {
      for (std::size_t p = 0; p < basis.size(); ++p) {
        const double w = std::norm(c(static_cast<Eigen::Index>(p)));
        total_ += w;
        for (Mask s = basis[p]; s != 0; s &= s - 1) {
          const auto e = static_cast<std::size_t>(std::countr_zero(s));
          occ_[e] += w;
          for (Mask rest = s & (s - 1); rest != 0; rest &= rest - 1) {
            joint_[e * n + static_cast<std::size_t>(std::countr_zero(rest))] += w;
          }
        }
      }
      return;
    }
    const SiteFlips& flips = *flip_table;
    for (std::size_t p = 0; p < basis.size(); ++p) {
      const Complex cp = c(static_cast<Eigen::Index>(p));
      const double w = std::norm(cp);
      const Mask s = basis[p];
      total_ += w;
      excited.clear();
      addable.clear();
      for (int k = 0; k < n_; ++k) {
        if ((s >> k) & 1u) {
          excited.push_back(k);
        } else if (flips(p, k) >= 0) {
          addable.push_back(k);
        }
      }
      for (std::size_t a = 0; a < excited.size(); ++a) {
        const auto e = static_cast<std::size_t>(excited[a]);
        occ_[e] += w;
        for (std::size_t b = a + 1; b < excited.size(); ++b) {
          joint_[e * n + static_cast<std::size_t>(excited[b])] += w;
        }
      }
      for (std::size_t a = 0; a < addable.size(); ++a) {
        const int k = addable[a];
        const auto mid = static_cast<std::size_t>(flips(p, k));
        const Complex v = cp * std::conj(c(static_cast<Eigen::Index>(mid)));
        add_[static_cast<std::size_t>(k)] += v;
        for (int j : excited) add_given_[static_cast<std::size_t>(j) * n + k] += v;
        for (std::size_t b = a + 1; b < addable.size(); ++b) {
          const int k2 = addable[b];
          const auto q = flips(mid, k2);
          if (q >= 0) add_both_[static_cast<std::size_t>(k) * n + k2] += cp * std::conj(c(q));
        }
      }
      for (int k : excited) {
        const auto mid = static_cast<std::size_t>(flips(p, k));
        for (int j = 0; j < n_; ++j) {
          if (j == k || ((s >> j) & 1u)) continue;
          const auto q = flips(mid, j);
          if (q >= 0) move_[static_cast<std::size_t>(j) * n + k] += cp * std::conj(c(q));
        }
      }
    }
  }

  std::size_t idx(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(b);
  }

  int n_ = 0;
  bool coherences_ = false;
  double total_ = 0.0;
  std::vector<double> occ_;
  std::vector<double> joint_;        // [j][k], j < k
  std::vector<Complex> add_;         // excitation added on k
  std::vector<Complex> add_given_;   // [j][k]: added on k while j excited
  std::vector<Complex> add_both_;    // [j][k], j < k: added on both
  std::vector<Complex> move_;        // [j][k]: excitation moved from k to j
};

/// Same partial trace using basis index lookups; works for any basis.
inline PairDensityMatrix reduce_two_site(const StateVector& psi, int j, int k) {
  const Basis& basis = *psi.basis;
  detail::check_pair(basis, j, k);
  if (j > k) std::swap(j, k);
  const auto& c = psi.amplitudes;
  Matrix4c rho = Matrix4c::Zero();
  for (std::size_t p = 0; p < basis.size(); ++p) {
    const Complex cp = c(static_cast<Eigen::Index>(p));
    if (cp == Complex{}) continue;
    const Mask s = basis[p];
    const int x = detail::pair_index(s, j, k);
    for (int y = 0; y < 4; ++y) {
      const Mask flip = ((x ^ y) & 2 ? site_bit(j) : 0) | ((x ^ y) & 1 ? site_bit(k) : 0);
      if (auto q = basis.index_of(s ^ flip)) {
        rho(x, y) += cp * std::conj(c(static_cast<Eigen::Index>(*q)));
      }
    }
  }
  return {rho, j, k, 0.0};
}

/// Single-site reduced state in the order {g, e}.
inline Matrix2c reduce_one_site(const StateVector& psi, int k) {
  const Basis& basis = *psi.basis;
  if (k < 0 || k >= basis.num_sites()) {
    throw std::invalid_argument("invalid site " + std::to_string(k));
  }
  const auto& c = psi.amplitudes;
  Matrix2c rho = Matrix2c::Zero();
  for (std::size_t p = 0; p < basis.size(); ++p) {
    const Complex cp = c(static_cast<Eigen::Index>(p));
    const Mask s = basis[p];
    const int a = static_cast<int>((s >> k) & 1u);
    rho(a, a) += std::norm(cp);
    if (auto q = basis.index_of(s ^ site_bit(k))) {
      rho(a, 1 - a) += cp * std::conj(c(static_cast<Eigen::Index>(*q)));
    }
  }
  return rho;
}

/// Traces out the other site of the pair; `which` = 0 keeps site j, 1 keeps k.
inline Matrix2c reduce_one_site(const PairDensityMatrix& pair, int which) {
  Matrix2c r = Matrix2c::Zero();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int o = 0; o < 2; ++o) {
        r(a, b) += which == 0 ? pair.rho(2 * a + o, 2 * b + o)
                              : pair.rho(2 * o + a, 2 * o + b);
      }
    }
  }
  return r;
}

/// Wootters concurrence. The lambda_i are the eigenvalues of rho * rho~,
/// rho~ = (sy x sy) rho* (sy x sy), which coincide with those of the
/// Hermitian sqrt(rho) rho~ sqrt(rho).
inline double concurrence(const Matrix4c& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> herm(rho, Eigen::EigenvaluesOnly);
  if (herm.eigenvalues()(0) < -eigenvalue_clamp) {
    throw NumericalError("concurrence: density matrix is not positive semidefinite "
                         "(min eigenvalue " + std::to_string(herm.eigenvalues()(0)) + ")");
  }
  // sy x sy = antidiag(-1, 1, 1, -1).
  static const Eigen::Matrix4d flip = (Eigen::Matrix4d() << 0, 0, 0, -1,
                                                            0, 0, 1, 0,
                                                            0, 1, 0, 0,
                                                            -1, 0, 0, 0).finished();
  const Matrix4c tilde = flip.cast<Complex>() * rho.conjugate() * flip.cast<Complex>();
  Eigen::ComplexEigenSolver<Matrix4c> solver(rho * tilde, false);
  std::array<double, 4> roots{};
  for (int i = 0; i < 4; ++i) {
    const double v = solver.eigenvalues()(i).real();
    roots[static_cast<std::size_t>(i)] = v > eigenvalue_clamp ? std::sqrt(v) : 0.0;
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  const double c = roots[0] - roots[1] - roots[2] - roots[3];
  return std::clamp(c, 0.0, 1.0);
}

inline double binary_entropy(double x) {
  auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return term(x) + term(1.0 - x);
}

/// Entanglement of formation from the concurrence.
inline double eof(double concurrence) {
  const double c = std::clamp(concurrence, 0.0, 1.0);
  const double x = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c)));
  return std::clamp(binary_entropy(x), 0.0, 1.0);
}

inline Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

/// (2/3) Tr|rho_12 - rho_1 x rho_2|; equals 1 on a Bell state.
inline double total_correlation(const Matrix4c& rho_pair, const Matrix2c& rho_1,
                                const Matrix2c& rho_2) {
  const Matrix4c diff = rho_pair - kron(rho_1, rho_2);
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(diff, Eigen::EigenvaluesOnly);
  return (2.0 / 3.0) * solver.eigenvalues().cwiseAbs().sum();
}

inline double total_correlation(const PairDensityMatrix& pair) {
  return total_correlation(pair.rho, reduce_one_site(pair, 0), reduce_one_site(pair, 1));
}

/// <n_j n_k> / <n>^2 from already averaged joint and single probabilities.
inline double pair_correlation(double joint, double single) {
  if (!(single > 0.0)) {
    throw std::domain_error("pair correlation undefined: mean excitation is zero");
  }
  return joint / (single * single);
}

struct CorrelationSeries {
  std::vector<double> times;
  std::vector<double> values;
};

struct Peak {
  std::size_t index = 0;
  double t = 0.0;
  double value = 0.0;
};

class PeakNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// First grid point that dominates its three neighbours on each side and
/// strictly exceeds at least one of them.
inline Peak first_peak(std::span<const double> times, std::span<const double> values) {
  if (values.size() < 7 || times.size() != values.size()) {
    throw std::invalid_argument("first_peak needs matching series of length >= 7");
  }
  for (std::size_t i = 3; i + 3 < values.size(); ++i) {
    bool dominates = true;
    bool strict = false;
    for (std::size_t m = 1; m <= 3; ++m) {
      for (double other : {values[i - m], values[i + m]}) {
        if (values[i] < other) dominates = false;
        if (values[i] > other) strict = true;
      }
    }
    if (dominates && strict) return {i, times[i], values[i]};
  }
  throw PeakNotFound("no interior peak in series");
}

inline Peak first_peak(const CorrelationSeries& series) {
  return first_peak(series.times, series.values);
}

struct WindowAverage {
  double mean = 0.0;
  double stdev = 0.0;
  std::size_t count = 0;
};

struct TimeWindow {
  double begin = 15.0;
  double end = 25.0;

  bool contains(double t) const { return t >= begin - 1e-9 && t <= end + 1e-9; }
};

/// Mean and (population) standard deviation over grid points in the window.
inline WindowAverage saturation_average(std::span<const double> times,
                                        std::span<const double> values, TimeWindow window) {
  WindowAverage out;
  // Running mean, so a constant series comes back exactly.
  for (std::size_t i = 0; i < times.size() && i < values.size(); ++i) {
    if (!window.contains(times[i])) continue;
    ++out.count;
    out.mean += (values[i] - out.mean) / static_cast<double>(out.count);
  }
  if (out.count == 0) throw std::invalid_argument("saturation window contains no grid points");
  double dev = 0.0;
  for (std::size_t i = 0; i < times.size() && i < values.size(); ++i) {
    if (window.contains(times[i])) dev += (values[i] - out.mean) * (values[i] - out.mean);
  }
  out.stdev = std::sqrt(dev / static_cast<double>(out.count));
  return out;
}

inline WindowAverage saturation_average(const CorrelationSeries& series, TimeWindow window) {
  return saturation_average(series.times, series.values, window);
}

}  // namespace blockade

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blockade/basis.hpp"
#include "blockade/hamiltonians.hpp"

namespace blockade {

/// Amplitudes over a basis. The basis must outlive the vector.
struct StateVector {
  const Basis* basis = nullptr;
  Eigen::VectorXcd amplitudes;

  std::size_t size() const { return static_cast<std::size_t>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }

  /// |g>^N: the all-ground state sits at index 0 of every basis.
  static StateVector ground(const Basis& basis) {
    StateVector v{&basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()))};
    v.amplitudes(0) = 1.0;
    return v;
  }
};

/// Uniform grid t_i = i * dt, i = 0..round(t_max / dt).
struct TimeGrid {
  double t_max = 25.0;
  double dt = 0.05;

  void validate() const {
    if (!(dt > 0.0) || !(t_max >= dt)) {
      throw std::invalid_argument("time grid needs dt > 0 and t_max >= dt");
    }
  }
  std::size_t size() const {
    return static_cast<std::size_t>(std::llround(t_max / dt)) + 1;
  }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
  std::vector<double> times() const {
    std::vector<double> t(size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = time(i);
    return t;
  }
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Backend { automatic, spectral, krylov };

/// Threshold below which `Backend::automatic` diagonalizes.
inline constexpr std::size_t automatic_spectral_limit = 1200;

/// exp(-iHt) through a full eigendecomposition of the dense matrix.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const Eigen::MatrixXd& dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("dense eigendecomposition failed");
    }
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
  }

  const Eigen::VectorXd& energies() const { return energies_; }
  const Eigen::MatrixXd& eigenvectors() const { return vectors_; }

  /// Coefficients <E_a|psi> of a state.
  Eigen::VectorXcd project(const Eigen::VectorXcd& psi) const {
    return vectors_.transpose().cast<Complex>() * psi;
  }

  /// Sum_a exp(-i E_a t) c_a |E_a>.
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& coefficients, double t) const {
    Eigen::VectorXcd phased(coefficients.size());
    for (Eigen::Index a = 0; a < coefficients.size(); ++a) {
      phased(a) = std::polar(1.0, -energies_(a) * t) * coefficients(a);
    }
    Eigen::VectorXcd out(vectors_.rows());
    out.real() = vectors_ * phased.real();
    out.imag() = vectors_ * phased.imag();
    return out;
  }

 private:
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;
};

/// Short-time Lanczos propagation with a posteriori error control. Steps are
/// subdivided until the Krylov residual estimate is below `tolerance`.
template <Hamiltonian H>
class KrylovPropagator {
 public:
  explicit KrylovPropagator(const H& h, double tolerance = 1e-10, int max_dim = 40)
      : h_(&h), tolerance_(tolerance), max_dim_(max_dim) {}

  /// psi <- exp(-i H tau) psi; tau may be negative.
  void step(Eigen::VectorXcd& psi, double tau) {
    double remaining = tau;
    double sub = tau;
    while (remaining != 0.0) {
      if (std::abs(sub) > std::abs(remaining)) sub = remaining;
      if (try_step(psi, sub)) {
        remaining -= sub;
        if (std::abs(remaining) < 1e-15 * std::abs(tau)) remaining = 0.0;
      } else {
        sub *= 0.5;
        if (std::abs(sub) < 1e-12 * std::abs(tau)) {
          throw NumericalError("Krylov step size underflow");
        }
      }
    }
  }

 private:
  bool try_step(Eigen::VectorXcd& psi, double tau) {
    const double beta0 = psi.norm();
    if (beta0 == 0.0) return true;
    const Eigen::Index n = psi.size();
    basis_.resize(static_cast<std::size_t>(max_dim_ + 1));
    basis_[0] = psi / beta0;
    std::vector<double> alpha;
    std::vector<double> beta;
    Eigen::VectorXcd w(n);
    for (int m = 0; m < max_dim_; ++m) {
      apply(*h_, basis_[m], w);
      if (m > 0) w -= beta[static_cast<std::size_t>(m - 1)] * basis_[m - 1];
      const double a = basis_[m].dot(w).real();
      alpha.push_back(a);
      w -= a * basis_[m];
      const double b = w.norm();
      const int dim = m + 1;
      const bool breakdown = b < 1e-13 * std::max(1.0, std::abs(a));
      if (dim >= 4 || breakdown || dim == static_cast<int>(n)) {
        Eigen::VectorXcd small = exp_tridiagonal(alpha, beta, tau);
        const double err = breakdown ? 0.0 : b * std::abs(small(dim - 1)) * beta0;
        if (err <= tolerance_ || breakdown || dim == static_cast<int>(n)) {
          Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
          for (int r = 0; r < dim; ++r) out += small(r) * basis_[r];
          psi = beta0 * out;
          return true;
        }
      }
      if (m + 1 == max_dim_) break;
      beta.push_back(b);
      basis_[m + 1] = w / b;
    }
    return false;
  }

  /// exp(-i T tau) e_1 for the symmetric tridiagonal T(alpha, beta).
  static Eigen::VectorXcd exp_tridiagonal(const std::vector<double>& alpha,
                                          const std::vector<double>& beta,
                                          double tau) {
    const auto dim = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), dim);
    Eigen::VectorXd sub(std::max<Eigen::Index>(dim - 1, 0));
    for (Eigen::Index r = 0; r + 1 < dim; ++r) sub(r) = beta[static_cast<std::size_t>(r)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& v = solver.eigenvectors();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
    for (Eigen::Index a = 0; a < dim; ++a) {
      const Complex phase = std::polar(1.0, -solver.eigenvalues()(a) * tau) * v(0, a);
      out += phase * v.col(a).cast<Complex>();
    }
    return out;
  }

  const H* h_;
  double tolerance_;
  int max_dim_;
  std::vector<Eigen::VectorXcd> basis_;
};

struct PropagationOptions {
  Backend backend = Backend::automatic;
  double krylov_tolerance = 1e-10;
  double norm_drift_limit = 1e-6;
  std::size_t dense_cap = default_dense_cap;
};

inline Backend resolve_backend(Backend requested, std::size_t dim, std::size_t dense_cap) {
  if (requested == Backend::automatic) {
    return dim <= std::min(automatic_spectral_limit, dense_cap) ? Backend::spectral
                                                                : Backend::krylov;
  }
  if (requested == Backend::spectral && dim > dense_cap) {
    throw std::length_error("spectral backend: dimension " + std::to_string(dim) +
                            " exceeds dense cap " + std::to_string(dense_cap));
  }
  return requested;
}

/// Evolves from `initial` and calls observer(i, t_i, psi) at every grid
/// point, starting with i = 0.
template <Hamiltonian H, class Observer>
void propagate(const H& h, const StateVector& initial, const TimeGrid& grid,
               Observer&& observer, const PropagationOptions& options = {}) {
  grid.validate();
  if (initial.size() != h.dimension()) {
    throw std::invalid_argument("initial state does not match Hamiltonian dimension");
  }
  const Backend backend = resolve_backend(options.backend, h.dimension(), options.dense_cap);
  StateVector psi = initial;
  const double norm0 = initial.norm();
  auto check_norm = [&](std::size_t i) {
    const double drift = std::abs(psi.norm() - norm0);
    if (!(drift <= options.norm_drift_limit)) {
      throw NumericalError("norm drift " + std::to_string(drift) + " at grid index " +
                           std::to_string(i));
    }
  };
  if (backend == Backend::spectral) {
    const SpectralPropagator prop(build_dense(h, options.dense_cap));
    const Eigen::VectorXcd coeffs = prop.project(initial.amplitudes);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      psi.amplitudes = prop.evolve(coeffs, grid.time(i));
      check_norm(i);
      observer(i, grid.time(i), static_cast<const StateVector&>(psi));
    }
    return;
  }
  const SparseHamiltonian sparse(h);
  KrylovPropagator<SparseHamiltonian> prop(sparse, options.krylov_tolerance);
  observer(std::size_t{0}, 0.0, static_cast<const StateVector&>(psi));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    prop.step(psi.amplitudes, grid.dt);
    check_norm(i);
    observer(i, grid.time(i), static_cast<const StateVector&>(psi));
  }
}

/// Stores every grid-point state; only sensible for small bases.
template <Hamiltonian H>
std::vector<StateVector> trajectory(const H& h, const TimeGrid& grid,
                                    const PropagationOptions& options = {}) {
  std::vector<StateVector> out;
  out.reserve(grid.size());
  propagate(h, StateVector::ground(h.basis()), grid,
            [&](std::size_t, double, const StateVector& psi) { out.push_back(psi); },
            options);
  return out;
}

struct SpectralData {
  std::vector<double> energies;  // ascending
  std::vector<double> overlaps;  // |<psi(0)|E_a>|^2
};

/// Eigenvalues of H with the weights of the all-ground state on each
/// eigenvector.
template <Hamiltonian H>
SpectralData spectrum_overlap(const H& h, std::size_t dense_cap = default_dense_cap) {
  const SpectralPropagator prop(build_dense(h, dense_cap));
  SpectralData data;
  const auto& e = prop.energies();
  const auto& v = prop.eigenvectors();
  for (Eigen::Index a = 0; a < e.size(); ++a) {
    data.energies.push_back(e(a));
    data.overlaps.push_back(v(0, a) * v(0, a));
  }
  return data;
}

}  // namespace blockade

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "blockade/basis.hpp"
#include "blockade/dynamics.hpp"
#include "blockade/hamiltonians.hpp"
#include "blockade/lattice.hpp"
#include "blockade/observables.hpp"

// Self-checks that compare two independent routes to the same quantity.
// Each returns the largest deviation seen over the time grid.

namespace blockade {

/// Evolves |g...g> under the restricted Hamiltonian and under the projected
/// operator on the full 2^N space. Returns the largest amplitude mismatch,
/// counting any weight that leaks onto inadmissible states.
inline double restricted_full_deviation(const LatticeSpec& lattice,
                                        const std::vector<double>& couplings,
                                        const TimeGrid& grid, Backend backend = Backend::spectral) {
  const BlockadeGraph graph = build_blockade_graph(lattice);
  const Basis restricted = enumerate_restricted(graph);
  const Basis full = enumerate_full(lattice.num_sites());
  const SiteFlips flips(restricted);
  const BlockadeHamiltonian h(restricted, graph, flips, couplings);
  const ProjectedFullHamiltonian hf(full, graph, couplings);
  PropagationOptions opt;
  opt.backend = backend;
  const auto a = trajectory(h, grid, opt);
  const auto b = trajectory(hf, grid, opt);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<bool> seen(full.size(), false);
    for (std::size_t p = 0; p < restricted.size(); ++p) {
      const auto q = static_cast<Eigen::Index>(restricted[p]);
      seen[static_cast<std::size_t>(q)] = true;
      worst = std::max(worst,
                       std::abs(a[i].amplitudes(static_cast<Eigen::Index>(p)) - b[i].amplitudes(q)));
    }
    for (std::size_t q = 0; q < full.size(); ++q) {
      if (!seen[q]) worst = std::max(worst, std::abs(b[i].amplitudes(static_cast<Eigen::Index>(q))));
    }
  }
  return worst;
}

/// Largest amplitude difference between the spectral and Krylov backends.
template <Hamiltonian H>
double backend_deviation(const H& h, const TimeGrid& grid) {
  PropagationOptions spectral;
  spectral.backend = Backend::spectral;
  PropagationOptions krylov;
  krylov.backend = Backend::krylov;
  const auto a = trajectory(h, grid, spectral);
  const auto b = trajectory(h, grid, krylov);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, (a[i].amplitudes - b[i].amplitudes).cwiseAbs().maxCoeff());
  }
  return worst;
}

struct ConservationDrift {
  double norm = 0.0;
  double energy = 0.0;
};

/// Drift of <psi|psi> and <psi|H|psi> along a trajectory from |g...g>.
template <Hamiltonian H>
ConservationDrift conservation_drift(const H& h, const TimeGrid& grid,
                                     const PropagationOptions& options = {}) {
  ConservationDrift drift;
  Eigen::VectorXcd hpsi;
  double e0 = 0.0;
  propagate(
      h, StateVector::ground(h.basis()), grid,
      [&](std::size_t i, double, const StateVector& psi) {
        apply(h, psi.amplitudes, hpsi);
        const double e = psi.amplitudes.dot(hpsi).real();
        if (i == 0) e0 = e;
        drift.norm = std::max(drift.norm, std::abs(psi.norm() - 1.0));
        drift.energy = std::max(drift.energy, std::abs(e - e0));
      },
      options);
  return drift;
}

/// Two blockaded sites with equal coupling J: the exact state is
/// cos(sqrt2 J t)|gg> - i sin(sqrt2 J t)(|ge> + |eg>)/sqrt2.
inline Eigen::VectorXcd two_site_exact(double coupling, double t) {
  const double w = std::sqrt(2.0) * coupling * t;
  Eigen::VectorXcd psi(3);  // basis order: 00, 01, 10
  psi(0) = std::cos(w);
  psi(1) = Complex(0.0, -std::sin(w) / std::sqrt(2.0));
  psi(2) = psi(1);
  return psi;
}

struct TwoSiteCheck {
  double max_deviation = 0.0;
  double window_pex = 0.0;
};

inline TwoSiteCheck two_site_check(double coupling, const TimeGrid& grid, TimeWindow window,
                                   Backend backend = Backend::automatic) {
  const LatticeSpec lattice = LatticeSpec::chain(2, Boundary::open);
  const BlockadeGraph graph = build_blockade_graph(lattice);
  const Basis basis = enumerate_restricted(graph);
  const SiteFlips flips(basis);
  const BlockadeHamiltonian h(basis, graph, flips, {coupling, coupling});
  TwoSiteCheck out;
  std::vector<double> times;
  std::vector<double> pex;
  PropagationOptions opt;
  opt.backend = backend;
  propagate(
      h, StateVector::ground(basis), grid,
      [&](std::size_t, double t, const StateVector& psi) {
        out.max_deviation = std::max(
            out.max_deviation, (psi.amplitudes - two_site_exact(coupling, t)).cwiseAbs().maxCoeff());
        times.push_back(t);
        pex.push_back(excitation_fraction(psi));
      },
      opt);
  out.window_pex = saturation_average(times, pex, window).mean;
  return out;
}

}  // namespace blockade

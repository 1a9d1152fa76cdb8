#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "blockade/basis.hpp"
#include "blockade/disorder.hpp"
#include "blockade/dynamics.hpp"
#include "blockade/hamiltonians.hpp"
#include "blockade/observables.hpp"
#include "blockade/validation.hpp"
#include "brute_force.hpp"

using namespace blockade;
using Eigen::VectorXcd;

namespace {

struct System {
  LatticeSpec spec;
  BlockadeGraph graph;
  Basis basis;
  SiteFlips flips;

  explicit System(const LatticeSpec& s)
      : spec(s), graph(build_blockade_graph(s)), basis(enumerate_restricted(graph)), flips(basis) {}

  StateVector random_state(std::mt19937_64& rng) const {
    std::normal_distribution<double> g;
    StateVector v{&basis, VectorXcd(static_cast<Eigen::Index>(basis.size()))};
    for (auto& x : v.amplitudes) x = Complex(g(rng), g(rng));
    v.amplitudes.normalize();
    return v;
  }

  StateVector evolved(double lambda, double t, std::uint64_t index = 0) const {
    const BlockadeHamiltonian h(basis, graph, flips,
                                sample_configuration(spec.num_sites(), lambda, 3, index).couplings);
    StateVector out;
    propagate(h, StateVector::ground(basis), TimeGrid{t, t},
              [&](std::size_t i, double, const StateVector& psi) {
                if (i == 1) out = psi;
              });
    return out;
  }

  VectorXcd embed(const StateVector& psi) const {
    VectorXcd full = VectorXcd::Zero(Eigen::Index{1} << spec.num_sites());
    for (std::size_t p = 0; p < basis.size(); ++p) {
      full(static_cast<Eigen::Index>(basis[p])) = psi.amplitudes(static_cast<Eigen::Index>(p));
    }
    return full;
  }
};

Matrix4c projector(const Eigen::Vector4cd& v) { return v * v.adjoint(); }

Eigen::Vector4cd bell_ge_eg() {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  return v;
}

Matrix4c werner(double p) {
  Eigen::Vector4cd phi = Eigen::Vector4cd::Zero();
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  return p * projector(phi) + (1.0 - p) * Matrix4c::Identity() / 4.0;
}

Matrix4c random_mixed(std::mt19937_64& rng, int rank) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(4, rank);
  for (int i = 0; i < 4; ++i)
    for (int r = 0; r < rank; ++r) a(i, r) = Complex(g(rng), g(rng));
  Matrix4c rho = a * a.adjoint();
  return rho / rho.trace().real();
}

// Concurrence through the Hermitian matrix sqrt(rho) rho~ sqrt(rho).
double concurrence_oracle(const Matrix4c& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho);
  const Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  const Matrix4c sq = es.eigenvectors() * ev.cwiseSqrt().cast<Complex>().asDiagonal() *
                      es.eigenvectors().adjoint();
  Eigen::Matrix2cd sy;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  const Matrix4c yy = kron(sy, sy);
  const Matrix4c tilde = yy * rho.conjugate() * yy;
  Eigen::SelfAdjointEigenSolver<Matrix4c> r(sq * tilde * sq);
  std::vector<double> l;
  for (int i = 0; i < 4; ++i) l.push_back(std::sqrt(std::max(0.0, r.eigenvalues()(i))));
  std::sort(l.rbegin(), l.rend());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

}  // namespace

TEST(ExcitationFraction, Basics) {
  const System s(LatticeSpec::chain(2, Boundary::open));
  EXPECT_EQ(excitation_fraction(StateVector::ground(s.basis)), 0.0);
  StateVector w{&s.basis, VectorXcd::Zero(3)};
  w.amplitudes(1) = w.amplitudes(2) = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(excitation_fraction(w), 0.5, 1e-15);
}

TEST(ReduceTwoSite, GroundAndBellPair) {
  const System s(LatticeSpec::chain(2, Boundary::open));
  const auto g = reduce_two_site(StateVector::ground(s.basis), 0, 1);
  Matrix4c gg = Matrix4c::Zero();
  gg(0, 0) = 1.0;
  EXPECT_LT((g.rho - gg).norm(), 1e-15);

  StateVector w{&s.basis, VectorXcd::Zero(3)};
  w.amplitudes(1) = w.amplitudes(2) = 1.0 / std::sqrt(2.0);
  for (const auto& pair : {reduce_two_site(w, 0, 1), reduce_two_site(w, s.flips, 0, 1)}) {
    EXPECT_LT((pair.rho - projector(bell_ge_eg())).norm(), 1e-15);
  }
}

TEST(ReduceTwoSite, MatchesFullSpacePartialTrace) {
  std::mt19937_64 rng(21);
  for (const LatticeSpec& spec : {LatticeSpec::chain(3, Boundary::periodic),
                                  LatticeSpec::chain(7, Boundary::periodic),
                                  LatticeSpec::chain(6, Boundary::open), LatticeSpec::grid(2, 3)}) {
    const System s(spec);
    const StateVector psi = s.random_state(rng);
    const VectorXcd full = s.embed(psi);
    PairCorrelators corr;
    corr.compute(psi, s.flips);
    const int n = spec.num_sites();
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const Matrix4c oracle = testing_oracle::partial_trace(full, n, j, k);
        EXPECT_LT((reduce_two_site(psi, j, k).rho - oracle).norm(), 1e-12);
        EXPECT_LT((reduce_two_site(psi, s.flips, j, k).rho - oracle).norm(), 1e-12);
        EXPECT_LT((corr.pair(j, k).rho - oracle).norm(), 1e-12);
        EXPECT_NEAR(corr.joint(j, k), oracle(3, 3).real(), 1e-12);
      }
    }
  }
}

TEST(ReduceTwoSite, AllPairsAgreeOnEvolvedState) {
  const System s(LatticeSpec::chain(12, Boundary::periodic));
  const StateVector psi = s.evolved(3.0, 2.3);
  PairCorrelators corr;
  corr.compute(psi, s.flips);
  PairCorrelators pops;
  pops.compute_populations(psi);
  for (int j = 0; j < 12; ++j) {
    EXPECT_NEAR(pops.occupation(j), corr.occupation(j), 1e-14);
    for (int k = j + 1; k < 12; ++k) {
      EXPECT_LT((corr.pair(j, k).rho - reduce_two_site(psi, j, k).rho).norm(), 1e-13);
      EXPECT_NEAR(pops.joint(j, k), corr.joint(j, k), 1e-14);
    }
  }
  EXPECT_THROW(pops.pair(0, 1), std::logic_error);
}

TEST(ReduceTwoSite, DensityMatrixInvariants) {
  const System s(LatticeSpec::chain(10, Boundary::periodic));
  for (double t : {0.5, 1.7, 6.0}) {
    const StateVector psi = s.evolved(3.0, t, 4);
    for (int k = 1; k < 10; ++k) {
      const Matrix4c rho = reduce_two_site(psi, 0, k).rho;
      EXPECT_LT((rho - rho.adjoint()).norm(), 1e-12);
      EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
      Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho);
      EXPECT_GE(es.eigenvalues()(0), -1e-10);
    }
    EXPECT_NEAR(reduce_two_site(psi, 0, 1).rho(3, 3).real(), 0.0, 1e-15);
  }
}

TEST(ReduceTwoSite, RejectsBadSites) {
  const System s(LatticeSpec::chain(4, Boundary::open));
  const auto g = StateVector::ground(s.basis);
  EXPECT_THROW(reduce_two_site(g, 1, 1), std::invalid_argument);
  EXPECT_THROW(reduce_two_site(g, 0, 4), std::invalid_argument);
  EXPECT_THROW(reduce_two_site(g, s.flips, -1, 2), std::invalid_argument);
  EXPECT_THROW(reduce_one_site(g, 7), std::invalid_argument);
}

TEST(ReduceOneSite, BellAndGround) {
  const PairDensityMatrix bell{projector(bell_ge_eg()), 0, 1, 0.0};
  EXPECT_LT((reduce_one_site(bell, 0) - Matrix2c::Identity() / 2.0).norm(), 1e-15);
  EXPECT_LT((reduce_one_site(bell, 1) - Matrix2c::Identity() / 2.0).norm(), 1e-15);
  const System s(LatticeSpec::chain(3, Boundary::open));
  Matrix2c g = Matrix2c::Zero();
  g(0, 0) = 1.0;
  EXPECT_LT((reduce_one_site(StateVector::ground(s.basis), 1) - g).norm(), 1e-15);
}

TEST(ReduceOneSite, TwoPathsAgree) {
  const System s(LatticeSpec::chain(11, Boundary::periodic));
  const StateVector psi = s.evolved(3.0, 3.1, 2);
  for (int k = 1; k < 11; ++k) {
    const auto pair = reduce_two_site(psi, 0, k);
    EXPECT_LT((reduce_one_site(pair, 0) - reduce_one_site(psi, 0)).norm(), 1e-12);
    EXPECT_LT((reduce_one_site(pair, 1) - reduce_one_site(psi, k)).norm(), 1e-12);
  }
}

TEST(Concurrence, BellAndProduct) {
  EXPECT_NEAR(concurrence(projector(bell_ge_eg())), 1.0, 1e-10);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix4c a = random_mixed(rng, 2);
    Matrix2c r1 = reduce_one_site(PairDensityMatrix{a, 0, 1, 0.0}, 0);
    Matrix2c r2 = reduce_one_site(PairDensityMatrix{a, 0, 1, 0.0}, 1);
    EXPECT_NEAR(concurrence(kron(r1, r2)), 0.0, 1e-8);
  }
}

TEST(Concurrence, WernerFamily) {
  for (double p : {0.0, 1.0 / 3.0, 0.6, 1.0}) {
    EXPECT_NEAR(concurrence(werner(p)), std::max(0.0, (3 * p - 1) / 2), 1e-10) << p;
  }
}

TEST(Concurrence, MatchesHermitianRoute) {
  std::mt19937_64 rng(8);
  for (int rank : {1, 2, 3, 4}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix4c rho = random_mixed(rng, rank);
      EXPECT_NEAR(concurrence(rho), concurrence_oracle(rho), 1e-7) << rank;
    }
  }
}

TEST(Concurrence, RejectsNonPositive) {
  Matrix4c bad = Matrix4c::Zero();
  bad(0, 0) = 1.2;
  bad(1, 1) = -0.2;
  EXPECT_THROW(concurrence(bad), NumericalError);
}

TEST(Eof, Values) {
  EXPECT_EQ(eof(0.0), 0.0);
  EXPECT_NEAR(eof(1.0), 1.0, 1e-15);
  const double h09 = -0.9 * std::log2(0.9) - 0.1 * std::log2(0.1);
  EXPECT_NEAR(eof(0.6), h09, 1e-14);
  EXPECT_NEAR(eof(0.6), 0.4690, 5e-5);
  for (double c = 0.0; c <= 1.0; c += 0.01) {
    EXPECT_GE(eof(c), 0.0);
    EXPECT_LE(eof(c), 1.0);
    if (c > 0) EXPECT_GT(eof(c), eof(c - 0.01));
  }
}

TEST(TotalCorrelation, BellAndProduct) {
  const Matrix4c bell = projector(bell_ge_eg());
  const Matrix4c diff = bell - Matrix4c::Identity() / 4.0;
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(diff);
  EXPECT_NEAR(es.eigenvalues()(0), -0.25, 1e-14);
  EXPECT_NEAR(es.eigenvalues()(3), 0.75, 1e-14);
  EXPECT_NEAR(total_correlation(PairDensityMatrix{bell, 0, 1, 0.0}), 1.0, 1e-10);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const PairDensityMatrix a{random_mixed(rng, 3), 0, 1, 0.0};
    const Matrix4c prod = kron(reduce_one_site(a, 0), reduce_one_site(a, 1));
    EXPECT_NEAR(total_correlation(PairDensityMatrix{prod, 0, 1, 0.0}), 0.0, 1e-10);
    EXPECT_GT(total_correlation(a), 0.0);
  }
}

TEST(TotalCorrelation, EntanglementImpliesCorrelation) {
  const System s(LatticeSpec::chain(10, Boundary::periodic));
  for (double t : {0.4, 1.1, 2.5, 7.0}) {
    const StateVector psi = s.evolved(3.0, t, 1);
    for (int k = 1; k < 10; ++k) {
      const auto pair = reduce_two_site(psi, 0, k);
      const double e = eof(concurrence(pair.rho));
      const double m = total_correlation(pair);
      EXPECT_GE(m, 0.0);
      EXPECT_LE(e, 1.0);
      if (e > 0.0) EXPECT_GT(m, 0.0);
    }
  }
}

TEST(TwoSiteMeasures, MatchAnalyticState) {
  // Oracles built from the analytic amplitudes, not from the propagated state.
  const System s(LatticeSpec::chain(2, Boundary::open));
  const BlockadeHamiltonian h(s.basis, s.graph, s.flips, {1.0, 1.0});
  propagate(h, StateVector::ground(s.basis), TimeGrid{},
            [&](std::size_t, double t, const StateVector& psi) {
              const Eigen::VectorXcd exact = two_site_exact(1.0, t);
              // Pure state a|00> + b|01> + c|10>: C = 2|a*0 - b c| = 2|b c|.
              const double c_exact = 2.0 * std::abs(exact(1) * exact(2));
              const auto pair = reduce_two_site(psi, 0, 1);
              // Eigenvalues of rho rho~ below 1e-10 are zeroed, so C itself is
              // only resolved to sqrt(1e-10).
              EXPECT_NEAR(concurrence(pair.rho), c_exact, 1e-5);
              EXPECT_NEAR(eof(concurrence(pair.rho)), eof(c_exact), 1e-8);
              // Oracle for M_c: explicit 4x4 from the analytic amplitudes.
              Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
              v(0) = exact(0);
              v(1) = exact(1);  // site 1 excited -> ge
              v(2) = exact(2);
              const PairDensityMatrix ex{projector(v), 0, 1, t};
              EXPECT_NEAR(total_correlation(pair), total_correlation(ex), 1e-8);
            });
}

TEST(PairCorrelation, RatioAndErrors) {
  EXPECT_DOUBLE_EQ(pair_correlation(0.09, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(pair_correlation(0.0, 0.3), 0.0);
  EXPECT_THROW(pair_correlation(0.1, 0.0), std::domain_error);
}

TEST(FirstPeak, Sine) {
  const auto times = TimeGrid{}.times();
  std::vector<double> v;
  for (double t : times) v.push_back(std::sin(t));
  const Peak p = first_peak(times, v);
  EXPECT_NEAR(p.t, std::numbers::pi / 2, 0.05);
  EXPECT_NEAR(p.value, 1.0, 1e-3);
}

TEST(FirstPeak, MonotoneAndShortSeriesFail) {
  const auto times = TimeGrid{}.times();
  std::vector<double> v(times.begin(), times.end());
  EXPECT_THROW(first_peak(times, v), PeakNotFound);
  std::vector<double> flat(times.size(), 0.3);
  EXPECT_THROW(first_peak(times, flat), PeakNotFound);
  EXPECT_THROW(first_peak(std::vector<double>{0, 1, 2}, std::vector<double>{0, 1, 0}),
               std::invalid_argument);
}

TEST(FirstPeak, IgnoresSingleStepWiggleInsideNeighbourhood) {
  // A local max that is beaten within three points is not a peak.
  const std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> v{0, 1, 2, 3, 2.9, 3.5, 4, 3, 2, 1, 0};
  const Peak p = first_peak(t, v);
  EXPECT_EQ(p.index, 6u);
}

TEST(SaturationAverage, ConstantAndWindow) {
  const auto times = TimeGrid{}.times();
  std::vector<double> c(times.size(), 0.37);
  const WindowAverage a = saturation_average(times, c, TimeWindow{});
  EXPECT_DOUBLE_EQ(a.mean, 0.37);
  EXPECT_EQ(a.stdev, 0.0);
  EXPECT_EQ(a.count, 201u);
  std::vector<double> ramp(times.begin(), times.end());
  EXPECT_NEAR(saturation_average(times, ramp, TimeWindow{}).mean, 20.0, 1e-12);
  EXPECT_THROW(saturation_average(times, ramp, TimeWindow{30, 40}), std::invalid_argument);
}

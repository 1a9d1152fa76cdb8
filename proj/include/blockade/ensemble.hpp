#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "blockade/basis.hpp"
#include "blockade/disorder.hpp"
#include "blockade/dynamics.hpp"
#include "blockade/hamiltonians.hpp"
#include "blockade/lattice.hpp"
#include "blockade/observables.hpp"

namespace blockade {

enum class ModelKind { blockade, longrange };

enum class Observable { pex, pee, eof_t, eof_peak, mc_t, mc_peak, spectrum };

/// all_pairs averages every pair at distance d; reference_site uses only
/// the pair (first site, first site + d).
enum class PairMode { all_pairs, reference_site };

/// per_configuration: nonlinear measures are evaluated per configuration and
/// then averaged, P_ee is a ratio of averages. averaged_state: entanglement
/// and total correlation come from the ensemble-averaged pair state, P_ee is
/// an average of per-configuration ratios.
enum class AveragingOrder { per_configuration, averaged_state };

struct ExperimentSpec {
  std::string name = "custom";
  LatticeSpec lattice = LatticeSpec::chain(16, Boundary::periodic);
  /// Chain lengths to sweep; empty means the lattice as given.
  std::vector<int> sizes;
  std::vector<ModelKind> models{ModelKind::blockade};
  /// Nearest-neighbour interaction strengths D for the long-range model.
  std::vector<double> interactions{360.0};
  std::vector<double> lambdas{3.0};
  int n_configs = 1000;
  TimeGrid grid;
  /// Pair observables (eof, mc) are sampled only up to this time; <= 0
  /// means the full grid.
  double pair_t_max = 0.0;
  std::uint64_t master_seed = 1;
  std::set<Observable> observables{Observable::pex};
  /// Pair distances; empty means every distance the lattice offers.
  std::vector<int> distances;
  PairMode pair_mode = PairMode::all_pairs;
  TimeWindow saturation{15.0, 25.0};
  AveragingOrder averaging = AveragingOrder::per_configuration;
  Backend backend = Backend::automatic;
  std::size_t basis_cap = default_basis_cap;
  std::size_t dense_cap = default_dense_cap;
  /// Abort when more than this fraction of configurations fails.
  double max_failure_fraction = 0.01;

  bool wants(Observable o) const { return observables.count(o) != 0; }
};

struct SeriesStat {
  std::vector<double> mean;
  std::vector<double> stderr_;
};

struct ProfilePoint {
  int d = 0;
  bool found = false;
  double t_peak = std::numeric_limits<double>::quiet_NaN();
  double value = std::numeric_limits<double>::quiet_NaN();
  double stderr_ = std::numeric_limits<double>::quiet_NaN();
};

struct ConfigurationFailure {
  std::uint64_t index = 0;
  std::string message;
};

struct VariantResult {
  ModelKind model = ModelKind::blockade;
  double interaction = 0.0;
  int n_sites = 0;
  double lambda = 0.0;
  std::size_t basis_dim = 0;
  int n_configs = 0;
  std::vector<double> times;
  std::vector<double> pair_times;
  SeriesStat pex;
  std::vector<int> distances;
  std::vector<SeriesStat> eof;  // per distance, on pair_times
  std::vector<SeriesStat> mc;
  std::vector<double> pee;
  std::vector<double> pee_stderr;
  std::vector<ProfilePoint> eof_peaks;
  std::vector<ProfilePoint> mc_peaks;
  SpectralData spectrum;
  std::vector<ConfigurationFailure> failures;
};

struct EnsembleResult {
  ExperimentSpec spec;
  std::vector<VariantResult> variants;
};

class EnsembleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Site pairs at a given distance for the lattice and pair mode.
inline std::vector<SitePair> pairs_at_distance(const LatticeSpec& lattice, int d,
                                               PairMode mode) {
  std::vector<SitePair> out;
  if (lattice.kind == LatticeKind::grid) {
    const int base = (lattice.rows / 2) * lattice.cols;
    for (int c = 0; c + d < lattice.cols; ++c) {
      out.push_back({base + c, base + c + d});
      if (mode == PairMode::reference_site) break;
    }
    return out;
  }
  const int n = lattice.cols;
  if (lattice.boundary == Boundary::periodic) {
    for (int j = 0; j < n; ++j) {
      out.push_back({j, (j + d) % n});
      if (mode == PairMode::reference_site) break;
    }
  } else {
    for (int j = 0; j + d < n; ++j) {
      out.push_back({j, j + d});
      if (mode == PairMode::reference_site) break;
    }
  }
  return out;
}

inline int max_pair_distance(const LatticeSpec& lattice) {
  if (lattice.kind == LatticeKind::grid) return lattice.cols - 1;
  return lattice.boundary == Boundary::periodic ? lattice.cols / 2 : lattice.cols - 1;
}

namespace detail {

/// Everything measured on one disorder configuration.
struct ConfigurationResult {
  std::vector<double> pex;
  std::vector<std::vector<double>> eof;  // [d][t]
  std::vector<std::vector<double>> mc;
  std::vector<double> joint;  // window- and pair-averaged <n_j n_k> per d
  double single = 0.0;        // window- and site-averaged <n>
  std::vector<std::vector<Matrix4c>> rho;  // pair-averaged states, averaged_state mode
};

/// Running sums over configurations, fed in configuration order.
struct Moments {
  std::vector<double> sum;
  std::vector<double> sumsq;

  void add(const std::vector<double>& v) {
    if (sum.empty()) {
      sum.assign(v.size(), 0.0);
      sumsq.assign(v.size(), 0.0);
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      sum[i] += v[i];
      sumsq[i] += v[i] * v[i];
    }
  }

  SeriesStat finish(int n) const {
    SeriesStat s;
    s.mean.resize(sum.size());
    s.stderr_.resize(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) {
      s.mean[i] = sum[i] / n;
      const double var =
          n > 1 ? std::max(0.0, (sumsq[i] - sum[i] * sum[i] / n) / (n - 1)) : 0.0;
      s.stderr_[i] = std::sqrt(var / n);
    }
    return s;
  }
};

/// Shared, read-only state for one (model, size) combination.
struct VariantContext {
  LatticeSpec lattice;
  BlockadeGraph graph;
  std::unique_ptr<Basis> basis;
  std::unique_ptr<SiteFlips> flips;
  std::vector<int> distances;
  std::vector<std::vector<SitePair>> pairs;  // per distance
  std::vector<int> pair_sites;               // sites entering P_ee's denominator
};

inline void check_bounds(double value, double upper, const char* what) {
  constexpr double tol = 1e-9;
  if (!(value >= -tol) || !(value <= upper + tol)) {
    throw NumericalError(std::string(what) + " out of range: " + std::to_string(value));
  }
}

template <Hamiltonian H>
ConfigurationResult evaluate_configuration(const ExperimentSpec& spec,
                                           const VariantContext& ctx, const H& h) {
  ConfigurationResult r;
  const std::size_t nt = spec.grid.size();
  const double pair_t_max = spec.pair_t_max > 0.0 ? spec.pair_t_max : spec.grid.t_max;
  const bool want_eof = spec.wants(Observable::eof_t) || spec.wants(Observable::eof_peak);
  const bool want_mc = spec.wants(Observable::mc_t) || spec.wants(Observable::mc_peak);
  const bool want_pee = spec.wants(Observable::pee);
  const bool averaged = spec.averaging == AveragingOrder::averaged_state;
  const std::size_t nd = ctx.distances.size();
  r.pex.reserve(nt);
  if (want_eof) r.eof.assign(nd, {});
  if (want_mc) r.mc.assign(nd, {});
  if (averaged && (want_eof || want_mc)) r.rho.assign(nd, {});
  if (want_pee) r.joint.assign(nd, 0.0);
  std::size_t window_points = 0;
  PairCorrelators corr;

  propagate(
      h, StateVector::ground(*ctx.basis), spec.grid,
      [&](std::size_t, double t, const StateVector& psi) {
        const double pex = excitation_fraction(psi);
        check_bounds(pex, 1.0, "excitation fraction");
        r.pex.push_back(pex);
        const bool pair_time = (want_eof || want_mc) && t <= pair_t_max + 1e-9;
        const bool window_time = want_pee && spec.saturation.contains(t);
        if (!pair_time && !window_time) return;
        if (pair_time) {
          corr.compute(psi, *ctx.flips);
        } else {
          corr.compute_populations(psi);
        }
        if (window_time) {
          ++window_points;
          double single = 0.0;
          for (int k : ctx.pair_sites) single += corr.occupation(k);
          r.single += single / static_cast<double>(ctx.pair_sites.size());
          for (std::size_t di = 0; di < nd; ++di) {
            double joint = 0.0;
            for (const auto& pr : ctx.pairs[di]) joint += corr.joint(pr.j, pr.k);
            r.joint[di] += joint / static_cast<double>(ctx.pairs[di].size());
          }
        }
        if (!pair_time) return;
        for (std::size_t di = 0; di < nd; ++di) {
          double e_sum = 0.0;
          double m_sum = 0.0;
          Matrix4c rho_sum = Matrix4c::Zero();
          for (const auto& pr : ctx.pairs[di]) {
            const PairDensityMatrix pair = corr.pair(pr.j, pr.k);
            if (averaged) {
              rho_sum += pair.rho;
              continue;
            }
            double e = 0.0;
            if (want_eof) {
              const double c = concurrence(pair.rho);
              e = eof(c);
              check_bounds(c, 1.0, "concurrence");
              check_bounds(e, 1.0, "entanglement of formation");
              e_sum += e;
            }
            if (want_mc) {
              const double m = total_correlation(pair);
              check_bounds(m, std::numeric_limits<double>::infinity(), "total correlation");
              if (e > 1e-8 && m <= 0.0) {
                throw NumericalError("entangled pair with vanishing total correlation");
              }
              m_sum += m;
            }
          }
          const double np = static_cast<double>(ctx.pairs[di].size());
          if (averaged) {
            r.rho[di].push_back(rho_sum / np);
          } else {
            if (want_eof) r.eof[di].push_back(e_sum / np);
            if (want_mc) r.mc[di].push_back(m_sum / np);
          }
        }
      },
      PropagationOptions{spec.backend, 1e-10, 1e-6, spec.dense_cap});

  if (want_pee) {
    if (window_points == 0) throw std::invalid_argument("saturation window outside time grid");
    r.single /= static_cast<double>(window_points);
    for (auto& j : r.joint) j /= static_cast<double>(window_points);
  }
  return r;
}

inline VariantContext make_context(const ExperimentSpec& spec, ModelKind model, int size) {
  VariantContext ctx;
  ctx.lattice = spec.lattice;
  if (size > 0) {
    if (ctx.lattice.kind != LatticeKind::chain) {
      throw std::invalid_argument("size sweeps are only defined for chains");
    }
    ctx.lattice.cols = size;
  }
  ctx.graph = build_blockade_graph(ctx.lattice);
  if (model == ModelKind::longrange) {
    if (ctx.lattice.kind != LatticeKind::chain) {
      throw std::invalid_argument("the long-range model is defined on chains only");
    }
    ctx.basis = std::make_unique<Basis>(enumerate_full(ctx.lattice.num_sites(), spec.basis_cap));
  } else {
    ctx.basis = std::make_unique<Basis>(enumerate_restricted(ctx.graph, spec.basis_cap));
  }
  ctx.flips = std::make_unique<SiteFlips>(*ctx.basis);
  const int dmax = max_pair_distance(ctx.lattice);
  if (spec.distances.empty()) {
    for (int d = 1; d <= dmax; ++d) ctx.distances.push_back(d);
  } else {
    for (int d : spec.distances) {
      if (d < 1 || d > dmax) {
        throw std::invalid_argument("pair distance " + std::to_string(d) +
                                    " not available (max " + std::to_string(dmax) + ")");
      }
      ctx.distances.push_back(d);
    }
  }
  std::set<int> sites;
  for (int d : ctx.distances) {
    ctx.pairs.push_back(pairs_at_distance(ctx.lattice, d, spec.pair_mode));
    for (const auto& pr : ctx.pairs.back()) {
      sites.insert(pr.j);
      sites.insert(pr.k);
    }
  }
  ctx.pair_sites.assign(sites.begin(), sites.end());
  return ctx;
}

inline ProfilePoint profile_point(int d, const std::vector<double>& times,
                                  const SeriesStat& series) {
  ProfilePoint pt;
  pt.d = d;
  try {
    const Peak peak = first_peak(times, series.mean);
    pt.found = true;
    pt.t_peak = peak.t;
    pt.value = peak.value;
    pt.stderr_ = series.stderr_.empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : series.stderr_[peak.index];
  } catch (const PeakNotFound&) {
  }
  return pt;
}

}  // namespace detail

inline void validate(const ExperimentSpec& spec) {
  spec.lattice.validate();
  spec.grid.validate();
  if (spec.n_configs < 1) throw std::invalid_argument("n_configs must be at least 1");
  if (spec.lambdas.empty()) throw std::invalid_argument("at least one lambda is required");
  for (double l : spec.lambdas) {
    if (!(l > 0.0)) throw std::invalid_argument("lambda must be positive or inf");
  }
  if (spec.models.empty()) throw std::invalid_argument("at least one model is required");
  for (ModelKind m : spec.models) {
    if (m == ModelKind::longrange && spec.interactions.empty()) {
      throw std::invalid_argument("long-range model needs at least one interaction strength");
    }
  }
  for (int n : spec.sizes) {
    LatticeSpec l = spec.lattice;
    l.cols = n;
    l.validate();
  }
  if (spec.saturation.end < spec.saturation.begin) {
    throw std::invalid_argument("saturation window is empty");
  }
  if (spec.wants(Observable::pee) &&
      (spec.saturation.begin > spec.grid.t_max + 1e-9 || spec.saturation.end < 0.0)) {
    throw std::invalid_argument("saturation window lies outside the time grid");
  }
}

/// Runs every (size, model, interaction, lambda) variant of the experiment.
/// Configurations are distributed over `workers` threads; their results are
/// reduced in configuration order so the output does not depend on the
/// worker count.
inline EnsembleResult run(const ExperimentSpec& spec, int workers = 1) {
  validate(spec);
  workers = std::max(1, workers);
  EnsembleResult result;
  result.spec = spec;
  std::vector<int> sizes = spec.sizes.empty() ? std::vector<int>{0} : spec.sizes;
  const std::vector<double> times = spec.grid.times();
  const double pair_t_max = spec.pair_t_max > 0.0 ? spec.pair_t_max : spec.grid.t_max;
  std::vector<double> pair_times;
  for (double t : times) {
    if (t <= pair_t_max + 1e-9) pair_times.push_back(t);
  }

  for (int size : sizes) {
    for (ModelKind model : spec.models) {
      const detail::VariantContext ctx = detail::make_context(spec, model, size);
      const std::vector<double> strengths =
          model == ModelKind::longrange ? spec.interactions : std::vector<double>{0.0};
      for (double strength : strengths) {
        for (double lambda : spec.lambdas) {
          VariantResult v;
          v.model = model;
          v.interaction = strength;
          v.n_sites = ctx.lattice.num_sites();
          v.lambda = lambda;
          v.basis_dim = ctx.basis->size();
          v.n_configs = spec.n_configs;
          v.times = times;
          v.pair_times = pair_times;
          v.distances = ctx.distances;
          const int n = ctx.lattice.num_sites();

          auto evaluate = [&](std::uint64_t index) {
            const DisorderConfiguration cfg =
                sample_configuration(n, lambda, spec.master_seed, index);
            if (model == ModelKind::longrange) {
              const LongRangeHamiltonian h(*ctx.basis, cfg.couplings, strength,
                                           ctx.lattice.boundary);
              return detail::evaluate_configuration(spec, ctx, h);
            }
            const BlockadeHamiltonian h(*ctx.basis, ctx.graph, *ctx.flips, cfg.couplings);
            return detail::evaluate_configuration(spec, ctx, h);
          };

          if (spec.wants(Observable::spectrum)) {
            const DisorderConfiguration cfg = sample_configuration(n, lambda, spec.master_seed, 0);
            if (model == ModelKind::longrange) {
              v.spectrum = spectrum_overlap(
                  LongRangeHamiltonian(*ctx.basis, cfg.couplings, strength, ctx.lattice.boundary),
                  spec.dense_cap);
            } else {
              v.spectrum = spectrum_overlap(
                  BlockadeHamiltonian(*ctx.basis, ctx.graph, *ctx.flips, cfg.couplings),
                  spec.dense_cap);
            }
          }

          const bool need_dynamics =
              spec.observables.size() > (spec.wants(Observable::spectrum) ? 1u : 0u);
          if (!need_dynamics) {
            v.n_configs = 0;
            result.variants.push_back(std::move(v));
            continue;
          }

          detail::Moments pex;
          std::vector<detail::Moments> eof_acc(ctx.distances.size());
          std::vector<detail::Moments> mc_acc(ctx.distances.size());
          std::vector<std::vector<Matrix4c>> rho_sum;
          std::vector<std::vector<double>> joints;
          std::vector<double> singles;
          int ok = 0;

          auto reduce = [&](detail::ConfigurationResult&& r) {
            ++ok;
            pex.add(r.pex);
            for (std::size_t di = 0; di < r.eof.size(); ++di) eof_acc[di].add(r.eof[di]);
            for (std::size_t di = 0; di < r.mc.size(); ++di) mc_acc[di].add(r.mc[di]);
            if (!r.rho.empty()) {
              if (rho_sum.empty()) {
                rho_sum = std::move(r.rho);
              } else {
                for (std::size_t di = 0; di < rho_sum.size(); ++di) {
                  for (std::size_t ti = 0; ti < rho_sum[di].size(); ++ti) {
                    rho_sum[di][ti] += r.rho[di][ti];
                  }
                }
              }
            }
            if (!r.joint.empty()) {
              joints.push_back(std::move(r.joint));
              singles.push_back(r.single);
            }
          };

          const auto total = static_cast<std::uint64_t>(spec.n_configs);
          const std::uint64_t chunk = static_cast<std::uint64_t>(workers) * 4;
          for (std::uint64_t begin = 0; begin < total; begin += chunk) {
            const std::uint64_t end = std::min(total, begin + chunk);
            std::vector<std::optional<detail::ConfigurationResult>> slots(end - begin);
            std::vector<std::string> errors(end - begin);
            std::atomic<std::uint64_t> next{begin};
            auto work = [&] {
              for (std::uint64_t i = next++; i < end; i = next++) {
                try {
                  slots[i - begin] = evaluate(i);
                } catch (const std::exception& e) {
                  errors[i - begin] = e.what();
                }
              }
            };
            std::vector<std::thread> pool;
            const auto extra = std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), end - begin) - 1;
            for (std::uint64_t w = 0; w < extra; ++w) pool.emplace_back(work);
            work();
            for (auto& th : pool) th.join();
            for (std::uint64_t i = begin; i < end; ++i) {
              if (slots[i - begin]) {
                reduce(std::move(*slots[i - begin]));
              } else {
                v.failures.push_back({i, errors[i - begin]});
              }
            }
            if (static_cast<double>(v.failures.size()) >
                spec.max_failure_fraction * static_cast<double>(total)) {
              const auto& f = v.failures.front();
              throw EnsembleError(std::to_string(v.failures.size()) +
                                  " configurations failed; first failure at configuration " +
                                  std::to_string(f.index) + ": " + f.message);
            }
          }
          if (ok == 0) throw EnsembleError("every configuration failed");

          v.n_configs = ok;
          v.pex = pex.finish(ok);
          const bool averaged = spec.averaging == AveragingOrder::averaged_state;
          for (std::size_t di = 0; di < ctx.distances.size(); ++di) {
            SeriesStat e;
            SeriesStat m;
            if (averaged && !rho_sum.empty()) {
              for (const Matrix4c& sum : rho_sum[di]) {
                PairDensityMatrix pair{sum / static_cast<double>(ok), 0, 1, 0.0};
                e.mean.push_back(eof(concurrence(pair.rho)));
                m.mean.push_back(total_correlation(pair));
              }
              e.stderr_.assign(e.mean.size(), std::numeric_limits<double>::quiet_NaN());
              m.stderr_.assign(m.mean.size(), std::numeric_limits<double>::quiet_NaN());
            } else {
              if (!eof_acc[di].sum.empty()) e = eof_acc[di].finish(ok);
              if (!mc_acc[di].sum.empty()) m = mc_acc[di].finish(ok);
            }
            if (spec.wants(Observable::eof_t) || spec.wants(Observable::eof_peak)) {
              v.eof.push_back(e);
              v.eof_peaks.push_back(detail::profile_point(ctx.distances[di], pair_times, e));
            }
            if (spec.wants(Observable::mc_t) || spec.wants(Observable::mc_peak)) {
              v.mc.push_back(m);
              v.mc_peaks.push_back(detail::profile_point(ctx.distances[di], pair_times, m));
            }
          }

          if (spec.wants(Observable::pee)) {
            const auto cnt = static_cast<double>(ok);
            double single = 0.0;
            for (double s : singles) single += s;
            single /= cnt;
            for (std::size_t di = 0; di < ctx.distances.size(); ++di) {
              double joint = 0.0;
              for (const auto& jv : joints) joint += jv[di];
              joint /= cnt;
              double value = 0.0;
              double var = 0.0;
              if (averaged) {
                std::vector<double> ratios;
                for (std::size_t c = 0; c < joints.size(); ++c) {
                  ratios.push_back(pair_correlation(joints[c][di], singles[c]));
                }
                for (double x : ratios) value += x;
                value /= cnt;
                for (double x : ratios) var += (x - value) * (x - value);
              } else {
                value = pair_correlation(joint, single);
                // Delta method for the ratio of means.
                for (std::size_t c = 0; c < joints.size(); ++c) {
                  const double z = joints[c][di] / (single * single) -
                                   2.0 * joint * singles[c] / (single * single * single);
                  const double zbar = joint / (single * single) -
                                      2.0 * joint * single / (single * single * single);
                  var += (z - zbar) * (z - zbar);
                }
              }
              v.pee.push_back(value);
              v.pee_stderr.push_back(ok > 1 ? std::sqrt(var / (cnt - 1.0) / cnt) : 0.0);
            }
          }
          result.variants.push_back(std::move(v));
        }
      }
    }
  }
  return result;
}

inline std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8",
          "fig9a", "fig9b", "grid2d", "spectrum"};
}

/// Experiment setups behind each reproduced figure.
inline ExperimentSpec preset(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  s.lattice = LatticeSpec::chain(16, Boundary::periodic);
  s.n_configs = 1000;
  s.master_seed = 1;
  const std::vector<double> sweep{3.0, 12.0, 48.0, lambda_infinity};
  if (name == "fig2") {
    s.lambdas = sweep;
    s.observables = {Observable::pex};
  } else if (name == "fig3") {
    s.lambdas = {3.0, 12.0, 48.0};
    s.observables = {Observable::pex, Observable::pee};
  } else if (name == "fig4") {
    s.lambdas = sweep;
    s.distances = {1};
    s.observables = {Observable::eof_t};
  } else if (name == "fig5") {
    s.lambdas = {3.0};
    s.distances = {1, 2, 3, 4};
    s.observables = {Observable::eof_t};
  } else if (name == "fig6") {
    s.lambdas = sweep;
    s.pair_t_max = 12.0;
    s.observables = {Observable::eof_peak};
  } else if (name == "fig7") {
    s.lambdas = sweep;
    s.distances = {1};
    s.observables = {Observable::mc_t};
  } else if (name == "fig8") {
    s.sizes = {16, 20};
    s.lambdas = {3.0, 48.0};
    s.pair_t_max = 12.0;
    s.observables = {Observable::mc_peak};
  } else if (name == "fig9a" || name == "fig9b") {
    s.lattice = LatticeSpec::chain(10, Boundary::open);
    s.models = {ModelKind::blockade, ModelKind::longrange};
    s.interactions = {10.0, 60.0, 360.0};
    s.lambdas = {3.0};
    s.n_configs = 200;
    s.pair_t_max = 12.0;
    s.observables = {name == "fig9a" ? Observable::eof_peak : Observable::mc_peak,
                     Observable::pee};
  } else if (name == "grid2d") {
    s.lattice = LatticeSpec::grid(5, 5);
    s.lambdas = {3.0};
    s.n_configs = 100;
    s.grid.t_max = 10.0;
    s.observables = {Observable::eof_peak, Observable::mc_peak};
  } else if (name == "spectrum") {
    s.lambdas = {lambda_infinity};
    s.n_configs = 1;
    s.observables = {Observable::spectrum};
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return s;
}

}  // namespace blockade

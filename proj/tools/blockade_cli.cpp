// Command-line front end: basis, evolve, spectrum, run, preset-list, validate.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "blockade/basis.hpp"
#include "blockade/disorder.hpp"
#include "blockade/dynamics.hpp"
#include "blockade/ensemble.hpp"
#include "blockade/hamiltonians.hpp"
#include "blockade/io.hpp"
#include "blockade/lattice.hpp"
#include "blockade/observables.hpp"
#include "blockade/validation.hpp"

namespace {

using namespace blockade;

struct LatticeOptions {
  int chain = 0;
  std::vector<int> grid;
  bool periodic = false;
  int range = 1;
  std::string metric = "manhattan";

  void add(CLI::App* app) {
    auto* c = app->add_option("--chain", chain, "chain with N sites");
    auto* g = app->add_option("--grid", grid, "open R x C grid")->expected(2);
    c->excludes(g);
    app->add_flag("--periodic", periodic, "periodic chain");
    app->add_option("--range", range, "blockade range in lattice units")->check(CLI::PositiveNumber);
    app->add_option("--metric", metric, "grid distance")->check(CLI::IsMember({"manhattan", "chebyshev"}));
  }

  LatticeSpec spec() const {
    LatticeSpec s;
    if (!grid.empty()) {
      s = LatticeSpec::grid(grid[0], grid[1], range,
                            metric == "chebyshev" ? GridMetric::chebyshev : GridMetric::manhattan);
      if (periodic) throw std::invalid_argument("grids are open; drop --periodic");
    } else if (chain > 0) {
      s = LatticeSpec::chain(chain, periodic ? Boundary::periodic : Boundary::open, range);
    } else {
      throw std::invalid_argument("one of --chain or --grid is required");
    }
    s.validate();
    return s;
  }
};

struct ModelOptions {
  double lambda = lambda_infinity;
  std::string lambda_text = "inf";
  std::uint64_t seed = 1;
  std::uint64_t index = 0;
  std::vector<double> couplings;
  std::string model = "blockade";
  double interaction = 360.0;
  std::string backend = "auto";

  void add(CLI::App* app) {
    app->add_option("--lambda", lambda_text, "Poisson mean, or inf for uniform couplings");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--index", index, "configuration index");
    app->add_option("--couplings", couplings, "explicit J_k (overrides sampling)")->delimiter(',');
    app->add_option("--model", model, "Hamiltonian")->check(CLI::IsMember({"blockade", "longrange"}));
    app->add_option("--interaction", interaction, "nearest-neighbour D for longrange");
    app->add_option("--backend", backend, "propagator")->check(CLI::IsMember({"auto", "spectral", "krylov"}));
  }

  std::vector<double> resolve_couplings(int n) {
    lambda = lambda_text == "inf" ? lambda_infinity : std::stod(lambda_text);
    if (!couplings.empty()) {
      if (couplings.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("--couplings needs exactly " + std::to_string(n) + " values");
      }
      return couplings;
    }
    return sample_configuration(n, lambda, seed, index).couplings;
  }
};

/// Builds the requested Hamiltonian and hands it to f.
template <class F>
void with_hamiltonian(const LatticeSpec& lattice, ModelOptions& m, F&& f) {
  const BlockadeGraph graph = build_blockade_graph(lattice);
  const std::vector<double> j = m.resolve_couplings(lattice.num_sites());
  if (m.model == "longrange") {
    if (lattice.kind != LatticeKind::chain) throw std::invalid_argument("longrange needs a chain");
    const Basis basis = enumerate_full(lattice.num_sites());
    f(LongRangeHamiltonian(basis, j, m.interaction, lattice.boundary));
  } else {
    const Basis basis = enumerate_restricted(graph);
    const SiteFlips flips(basis);
    f(BlockadeHamiltonian(basis, graph, flips, j));
  }
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_basis(const LatticeOptions& lo, bool list) {
  const LatticeSpec spec = lo.spec();
  const Basis basis = enumerate_restricted(build_blockade_graph(spec));
  std::cout << basis.size() << "\n";
  if (list) {
    for (std::size_t p = 0; p < basis.size(); ++p) {
      std::cout << basis.state(p).to_string(spec.num_sites()) << "\n";
    }
  }
  return 0;
}

int cmd_evolve(const LatticeOptions& lo, ModelOptions& mo, TimeGrid grid, bool per_site,
               const std::string& out_path) {
  const LatticeSpec spec = lo.spec();
  Output out(out_path);
  auto& os = out.stream();
  const int n = spec.num_sites();
  os << "t,P_ex";
  if (per_site) {
    for (int k = 0; k < n; ++k) os << ",n" << k;
  }
  os << "\n";
  PropagationOptions opt;
  opt.backend = parse_backend(mo.backend);
  with_hamiltonian(spec, mo, [&](const auto& h) {
    propagate(
        h, StateVector::ground(h.basis()), grid,
        [&](std::size_t, double t, const StateVector& psi) {
          os << format_number(t) << ',' << format_number(excitation_fraction(psi));
          if (per_site) {
            for (double x : site_occupations(psi)) os << ',' << format_number(x);
          }
          os << "\n";
        },
        opt);
  });
  return 0;
}

int cmd_spectrum(const LatticeOptions& lo, ModelOptions& mo, const std::string& out_path) {
  const LatticeSpec spec = lo.spec();
  Output out(out_path);
  auto& os = out.stream();
  os << "energy,overlap\n";
  with_hamiltonian(spec, mo, [&](const auto& h) {
    const SpectralData d = spectrum_overlap(h);
    for (std::size_t a = 0; a < d.energies.size(); ++a) {
      os << format_number(d.energies[a]) << ',' << format_number(d.overlaps[a]) << "\n";
    }
  });
  return 0;
}

int cmd_validate(int max_n) {
  const TimeGrid grid{10.0, 0.05};
  int failures = 0;
  auto report = [&](const std::string& name, double value, double tol) {
    const bool ok = value <= tol;
    if (!ok) ++failures;
    std::printf("%s  %-44s %.3e (tol %.0e)\n", ok ? "PASS" : "FAIL", name.c_str(), value, tol);
  };
  for (int n = 2; n <= max_n; ++n) {
    for (Boundary b : {Boundary::open, Boundary::periodic}) {
      if (b == Boundary::periodic && n < 3) continue;
      const LatticeSpec lattice = LatticeSpec::chain(n, b);
      const auto j = sample_configuration(n, 3.0, 11, static_cast<std::uint64_t>(n)).couplings;
      report("restricted vs full, N=" + std::to_string(n) + " " + to_string(b),
             restricted_full_deviation(lattice, j, grid), 1e-10);
    }
  }
  for (int n = 4; n <= std::min(max_n, 12); n += 2) {
    const LatticeSpec lattice = LatticeSpec::chain(n, Boundary::periodic);
    const BlockadeGraph graph = build_blockade_graph(lattice);
    const Basis basis = enumerate_restricted(graph);
    const SiteFlips flips(basis);
    const BlockadeHamiltonian h(basis, graph, flips,
                                sample_configuration(n, 3.0, 12, 0).couplings);
    report("spectral vs krylov, N=" + std::to_string(n), backend_deviation(h, grid), 1e-8);
    const ConservationDrift drift = conservation_drift(h, grid, {Backend::krylov});
    report("norm drift (krylov), N=" + std::to_string(n), drift.norm, 1e-9);
    report("energy drift (krylov), N=" + std::to_string(n), drift.energy, 1e-9);
  }
  const TwoSiteCheck two = two_site_check(1.0, TimeGrid{}, TimeWindow{0.0, 25.0});
  report("two-site analytic state", two.max_deviation, 1e-8);
  report("two-site time-averaged P_ex - 0.25", std::abs(two.window_pex - 0.25), 5e-3);
  std::printf("%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

int cmd_run(const std::string& preset_name, const std::string& config, std::optional<std::uint64_t> seed,
            std::optional<int> n_configs, const std::string& out_dir, std::optional<int> workers) {
  RunConfig rc;
  if (!config.empty()) {
    rc = parse_run_config(load_json_file(config));
    if (!preset_name.empty()) {
      throw std::invalid_argument("give either --preset or --config (a config may name a preset)");
    }
  } else if (!preset_name.empty()) {
    rc.spec = preset(preset_name);
  } else {
    throw std::invalid_argument("run needs --preset or --config");
  }
  if (seed) rc.spec.master_seed = *seed;
  if (n_configs) rc.spec.n_configs = *n_configs;
  if (!out_dir.empty()) rc.out_dir = out_dir;
  if (workers) rc.workers = *workers;
  const EnsembleResult result = run(rc.spec, rc.workers);
  for (const auto& path : write_outputs(result, rc.out_dir)) {
    std::cout << path.string() << "\n";
  }
  for (const auto& v : result.variants) {
    for (const auto& f : v.failures) {
      std::cerr << "warning: configuration " << f.index << " failed: " << f.message << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact dynamics of blockaded pseudoatom lattices"};
  app.set_version_flag("--version", BLOCKADE_VERSION);
  app.require_subcommand(1);

  LatticeOptions lattice;
  ModelOptions model;
  TimeGrid grid;
  bool list = false;
  bool per_site = false;
  std::string out;

  auto* basis = app.add_subcommand("basis", "restricted basis dimension (and states)");
  lattice.add(basis);
  basis->add_flag("--list", list, "print every basis state, site 0 first");

  LatticeOptions evolve_lattice;
  auto* evolve = app.add_subcommand("evolve", "single trajectory from the all-ground state");
  evolve_lattice.add(evolve);
  model.add(evolve);
  evolve->add_option("--t-max", grid.t_max, "final time");
  evolve->add_option("--dt", grid.dt, "output step");
  evolve->add_flag("--per-site", per_site, "also print site occupations");
  evolve->add_option("--out", out, "CSV path (default stdout)");

  LatticeOptions spectrum_lattice;
  ModelOptions spectrum_model;
  std::string spectrum_out;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and ground-state overlaps");
  spectrum_lattice.add(spectrum);
  spectrum_model.add(spectrum);
  spectrum->add_option("--out", spectrum_out, "CSV path (default stdout)");

  std::string preset_name;
  std::string config;
  std::string run_out;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_configs;
  std::optional<int> workers;
  auto* run_cmd = app.add_subcommand("run", "disorder-averaged experiment");
  run_cmd->add_option("--preset", preset_name, "named experiment")
      ->check(CLI::IsMember(preset_names()));
  run_cmd->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "master seed override");
  run_cmd->add_option("--n-configs", n_configs, "configuration count override")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run_out, "output directory");
  run_cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  app.add_subcommand("preset-list", "list experiment presets");

  int max_n = 10;
  auto* validate_cmd = app.add_subcommand("validate", "self-check battery");
  validate_cmd->add_option("--max-n", max_n, "largest chain in the full-space comparison")
      ->check(CLI::Range(2, 14));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*basis) return cmd_basis(lattice, list);
    if (*evolve) return cmd_evolve(evolve_lattice, model, grid, per_site, out);
    if (*spectrum) return cmd_spectrum(spectrum_lattice, spectrum_model, spectrum_out);
    if (*run_cmd) return cmd_run(preset_name, config, seed, n_configs, run_out, workers);
    if (app.got_subcommand("preset-list")) {
      for (const auto& name : preset_names()) std::cout << name << "\n";
      return 0;
    }
    if (*validate_cmd) return cmd_validate(max_n);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const EnsembleError& e) {
    std::cerr << "ensemble failure: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

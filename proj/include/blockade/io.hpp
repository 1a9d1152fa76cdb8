#pragma once

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blockade/ensemble.hpp"

#ifndef BLOCKADE_VERSION
#define BLOCKADE_VERSION "0.1.0"
#endif

namespace blockade {

inline constexpr int provenance_schema_version = 1;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// 12 significant digits; non-finite values as inf, -inf, nan.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Name tables for enums. Order matches the enum declarations.

inline const char* to_string(ModelKind m) { return m == ModelKind::blockade ? "blockade" : "longrange"; }

inline const char* to_string(Observable o) {
  static const char* names[] = {"pex", "pee", "eof_t", "eof_peak", "mc_t", "mc_peak", "spectrum"};
  return names[static_cast<int>(o)];
}

inline const char* to_string(Backend b) {
  static const char* names[] = {"auto", "spectral", "krylov"};
  return names[static_cast<int>(b)];
}

inline const char* to_string(PairMode m) {
  return m == PairMode::all_pairs ? "all_pairs" : "reference_site";
}

inline const char* to_string(AveragingOrder a) {
  return a == AveragingOrder::per_configuration ? "per_configuration" : "averaged_state";
}

inline const char* to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }
inline const char* to_string(LatticeKind k) { return k == LatticeKind::chain ? "chain" : "grid"; }
inline const char* to_string(GridMetric m) {
  return m == GridMetric::manhattan ? "manhattan" : "chebyshev";
}

namespace detail {

template <class E, std::size_t N>
E parse_enum(const std::string& key, const std::string& value, const E (&values)[N]) {
  std::string known;
  for (E e : values) {
    if (value == to_string(e)) return e;
    known += (known.empty() ? "" : ", ") + std::string(to_string(e));
  }
  throw ConfigError("invalid value '" + value + "' for '" + key + "' (expected one of " +
                    known + ")");
}

inline double parse_lambda(const nlohmann::json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return lambda_infinity;
    throw ConfigError("lambda must be a number or \"inf\", got \"" + s + "\"");
  }
  if (!v.is_number()) throw ConfigError("lambda must be a number or \"inf\"");
  return v.get<double>();
}

inline nlohmann::json lambda_json(double l) {
  if (std::isinf(l)) return "inf";
  return l;
}

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("wrong type for '" + key + "': " + v.dump());
  }
}

}  // namespace detail

inline Observable parse_observable(const std::string& s) {
  return detail::parse_enum<Observable>("observables", s,
                                        {Observable::pex, Observable::pee, Observable::eof_t,
                                         Observable::eof_peak, Observable::mc_t,
                                         Observable::mc_peak, Observable::spectrum});
}

inline Backend parse_backend(const std::string& s) {
  return detail::parse_enum<Backend>("backend", s,
                                     {Backend::automatic, Backend::spectral, Backend::krylov});
}

/// The full spec as flat JSON; keys are exactly those accepted by
/// apply_config.
inline nlohmann::json spec_to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["lattice"] = to_string(s.lattice.kind);
  j["rows"] = s.lattice.rows;
  j["cols"] = s.lattice.cols;
  j["boundary"] = to_string(s.lattice.boundary);
  j["blockade_range"] = s.lattice.blockade_range;
  j["metric"] = to_string(s.lattice.metric);
  j["sizes"] = s.sizes;
  nlohmann::json models = nlohmann::json::array();
  for (ModelKind m : s.models) models.push_back(to_string(m));
  j["models"] = models;
  j["interactions"] = s.interactions;
  nlohmann::json lambdas = nlohmann::json::array();
  for (double l : s.lambdas) lambdas.push_back(detail::lambda_json(l));
  j["lambdas"] = lambdas;
  j["n_configs"] = s.n_configs;
  j["t_max"] = s.grid.t_max;
  j["dt"] = s.grid.dt;
  j["pair_t_max"] = s.pair_t_max;
  j["seed"] = s.master_seed;
  nlohmann::json obs = nlohmann::json::array();
  for (Observable o : s.observables) obs.push_back(to_string(o));
  j["observables"] = obs;
  j["distances"] = s.distances;
  j["pair_mode"] = to_string(s.pair_mode);
  j["saturation_begin"] = s.saturation.begin;
  j["saturation_end"] = s.saturation.end;
  j["averaging"] = to_string(s.averaging);
  j["backend"] = to_string(s.backend);
  j["basis_cap"] = s.basis_cap;
  j["dense_cap"] = s.dense_cap;
  j["max_failure_fraction"] = s.max_failure_fraction;
  return j;
}

/// Overwrites fields of `s` from a flat JSON object. Unknown keys are errors.
/// "preset", "out" and "workers" are run-level keys handled by
/// parse_run_config and are rejected here.
inline void apply_config(const nlohmann::json& j, ExperimentSpec& s) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  using detail::get_as;
  for (const auto& [key, v] : j.items()) {
    if (key == "name") {
      s.name = get_as<std::string>(v, key);
    } else if (key == "lattice") {
      s.lattice.kind = detail::parse_enum<LatticeKind>(key, get_as<std::string>(v, key),
                                                       {LatticeKind::chain, LatticeKind::grid});
      if (s.lattice.kind == LatticeKind::chain) s.lattice.rows = 1;
    } else if (key == "n_sites") {
      s.lattice.kind = LatticeKind::chain;
      s.lattice.rows = 1;
      s.lattice.cols = get_as<int>(v, key);
    } else if (key == "rows") {
      s.lattice.rows = get_as<int>(v, key);
    } else if (key == "cols") {
      s.lattice.cols = get_as<int>(v, key);
    } else if (key == "boundary") {
      s.lattice.boundary = detail::parse_enum<Boundary>(key, get_as<std::string>(v, key),
                                                        {Boundary::open, Boundary::periodic});
    } else if (key == "blockade_range") {
      s.lattice.blockade_range = get_as<int>(v, key);
    } else if (key == "metric") {
      s.lattice.metric = detail::parse_enum<GridMetric>(
          key, get_as<std::string>(v, key), {GridMetric::manhattan, GridMetric::chebyshev});
    } else if (key == "sizes") {
      s.sizes = get_as<std::vector<int>>(v, key);
    } else if (key == "models") {
      s.models.clear();
      for (const auto& m : get_as<std::vector<std::string>>(v, key)) {
        s.models.push_back(detail::parse_enum<ModelKind>(
            key, m, {ModelKind::blockade, ModelKind::longrange}));
      }
    } else if (key == "interactions") {
      s.interactions = get_as<std::vector<double>>(v, key);
    } else if (key == "lambdas") {
      if (!v.is_array()) throw ConfigError("'lambdas' must be an array");
      s.lambdas.clear();
      for (const auto& l : v) s.lambdas.push_back(detail::parse_lambda(l));
    } else if (key == "n_configs") {
      s.n_configs = get_as<int>(v, key);
    } else if (key == "t_max") {
      s.grid.t_max = get_as<double>(v, key);
    } else if (key == "dt") {
      s.grid.dt = get_as<double>(v, key);
    } else if (key == "pair_t_max") {
      s.pair_t_max = get_as<double>(v, key);
    } else if (key == "seed") {
      s.master_seed = get_as<std::uint64_t>(v, key);
    } else if (key == "observables") {
      s.observables.clear();
      for (const auto& o : get_as<std::vector<std::string>>(v, key)) {
        s.observables.insert(parse_observable(o));
      }
    } else if (key == "distances") {
      s.distances = get_as<std::vector<int>>(v, key);
    } else if (key == "pair_mode") {
      s.pair_mode = detail::parse_enum<PairMode>(key, get_as<std::string>(v, key),
                                                 {PairMode::all_pairs, PairMode::reference_site});
    } else if (key == "saturation_begin") {
      s.saturation.begin = get_as<double>(v, key);
    } else if (key == "saturation_end") {
      s.saturation.end = get_as<double>(v, key);
    } else if (key == "averaging") {
      s.averaging = detail::parse_enum<AveragingOrder>(
          key, get_as<std::string>(v, key),
          {AveragingOrder::per_configuration, AveragingOrder::averaged_state});
    } else if (key == "backend") {
      s.backend = parse_backend(get_as<std::string>(v, key));
    } else if (key == "basis_cap") {
      s.basis_cap = get_as<std::size_t>(v, key);
    } else if (key == "dense_cap") {
      s.dense_cap = get_as<std::size_t>(v, key);
    } else if (key == "max_failure_fraction") {
      s.max_failure_fraction = get_as<double>(v, key);
    } else {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }
}

struct RunConfig {
  ExperimentSpec spec;
  std::string out_dir = ".";
  int workers = 1;
};

/// Flat JSON: an optional "preset" seeds the spec, every other key overrides.
inline RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig rc;
  nlohmann::json rest = j;
  if (j.contains("preset")) {
    rc.spec = preset(detail::get_as<std::string>(j["preset"], "preset"));
    rest.erase("preset");
  }
  if (j.contains("out")) {
    rc.out_dir = detail::get_as<std::string>(j["out"], "out");
    rest.erase("out");
  }
  if (j.contains("workers")) {
    rc.workers = detail::get_as<int>(j["workers"], "workers");
    if (rc.workers < 1) throw ConfigError("'workers' must be at least 1");
    rest.erase("workers");
  }
  apply_config(rest, rc.spec);
  return rc;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

/// FNV-1a over the canonical spec dump, as 16 hex digits.
inline std::string spec_hash(const ExperimentSpec& s) {
  const std::string text = spec_to_json(s).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct CsvTable {
  std::string name;  // file name
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(columns);
    for (const auto& r : rows) line(r);
    return out;
  }
};

namespace detail {

inline std::vector<std::string> variant_key(const VariantResult& v) {
  return {to_string(v.model), format_number(v.interaction), std::to_string(v.n_sites),
          format_number(v.lambda)};
}

inline std::string group_suffix(const VariantResult& v) {
  std::string s = std::string("_") + to_string(v.model);
  if (v.model == ModelKind::longrange) s += "_D" + format_number(v.interaction);
  return s + "_N" + std::to_string(v.n_sites);
}

}  // namespace detail

/// Every output table of an ensemble run, in a fixed order. Column sets:
///   <name>_pex.csv       t,lambda,pex_mean,pex_stderr
///   <name>_pee.csv       model,interaction,n_sites,lambda,d,pee,pee_stderr
///   <name>_eof_t.csv     model,interaction,n_sites,lambda,d,t,mean,stderr
///   <name>_mc_t.csv      (same as eof_t)
///   <name>_eof_peak.csv  model,interaction,n_sites,lambda,d,t_peak,value,stderr
///   <name>_mc_peak.csv   (same as eof_peak)
///   <name>_spectrum.csv  model,interaction,n_sites,lambda,energy,overlap
/// When a run spans several (model, interaction, size) groups the P_ex table
/// is split per group with a suffix such as _longrange_D360_N10.
inline std::vector<CsvTable> result_tables(const EnsembleResult& r) {
  const ExperimentSpec& s = r.spec;
  const std::string& base = s.name;
  std::vector<CsvTable> tables;
  const std::vector<std::string> key_cols{"model", "interaction", "n_sites", "lambda"};
  auto with_key = [&](std::vector<std::string> extra) {
    std::vector<std::string> c = key_cols;
    c.insert(c.end(), extra.begin(), extra.end());
    return c;
  };

  if (s.wants(Observable::pex)) {
    std::set<std::string> groups;
    for (const auto& v : r.variants) groups.insert(detail::group_suffix(v));
    const bool split = groups.size() > 1;
    std::vector<std::string> order;
    for (const auto& v : r.variants) {
      const std::string g = detail::group_suffix(v);
      if (std::find(order.begin(), order.end(), g) == order.end()) order.push_back(g);
    }
    for (const auto& g : order) {
      CsvTable t{base + "_pex" + (split ? g : "") + ".csv",
                 {"t", "lambda", "pex_mean", "pex_stderr"},
                 {}};
      for (const auto& v : r.variants) {
        if (detail::group_suffix(v) != g) continue;
        for (std::size_t i = 0; i < v.pex.mean.size(); ++i) {
          t.rows.push_back({format_number(v.times[i]), format_number(v.lambda),
                            format_number(v.pex.mean[i]), format_number(v.pex.stderr_[i])});
        }
      }
      tables.push_back(std::move(t));
    }
  }

  if (s.wants(Observable::pee)) {
    CsvTable t{base + "_pee.csv", with_key({"d", "pee", "pee_stderr"}), {}};
    for (const auto& v : r.variants) {
      for (std::size_t i = 0; i < v.pee.size(); ++i) {
        auto row = detail::variant_key(v);
        row.push_back(std::to_string(v.distances[i]));
        row.push_back(format_number(v.pee[i]));
        row.push_back(format_number(v.pee_stderr[i]));
        t.rows.push_back(std::move(row));
      }
    }
    tables.push_back(std::move(t));
  }

  auto series_table = [&](const std::string& suffix, auto member) {
    CsvTable t{base + suffix, with_key({"d", "t", "mean", "stderr"}), {}};
    for (const auto& v : r.variants) {
      const auto& all = v.*member;
      for (std::size_t di = 0; di < all.size(); ++di) {
        for (std::size_t i = 0; i < all[di].mean.size(); ++i) {
          auto row = detail::variant_key(v);
          row.push_back(std::to_string(v.distances[di]));
          row.push_back(format_number(v.pair_times[i]));
          row.push_back(format_number(all[di].mean[i]));
          row.push_back(format_number(all[di].stderr_[i]));
          t.rows.push_back(std::move(row));
        }
      }
    }
    tables.push_back(std::move(t));
  };
  auto peak_table = [&](const std::string& suffix, auto member) {
    CsvTable t{base + suffix, with_key({"d", "t_peak", "value", "stderr"}), {}};
    for (const auto& v : r.variants) {
      for (const ProfilePoint& p : v.*member) {
        auto row = detail::variant_key(v);
        row.push_back(std::to_string(p.d));
        row.push_back(format_number(p.t_peak));
        row.push_back(format_number(p.value));
        row.push_back(format_number(p.stderr_));
        t.rows.push_back(std::move(row));
      }
    }
    tables.push_back(std::move(t));
  };

  if (s.wants(Observable::eof_t)) series_table("_eof_t.csv", &VariantResult::eof);
  if (s.wants(Observable::mc_t)) series_table("_mc_t.csv", &VariantResult::mc);
  if (s.wants(Observable::eof_peak)) peak_table("_eof_peak.csv", &VariantResult::eof_peaks);
  if (s.wants(Observable::mc_peak)) peak_table("_mc_peak.csv", &VariantResult::mc_peaks);

  if (s.wants(Observable::spectrum)) {
    CsvTable t{base + "_spectrum.csv", with_key({"energy", "overlap"}), {}};
    for (const auto& v : r.variants) {
      for (std::size_t a = 0; a < v.spectrum.energies.size(); ++a) {
        auto row = detail::variant_key(v);
        row.push_back(format_number(v.spectrum.energies[a]));
        row.push_back(format_number(v.spectrum.overlaps[a]));
        t.rows.push_back(std::move(row));
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Sidecar metadata for one output file. The timestamp is not part of the
/// hashed spec, so reruns differ only in that field.
inline nlohmann::json provenance(const CsvTable& table, const EnsembleResult& r) {
  nlohmann::json j;
  j["schema_version"] = provenance_schema_version;
  j["file"] = table.name;
  j["columns"] = table.columns;
  j["spec"] = spec_to_json(r.spec);
  j["spec_hash"] = spec_hash(r.spec);
  j["seed"] = r.spec.master_seed;
  j["version"] = BLOCKADE_VERSION;
  j["timestamp"] = utc_timestamp();
  nlohmann::json variants = nlohmann::json::array();
  for (const auto& v : r.variants) {
    nlohmann::json f = nlohmann::json::array();
    for (const auto& e : v.failures) f.push_back({{"index", e.index}, {"message", e.message}});
    variants.push_back({{"model", to_string(v.model)},
                        {"interaction", v.interaction},
                        {"n_sites", v.n_sites},
                        {"lambda", detail::lambda_json(v.lambda)},
                        {"basis_dim", v.basis_dim},
                        {"n_configs_used", v.n_configs},
                        {"failures", f}});
  }
  j["variants"] = variants;
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

/// Writes every table plus its <file>.json sidecar; returns the CSV paths.
inline std::vector<std::filesystem::path> write_outputs(const EnsembleResult& r,
                                                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const CsvTable& t : result_tables(r)) {
    const auto path = dir / t.name;
    write_text(path, t.str());
    write_text(dir / (t.name + ".json"), provenance(t, r).dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

}  // namespace blockade

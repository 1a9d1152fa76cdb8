#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "blockade/io.hpp"

using namespace blockade;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("blockade_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

/// Shrinks a preset to a few configurations on a short grid.
ExperimentSpec quick(const std::string& name) {
  ExperimentSpec s = preset(name);
  s.n_configs = 2;
  s.grid = TimeGrid{2.0, 0.05};
  s.pair_t_max = 0.0;
  s.saturation = TimeWindow{1.0, 2.0};
  if (s.lattice.kind == LatticeKind::chain && s.lattice.num_sites() > 10) s.lattice.cols = 10;
  if (!s.sizes.empty()) s.sizes = {8, 10};
  if (s.lattice.kind == LatticeKind::grid) s.lattice = LatticeSpec::grid(3, 4);
  return s;
}

struct Command {
  int status = -1;
  std::string out;
};

Command sh(const std::string& args) {
  Command c;
  FILE* pipe = popen((std::string(BLOCKADE_CLI) + " " + args + " 2>/dev/null").c_str(), "r");
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) c.out.append(buf, n);
  const int raw = pclose(pipe);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

}  // namespace

TEST(Format, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(0.15000000000000002), "0.15");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(2207), "2207");
  EXPECT_EQ(format_number(lambda_infinity), "inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(1.25e-20), "1.25e-20");
}

TEST(Config, PresetWithOverrides) {
  const RunConfig rc = parse_run_config(nlohmann::json::parse(R"({
    "preset": "fig2", "n_configs": 7, "lambdas": [3, "inf"], "seed": 99,
    "out": "somewhere", "workers": 3, "t_max": 10
  })"));
  EXPECT_EQ(rc.spec.name, "fig2");
  EXPECT_EQ(rc.spec.n_configs, 7);
  EXPECT_EQ(rc.spec.lambdas, (std::vector<double>{3.0, lambda_infinity}));
  EXPECT_EQ(rc.spec.master_seed, 99u);
  EXPECT_EQ(rc.spec.grid.t_max, 10.0);
  EXPECT_EQ(rc.out_dir, "somewhere");
  EXPECT_EQ(rc.workers, 3);
}

TEST(Config, UnknownKeysAndBadValuesAreErrors) {
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"n_config": 3})")), ConfigError);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"boundary": "twisted"})")), ConfigError);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"n_configs": "many"})")), ConfigError);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"lambdas": ["huge"]})")), ConfigError);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"observables": ["pex", "x"]})")),
               ConfigError);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"preset": "fig99"})")),
               std::invalid_argument);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"([1, 2])")), ConfigError);
}

TEST(Config, SpecJsonRoundTrips) {
  for (const auto& name : preset_names()) {
    const ExperimentSpec s = preset(name);
    ExperimentSpec back;
    apply_config(spec_to_json(s), back);
    EXPECT_EQ(spec_to_json(back).dump(), spec_to_json(s).dump()) << name;
    EXPECT_EQ(spec_hash(back), spec_hash(s));
  }
  ExperimentSpec a = preset("fig2");
  ExperimentSpec b = a;
  b.master_seed = 2;
  EXPECT_NE(spec_hash(a), spec_hash(b));
}

TEST(Outputs, Fig2SchemaAndProvenance) {
  ExperimentSpec s = quick("fig2");
  s.master_seed = 7;
  const fs::path dir = scratch("fig2");
  const auto written = write_outputs(run(s), dir);
  ASSERT_EQ(written.size(), 1u);
  EXPECT_EQ(written[0].filename(), "fig2_pex.csv");
  EXPECT_EQ(first_line(written[0]), "t,lambda,pex_mean,pex_stderr");
  const auto meta = nlohmann::json::parse(read_file(dir / "fig2_pex.csv.json"));
  for (const char* key : {"schema_version", "spec", "seed", "version", "spec_hash", "timestamp"}) {
    EXPECT_TRUE(meta.contains(key)) << key;
  }
  EXPECT_EQ(meta["seed"], 7);
  EXPECT_EQ(meta["spec_hash"], spec_hash(s));
  // 4 lambdas x 41 grid points + header
  const std::string text = read_file(written[0]);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 4 * 41);
  fs::remove_all(dir);
}

TEST(Outputs, EveryPresetHasItsColumns) {
  const std::vector<std::string> peak{"model", "interaction", "n_sites", "lambda",
                                      "d",     "t_peak",      "value",   "stderr"};
  const std::vector<std::string> series{"model", "interaction", "n_sites", "lambda",
                                        "d",     "t",           "mean",    "stderr"};
  const std::map<std::string, std::map<std::string, std::vector<std::string>>> expected{
      {"fig2", {{"fig2_pex.csv", {"t", "lambda", "pex_mean", "pex_stderr"}}}},
      {"fig3",
       {{"fig3_pex.csv", {"t", "lambda", "pex_mean", "pex_stderr"}},
        {"fig3_pee.csv", {"model", "interaction", "n_sites", "lambda", "d", "pee", "pee_stderr"}}}},
      {"fig4", {{"fig4_eof_t.csv", series}}},
      {"fig5", {{"fig5_eof_t.csv", series}}},
      {"fig6", {{"fig6_eof_peak.csv", peak}}},
      {"fig7", {{"fig7_mc_t.csv", series}}},
      {"fig8", {{"fig8_mc_peak.csv", peak}}},
      {"fig9a",
       {{"fig9a_eof_peak.csv", peak},
        {"fig9a_pee.csv", {"model", "interaction", "n_sites", "lambda", "d", "pee", "pee_stderr"}}}},
      {"fig9b",
       {{"fig9b_mc_peak.csv", peak},
        {"fig9b_pee.csv", {"model", "interaction", "n_sites", "lambda", "d", "pee", "pee_stderr"}}}},
      {"grid2d", {{"grid2d_eof_peak.csv", peak}, {"grid2d_mc_peak.csv", peak}}},
      {"spectrum",
       {{"spectrum_spectrum.csv", {"model", "interaction", "n_sites", "lambda", "energy", "overlap"}}}},
  };
  for (const auto& name : preset_names()) {
    const auto tables = result_tables(run(quick(name)));
    const auto& want = expected.at(name);
    EXPECT_EQ(tables.size(), want.size()) << name;
    for (const auto& t : tables) {
      ASSERT_TRUE(want.count(t.name)) << name << ": unexpected " << t.name;
      EXPECT_EQ(t.columns, want.at(t.name)) << t.name;
      EXPECT_FALSE(t.rows.empty()) << t.name;
      for (const auto& row : t.rows) ASSERT_EQ(row.size(), t.columns.size()) << t.name;
    }
  }
}

TEST(Cli, BasisDimension) {
  const Command c = sh("basis --chain 16 --periodic");
  EXPECT_EQ(c.status, 0);
  EXPECT_EQ(c.out, "2207\n");
  EXPECT_EQ(sh("basis --grid 3 3").out, "63\n");
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(sh("").status, 2);
  EXPECT_EQ(sh("frobnicate").status, 2);
  EXPECT_EQ(sh("basis --bogus").status, 2);
  EXPECT_EQ(sh("basis").status, 2);
  EXPECT_EQ(sh("run --preset fig99").status, 2);
  EXPECT_EQ(sh("basis --chain 1").status, 2);
}

TEST(Cli, NumericalFailureExitsOne) {
  const fs::path dir = scratch("cli_fail");
  std::ofstream(dir / "cfg.json") << R"({"n_sites": 8, "n_configs": 3, "t_max": 1,
    "backend": "spectral", "dense_cap": 5, "observables": ["pex"]})";
  EXPECT_EQ(sh("run --config " + (dir / "cfg.json").string() + " --out " + dir.string()).status, 1);
  fs::remove_all(dir);
}

TEST(Cli, RunIsByteIdenticalAcrossWorkerCounts) {
  const fs::path dir = scratch("cli_workers");
  std::ofstream(dir / "cfg.json") << R"({"name": "det", "n_sites": 10, "n_configs": 9,
    "t_max": 3, "lambdas": [3, 48], "saturation_begin": 2, "saturation_end": 3,
    "observables": ["pex", "pee", "eof_peak", "mc_t"]})";
  const std::string cfg = (dir / "cfg.json").string();
  ASSERT_EQ(sh("run --config " + cfg + " --workers 1 --out " + (dir / "a").string()).status, 0);
  ASSERT_EQ(sh("run --config " + cfg + " --workers 4 --out " + (dir / "b").string()).status, 0);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    if (entry.path().extension() != ".csv") continue;
    EXPECT_EQ(read_file(entry.path()), read_file(dir / "b" / entry.path().filename()))
        << entry.path().filename();
    ++compared;
  }
  EXPECT_EQ(compared, 4);
  fs::remove_all(dir);
}

TEST(Cli, EvolveAndSpectrum) {
  const Command e = sh("evolve --chain 2 --t-max 0.1 --dt 0.05");
  EXPECT_EQ(e.status, 0);
  EXPECT_EQ(e.out.substr(0, e.out.find('\n')), "t,P_ex");
  const Command s = sh("spectrum --chain 2");
  EXPECT_EQ(s.status, 0);
  EXPECT_EQ(s.out.substr(0, s.out.find('\n')), "energy,overlap");
  EXPECT_EQ(sh("preset-list").out.substr(0, 5), "fig2\n");
}

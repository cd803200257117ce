#include "wwlab/bundled.hpp"
#include "wwlab/runner.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wwlab;
namespace fs = std::filesystem;

namespace {

struct Proc {
  int code = -1;
  std::string out;
};

Proc run_cli(const std::string& args) {
  const std::string cmd = std::string(WWLAB_CLI_PATH) + " " + args + " 2>&1";
  Proc p;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return p;
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, k);
  const int status = pclose(f);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("wwlab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

json vdc_config(int n, int m) {
  return {{"schema_version", 1},
          {"name", "vdc-bad"},
          {"algebra", {{"dim", 1}}},
          {"dynamics", {{"kind", "cyclic_shift"}}},
          {"experiment", "vdc"},
          {"params", {{"instances", 3}, {"n", n}, {"m", m}}}};
}

}  // namespace

TEST(Config, RoundTripForEveryBundledScenario) {
  for (const auto& b : bundled_scenarios()) {
    const ScenarioConfig c = parse_config(std::string(b.json));
    const ScenarioConfig c2 = parse_config(to_json(c).dump());
    EXPECT_TRUE(c == c2) << b.name;
    EXPECT_EQ(to_json(c), to_json(c2)) << b.name;
  }
}

TEST(Config, SchemaErrors) {
  EXPECT_THROW(parse_config("{not json"), SchemaError);
  json j = vdc_config(4, 1);
  j["bogus"] = 1;
  EXPECT_THROW(config_from_json(j), SchemaError);
  EXPECT_THROW(config_from_json(vdc_config(4, 4)), SchemaError);
  json k = vdc_config(4, 1);
  k["schema_version"] = 99;
  EXPECT_THROW(config_from_json(k), SchemaError);
  EXPECT_NO_THROW(config_from_json(vdc_config(4, 3)));
}

TEST(Runner, VdcFuzzProducesThousandRows) {
  RunOptions opt;
  opt.write = false;
  const RunResult r = run_scenario(bundled_config("vdc-fuzz-1000"), opt);
  EXPECT_EQ(r.exit_code, kExitOk) << r.error;
  std::size_t lines = 0;
  for (char ch : r.csv) lines += ch == '\n';
  EXPECT_EQ(lines, 1001u);
  EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')), "n,m,dim,gap_min_eig,lhs,rhs,seed");
}

TEST(Runner, HypothesisErrorMapsToExit3) {
  json j = {{"schema_version", 1},
            {"name", "t6-channel"},
            {"algebra", {{"dim", 2}}},
            {"dynamics", {{"kind", "random_kraus"}, {"terms", 2}, {"seed", 1}}},
            {"observable", {{"kind", "random_hermitian"}, {"seed", 2}}},
            {"experiment", "theorem6"},
            {"params", {{"N", 20}, {"m_sweep", {0, 2}}, {"lambda_grid", {{"size", 8}}}}}};
  RunOptions opt;
  opt.write = false;
  const RunResult r = run_scenario(config_from_json(j), opt);
  EXPECT_EQ(r.exit_code, kExitHypothesis);
  EXPECT_NE(r.error.find("homomorphism"), std::string::npos);
}

TEST(Cli, ListShowsEveryBundledScenario) {
  const Proc p = run_cli("list");
  EXPECT_EQ(p.code, 0);
  for (const auto& b : bundled_scenarios()) EXPECT_NE(p.out.find(b.name), std::string::npos) << b.name;
}

TEST(Cli, ShowPrintsParsableConfig) {
  const Proc p = run_cli("show classical-q12");
  ASSERT_EQ(p.code, 0);
  EXPECT_TRUE(parse_config(p.out) == bundled_config("classical-q12"));
}

TEST(Cli, ClassicalScenarioExitsZero) {
  TempDir t;
  const Proc p = run_cli("run classical-q12 --out " + t.path().string());
  EXPECT_EQ(p.code, 0) << p.out;
  const fs::path dir = t.path() / "classical-q12" / "theorem6";
  ASSERT_TRUE(fs::exists(dir / "report.json"));
  ASSERT_TRUE(fs::exists(dir / "table.csv"));
  ASSERT_TRUE(fs::exists(dir / "meta.json"));
  const json rep = json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(rep["verdict"], "WW");
  EXPECT_TRUE(rep["chain_holds"].get<bool>());
}

TEST(Cli, VdcOutOfRangeExitsTwo) {
  TempDir t;
  const fs::path cfg = t.path() / "bad.json";
  std::ofstream(cfg) << vdc_config(4, 4).dump();
  const Proc p = run_cli("run " + cfg.string() + " --out " + (t.path() / "out").string());
  EXPECT_EQ(p.code, 2) << p.out;
}

TEST(Cli, UnknownFieldAndBadArgumentsExitTwo) {
  TempDir t;
  json j = vdc_config(4, 1);
  j["extra"] = true;
  const fs::path cfg = t.path() / "bad.json";
  std::ofstream(cfg) << j.dump();
  EXPECT_EQ(run_cli("run " + cfg.string() + " --out " + (t.path() / "out").string()).code, 2);
  EXPECT_EQ(run_cli("run no-such-scenario").code, 2);
  EXPECT_EQ(run_cli("run classical-q12 --threads 0").code, 2);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
}

TEST(Cli, VdcFuzzRerunIsByteIdentical) {
  TempDir a, b;
  ASSERT_EQ(run_cli("run vdc-fuzz-1000 --out " + a.path().string()).code, 0);
  ASSERT_EQ(run_cli("run vdc-fuzz-1000 --threads 1 --out " + b.path().string()).code, 0);
  const std::string ca = slurp(a.path() / "vdc-fuzz-1000" / "vdc" / "table.csv");
  EXPECT_EQ(ca, slurp(b.path() / "vdc-fuzz-1000" / "vdc" / "table.csv"));
  EXPECT_EQ(slurp(a.path() / "vdc-fuzz-1000" / "vdc" / "report.json"),
            slurp(b.path() / "vdc-fuzz-1000" / "vdc" / "report.json"));
  std::size_t lines = 0;
  for (char ch : ca) lines += ch == '\n';
  EXPECT_EQ(lines, 1001u);
}

TEST(Cli, SeedOverrideChangesRandomScenario) {
  TempDir a, b;
  ASSERT_EQ(run_cli("run rotation-spectral --out " + a.path().string()).code, 0);
  ASSERT_EQ(run_cli("run rotation-spectral --seed-override 99 --out " + b.path().string()).code, 0);
  EXPECT_NE(slurp(a.path() / "rotation-spectral" / "spectral" / "table.csv"),
            slurp(b.path() / "rotation-spectral" / "spectral" / "table.csv"));
}

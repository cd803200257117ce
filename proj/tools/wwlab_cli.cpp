// wwlab: run scenario files or bundled scenarios and write reports.
//
//   wwlab run <config.json | bundled-name>... [--out DIR] [--seed-override S] [--threads T] [--strict]
//   wwlab list
//   wwlab show <bundled-name>

#include "wwlab/wwlab.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

wwlab::ScenarioConfig load(const std::string& arg) {
  if (const auto* b = wwlab::find_bundled(arg)) return wwlab::parse_config(std::string(b->json));
  std::ifstream in(arg);
  if (!in) throw wwlab::SchemaError("cannot open config '" + arg + "' (and no bundled scenario has that name)");
  std::stringstream ss;
  ss << in.rdbuf();
  return wwlab::parse_config(ss.str());
}

int run(const std::vector<std::string>& targets, const std::string& out, std::optional<std::uint64_t> seed, int threads,
        bool strict) {
  std::vector<std::string> names = targets;
  if (names.size() == 1 && names.front() == "all") {
    names.clear();
    for (const auto& s : wwlab::bundled_scenarios()) names.emplace_back(s.name);
  }
  std::vector<wwlab::ScenarioConfig> configs;
  for (const auto& n : names) {
    try {
      configs.push_back(load(n));
      if (seed) wwlab::override_seeds(configs.back(), *seed);
    } catch (const wwlab::SchemaError& e) {
      std::cerr << n << ": schema error: " << e.what() << '\n';
      return wwlab::kExitSchema;
    }
  }

  threads = std::max(1, threads);
  const int jobs = std::min<int>(threads, static_cast<int>(configs.size()));
  wwlab::set_default_threads(std::max(1, threads / std::max(1, jobs)));

  std::vector<wwlab::RunResult> results(configs.size());
  std::mutex print;
  wwlab::RunOptions opt;
  opt.out = out;
  opt.strict = strict;
  auto job = [&](std::size_t i) {
    results[i] = wwlab::run_scenario(configs[i], opt);
    const auto& r = results[i];
    std::lock_guard lock(print);
    std::cout << r.scenario << '/' << r.experiment << ": exit " << r.exit_code << "  -> " << r.dir.string() << '\n';
    if (!r.error.empty()) std::cout << "  error: " << r.error << '\n';
    for (const auto& f : r.failures) std::cout << "  failed: " << f << '\n';
    for (const auto& w : r.warnings) std::cout << "  warning: " << w << '\n';
  };
  if (jobs <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) job(i);
  } else {
    const int inner = wwlab::default_threads();
    wwlab::set_default_threads(jobs);
    wwlab::parallel_for(configs.size(), [&](std::size_t i) { job(i); });
    wwlab::set_default_threads(inner);
  }
  int code = wwlab::kExitOk;
  for (const auto& r : results) code = std::max(code, r.exit_code);
  return code;
}

void list() {
  std::printf("%-22s %-8s %s\n", "name", "runtime", "exercises");
  for (const auto& s : wwlab::bundled_scenarios())
    std::printf("%-22.*s %-8.*s %.*s\n", static_cast<int>(s.name.size()), s.name.data(),
                static_cast<int>(s.runtime.size()), s.runtime.data(), static_cast<int>(s.exercises.size()),
                s.exercises.data());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wwlab: weighted ergodic averages on finite von Neumann algebras"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run scenario configs or bundled scenario names ('all' runs every bundled one)");
  std::vector<std::string> targets;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool strict = false;
  run_cmd->add_option("config", targets, "config file or bundled scenario name")->required();
  run_cmd->add_option("--out", out, "output directory");
  run_cmd->add_option("--seed-override", seed, "replace every seed in the config");
  run_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--strict", strict, "treat warnings as failures");

  auto* list_cmd = app.add_subcommand("list", "list bundled scenarios");
  auto* show_cmd = app.add_subcommand("show", "print the config of a bundled scenario");
  std::string show_name;
  show_cmd->add_option("name", show_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : wwlab::kExitSchema;
  }

  if (*list_cmd) {
    list();
    return 0;
  }
  if (*show_cmd) {
    try {
      std::cout << wwlab::to_json(wwlab::bundled_config(show_name)).dump(2) << '\n';
    } catch (const wwlab::SchemaError& e) {
      std::cerr << e.what() << '\n';
      return wwlab::kExitSchema;
    }
    return 0;
  }
  return run(targets, out, seed, threads, strict);
}

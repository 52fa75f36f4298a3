#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dpplab/experiments.hpp"

// Exit codes: 0 all criteria passed, 1 a criterion failed, 2 usage error,
// 3 numerical failure.
int main(int argc, char** argv) {
  CLI::App app{"dpplab: numerical experiments on canonical determinantal point processes"};
  app.require_subcommand(1);

  std::string experiment, config_path, out_dir = "out";
  std::uint64_t seed = 0;
  int replicas = 0;
  CLI::App* run = app.add_subcommand("run", "run one experiment");
  run->add_option("experiment", experiment, "experiment id (see list-presets)")->required();
  run->add_option("--config", config_path, "flat key=value config file")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed, "master seed (overrides the config)");
  CLI::Option* replicas_opt = run->add_option("--replicas", replicas, "Monte Carlo replicas (overrides the config)");
  run->add_option("--out", out_dir, "output directory");

  app.add_subcommand("list-presets", "print phi presets and experiment ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (app.got_subcommand("list-presets")) {
    std::cout << dpplab::list_presets();
    return 0;
  }

  try {
    dpplab::ExperimentConfig config = dpplab::ExperimentConfig::load(experiment, config_path);
    if (*seed_opt) config.set("seed", std::to_string(seed));
    if (*replicas_opt) config.set("replicas", std::to_string(replicas));
    const dpplab::ExperimentReport report = dpplab::run_experiment(config);
    dpplab::write_outputs(report, out_dir);
    for (const dpplab::CriterionResult& c : report.criteria)
      std::printf("criterion %2d %s: %s: %s\n", c.id, c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    if (report.failure) {
      std::fprintf(stderr, "numerical failure: %s\n", report.failure->c_str());
      return 3;
    }
    return report.passed() ? 0 : 1;
  } catch (const dpplab::ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

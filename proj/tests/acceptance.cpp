// Runs every experiment with its default settings and prints one line per
// acceptance criterion. Exit status is nonzero if any criterion fails.
#include <cstdio>
#include <map>

#include "dpplab/experiments.hpp"

int main() {
  std::map<int, dpplab::CriterionResult> results;
  for (const dpplab::ExperimentInfo& info : dpplab::experiment_catalog()) {
    const dpplab::ExperimentReport report = dpplab::run_experiment(dpplab::ExperimentConfig(info.id));
    for (const dpplab::CriterionResult& c : report.criteria) results[c.id] = c;
    std::fprintf(stderr, "[%s] %.1f s\n", info.id.c_str(), report.wall_seconds);
  }
  int failed = 0;
  for (const auto& [id, c] : results) {
    std::printf("criterion %2d %s  %s  (%s)\n", id, c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    failed += c.passed ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}

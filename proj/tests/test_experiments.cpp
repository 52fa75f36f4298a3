#include <doctest.h>

#include <sstream>

#include "dpplab/experiments.hpp"

using namespace dpplab;

namespace {

ExperimentConfig parse(const std::string& id, const std::string& text) {
  std::istringstream is(text);
  return ExperimentConfig::parse(id, is);
}

std::string csv(const ExperimentReport& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse("tail-check", "# comment\n\n  ns = 8, 16 \nt_step=0.5\nseed=18446744073709551615\n");
  CHECK(c.get_int_list("ns", {}) == std::vector<int>{8, 16});
  CHECK(c.get_double("t_step", 0.0) == 0.5);
  CHECK(c.get_double("t_min", -4.0) == -4.0);
  CHECK(c.get_seed("seed", 0) == 18446744073709551615ULL);
  CHECK_THROWS_AS(parse("tail-check", "ns\n"), ConfigError);
  CHECK_THROWS_AS(parse("tail-check", "ns=1\nns=2\n"), ConfigError);
  CHECK_THROWS_AS(parse("tail-check", "samples=3\n"), ConfigError);
  CHECK_THROWS_AS(parse("no-such", ""), ConfigError);
  CHECK_THROWS_AS(parse("tail-check", "t_step=abc\n").get_double("t_step", 0.0), ConfigError);
  CHECK_THROWS_AS(parse("tail-check", "ns=8,x\n").get_int_list("ns", {}), ConfigError);
  CHECK_THROWS_AS(parse("tail-check", "seed=-1\n").get_seed("seed", 0), ConfigError);
  CHECK_THROWS_AS(run_experiment(parse("szego-table", "phi=bogus\n")), ConfigError);
}

TEST_CASE("catalog and presets listing") {
  const auto& cat = experiment_catalog();
  REQUIRE(cat.size() == 8);
  for (std::size_t i = 1; i < cat.size(); ++i) CHECK(cat[i - 1].id < cat[i].id);
  const std::string text = list_presets();
  CHECK(text.find("cos-theta") != std::string::npos);
  for (const auto& e : cat) CHECK(text.find(e.id) != std::string::npos);
  CHECK(text == list_presets());
}

TEST_CASE("format") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("mt-check with the zero function gives zero gaps") {
  const ExperimentReport r = run_experiment(parse("mt-check", "phi=zero\nns=2,4\namplitudes=1\nscaling_trials=1\n"));
  CHECK(r.passed());
  int mt_rows = 0;
  for (const auto& row : r.rows) {
    if (row[0] != "moser-trudinger") continue;
    ++mt_rows;
    CHECK(std::stod(row.back()) == doctest::Approx(0.0).scale(1.0));
  }
  CHECK(mt_rows == 2);
  CHECK(r.config.at("phi") == "zero");
}

TEST_CASE("szego-table is monotone and reproducible") {
  const ExperimentConfig c = parse("szego-table", "ns=8,16,32,64\n");
  const ExperimentReport a = run_experiment(c), b = run_experiment(c);
  REQUIRE(a.criteria.size() == 1);
  CHECK(a.criteria[0].id == 8);
  CHECK(a.passed());
  for (std::size_t i = 1; i < a.rows.size(); ++i) CHECK(std::stod(a.rows[i][3]) < std::stod(a.rows[i - 1][3]));
  CHECK(csv(a) == csv(b));
  CHECK(report_json(a) == report_json(b));
  CHECK(report_json(a).find("wall") == std::string::npos);
  CHECK(timing_json(a).find("wall_seconds") != std::string::npos);
  CHECK(csv(a).rfind("# schema: dpplab-szego-table/1", 0) == 0);
}

TEST_CASE("Monte Carlo experiments depend only on the seed") {
  const ExperimentConfig c = parse("clt-check", "n=4\nreplicas=50\nseed=5\n");
  const ExperimentReport a = run_experiment(c), b = run_experiment(c);
  CHECK(csv(a) == csv(b));
  ExperimentConfig other = c;
  other.set("seed", "6");
  CHECK(csv(run_experiment(other)) != csv(a));
}

TEST_CASE("numerical failures are reported, not thrown") {
  // a torus decay fit over too few levels cannot be formed
  const ExperimentReport r = run_experiment(parse("bergman-decay", "sphere_k_max=2\ntorus_k_max=3\nconstancy_ks=1\ndecay_ks=8,12\nlocal_ks=20,30,40,50\n"));
  CHECK(r.failure.has_value());
  CHECK_FALSE(r.passed());
  REQUIRE(r.criteria.size() == 4);
  CHECK(r.criteria[0].passed);
  CHECK_FALSE(r.criteria[2].passed);
  CHECK(r.criteria[2].detail.rfind("not evaluated", 0) == 0);
}

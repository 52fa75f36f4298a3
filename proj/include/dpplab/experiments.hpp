#ifndef DPPLAB_EXPERIMENTS_HPP
#define DPPLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpplab {

/// Invalid configuration or command line: maps to a usage error.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentInfo {
  std::string id;
  std::string description;
};

/// The experiment ids, alphabetical.
const std::vector<ExperimentInfo>& experiment_catalog();

/// Flat key=value settings. Lines starting with '#' and blank lines are
/// ignored; whitespace around keys and values is trimmed. Lists are
/// comma-separated.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  explicit ExperimentConfig(std::string experiment);

  static ExperimentConfig parse(const std::string& experiment, std::istream& is);
  static ExperimentConfig load(const std::string& experiment, const std::string& path);

  const std::string& experiment() const { return experiment_; }
  const std::map<std::string, std::string>& values() const { return values_; }

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;

  /// Throws ConfigError for keys the experiment does not read.
  void validate() const;

 private:
  std::string experiment_;
  std::map<std::string, std::string> values_;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::string version;
  std::map<std::string, std::string> config;  // effective settings, defaults included
  std::string csv_schema;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // already formatted
  std::vector<CriterionResult> criteria;
  std::optional<std::string> failure;  // numerical failure cause
  double wall_seconds = 0.0;           // kept out of report.json

  bool passed() const;
};

/// Runs one experiment. Numerical failures are caught and recorded in
/// report.failure; ConfigError propagates.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// "%.17g".
std::string format_double(double x);

void write_csv(std::ostream& os, const ExperimentReport& report);
std::string report_json(const ExperimentReport& report);
std::string timing_json(const ExperimentReport& report);

/// Writes <id>.csv, report.json and timing.json into dir (created if needed).
void write_outputs(const ExperimentReport& report, const std::string& dir);

/// φ presets and experiment ids with one-line descriptions, alphabetical.
std::string list_presets();

}  // namespace dpplab

#endif  // DPPLAB_EXPERIMENTS_HPP

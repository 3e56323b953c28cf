#pragma once

// Subcommand implementations for csp_lab. Kept out of main() so that the test
// suite can drive them directly.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace csp::cli {

enum class Exit : int { Ok = 0, Config = 2, Numerical = 3, Tolerance = 4 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key/value configuration: a JSON file, then overrides (flags win).
class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  explicit ExperimentConfig(nlohmann::json values);

  /// Accepts a plain config object or a manifest written by a previous run.
  static ExperimentConfig load(const std::string& path);

  void merge(const nlohmann::json& overrides);
  void set(const std::string& key, nlohmann::json value) { values_[key] = std::move(value); }

  bool has(const std::string& key) const { return values_.contains(key); }
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  double positive(const std::string& key, double fallback) const;

  const nlohmann::json& values() const { return values_; }

 private:
  nlohmann::json values_ = nlohmann::json::object();
};

/// Parses a flag value: number, comma-separated list of numbers, or string.
nlohmann::json parse_value(const std::string& text);

struct RunResult {
  Exit status = Exit::Ok;
  std::string message;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  nlohmann::json report = nlohmann::json::object();
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand and writes manifest_<subcommand>.json into out_dir.
RunResult run(const std::string& subcommand, const ExperimentConfig& config);

}  // namespace csp::cli

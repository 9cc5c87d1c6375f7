#pragma once

// Experiment configuration: one JSON document plus `--set path=value`
// overrides, validated strictly before any computation.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bautin/cycles.hpp"
#include "bautin/model.hpp"

namespace bautin::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A named (delta, r) location; the other parameters come from `model`.
struct Point {
  std::string label;
  double delta = 0.0;
  double r = 0.0;
};

struct HopfRange {
  double delta_lo = 0.0;
  double delta_hi = 0.0;
  int samples = 200;
};

struct ThresholdSpec {
  double c_lo = 0.0;
  double c_hi = 0.0;
  double tol_c = 0.005;
};

struct ZoneGrid {
  double b1_lo = -0.1;
  double b1_hi = 0.1;
  int b1_samples = 201;
  double b2_lo = -0.8;
  double b2_hi = 0.8;
  int b2_samples = 201;
};

struct OutputSpec {
  double samples_per_period = 10.0;
  double t_from = 0.0;
  std::optional<double> t_to;
  bool plots = true;
};

struct ExperimentConfig {
  ModelParams model;
  std::vector<Point> points;
  std::vector<Point> markers;
  std::optional<HopfRange> hopf;
  std::vector<double> c_values;
  RunSettings run;
  std::optional<ThresholdSpec> threshold;
  std::optional<ZoneGrid> zones;
  OutputSpec output;

  /// `points` applied to `model`, or the model itself when none are given.
  std::vector<std::pair<std::string, ModelParams>> resolved_points() const;
};

/// Applies `a.b.c=value` overrides; the value is parsed as JSON and taken
/// as a string when that fails.
nlohmann::json apply_overrides(nlohmann::json doc, const std::vector<std::string>& sets);

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(const nlohmann::json& doc);

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& sets);

}  // namespace bautin::cli

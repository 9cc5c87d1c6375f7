#include "cli/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

#include "bautin/errors.hpp"

namespace bautin::cli {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& where,
               std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ConfigError(where + " must be an object");
  }
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!keys.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

double number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) {
    throw ConfigError(where + "." + key + " is required");
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError(where + "." + key + " must be a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw ConfigError(where + "." + key + " must be finite");
  }
  return d;
}

template <typename T>
void maybe(const json& obj, const std::string& where, const char* key, T& out) {
  if (!obj.contains(key)) {
    return;
  }
  if constexpr (std::is_same_v<T, bool>) {
    if (!obj.at(key).is_boolean()) {
      throw ConfigError(where + "." + key + " must be a boolean");
    }
    out = obj.at(key).get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!obj.at(key).is_number_integer()) {
      throw ConfigError(where + "." + key + " must be an integer");
    }
    out = obj.at(key).get<T>();
  } else {
    out = number(obj, where, key);
  }
}

void positive(double v, const std::string& what) {
  if (!(v > 0.0)) {
    throw ConfigError(what + " must be positive");
  }
}

std::vector<Point> parse_points(const json& arr, const std::string& where) {
  if (!arr.is_array()) {
    throw ConfigError(where + " must be an array");
  }
  std::vector<Point> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    only_keys(arr[i], at, {"label", "delta", "r"});
    Point p;
    if (arr[i].contains("label")) {
      if (!arr[i]["label"].is_string()) {
        throw ConfigError(at + ".label must be a string");
      }
      p.label = arr[i]["label"].get<std::string>();
    } else {
      p.label = "point" + std::to_string(i);
    }
    p.delta = number(arr[i], at, "delta");
    p.r = number(arr[i], at, "r");
    positive(p.delta, at + ".delta");
    positive(p.r, at + ".r");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, ModelParams>> ExperimentConfig::resolved_points() const {
  std::vector<std::pair<std::string, ModelParams>> out;
  if (points.empty()) {
    out.emplace_back("model", model);
  }
  for (const auto& p : points) {
    ModelParams m = model;
    m.delta = p.delta;
    m.r = p.r;
    out.emplace_back(p.label, m);
  }
  return out;
}

json apply_overrides(json doc, const std::vector<std::string>& sets) {
  for (const auto& set : sets) {
    const auto eq = set.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--set expects key=value, got '" + set + "'");
    }
    const std::string path = set.substr(0, eq);
    const std::string text = set.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) {
      value = text;
    }
    json* node = &doc;
    std::size_t start = 0;
    for (;;) {
      const auto dot = path.find('.', start);
      const std::string key = path.substr(start, dot - start);
      if (key.empty()) {
        throw ConfigError("empty path segment in --set '" + set + "'");
      }
      if (!node->is_object()) {
        if (!node->is_null()) {
          throw ConfigError("--set '" + set + "' descends into a non-object");
        }
        *node = json::object();
      }
      node = &(*node)[key];
      if (dot == std::string::npos) {
        break;
      }
      start = dot + 1;
    }
    *node = std::move(value);
  }
  return doc;
}

ExperimentConfig parse_config(const json& doc) {
  only_keys(doc, "config",
            {"model", "points", "markers", "hopf", "history", "integration", "classification",
             "threshold", "zones", "output"});
  ExperimentConfig cfg;
  if (!doc.contains("model")) {
    throw ConfigError("config.model is required");
  }
  try {
    cfg.model = doc.at("model").get<ModelParams>();
    validate(cfg.model);
  } catch (const Error& e) {
    throw ConfigError(std::string("config.model: ") + e.what());
  }

  if (doc.contains("points")) {
    cfg.points = parse_points(doc["points"], "points");
  }
  if (doc.contains("markers")) {
    cfg.markers = parse_points(doc["markers"], "markers");
  }
  if (doc.contains("hopf")) {
    const auto& h = doc["hopf"];
    only_keys(h, "hopf", {"delta_lo", "delta_hi", "samples"});
    HopfRange range;
    range.delta_lo = number(h, "hopf", "delta_lo");
    range.delta_hi = number(h, "hopf", "delta_hi");
    maybe(h, "hopf", "samples", range.samples);
    positive(range.delta_lo, "hopf.delta_lo");
    if (range.samples < 1) {
      throw ConfigError("hopf.samples must be >= 1");
    }
    if (range.samples > 1 && !(range.delta_lo < range.delta_hi)) {
      throw ConfigError("hopf.delta_lo must be < hopf.delta_hi");
    }
    cfg.hopf = range;
  }
  if (doc.contains("history")) {
    const auto& h = doc["history"];
    only_keys(h, "history", {"c"});
    if (!h.contains("c") || !h["c"].is_array()) {
      throw ConfigError("history.c must be an array of numbers");
    }
    for (const auto& v : h["c"]) {
      if (!v.is_number()) {
        throw ConfigError("history.c must be an array of numbers");
      }
      cfg.c_values.push_back(v.get<double>());
    }
  }
  if (doc.contains("integration")) {
    const auto& s = doc["integration"];
    only_keys(s, "integration",
              {"rel_tol", "abs_tol", "max_step", "t_end", "max_horizon", "divergence_bound"});
    auto& o = cfg.run.integration;
    maybe(s, "integration", "rel_tol", o.rel_tol);
    maybe(s, "integration", "abs_tol", o.abs_tol);
    maybe(s, "integration", "max_step", o.max_step);
    maybe(s, "integration", "t_end", o.t_end);
    maybe(s, "integration", "divergence_bound", o.divergence_bound);
    maybe(s, "integration", "max_horizon", cfg.run.max_horizon);
    positive(o.rel_tol, "integration.rel_tol");
    positive(o.abs_tol, "integration.abs_tol");
    positive(o.t_end, "integration.t_end");
    positive(cfg.run.max_horizon, "integration.max_horizon");
    if (o.max_step < 0.0) {
      throw ConfigError("integration.max_step must be >= 0");
    }
  }
  if (doc.contains("classification")) {
    const auto& s = doc["classification"];
    only_keys(s, "classification",
              {"window_peaks", "amplitude_rel_tol", "equilibrium_rel", "main_peak_fraction",
               "settled_rel", "divergence_bound", "t_min"});
    auto& c = cfg.run.classify;
    maybe(s, "classification", "window_peaks", c.window_peaks);
    maybe(s, "classification", "amplitude_rel_tol", c.amplitude_rel_tol);
    maybe(s, "classification", "equilibrium_rel", c.equilibrium_rel);
    maybe(s, "classification", "main_peak_fraction", c.main_peak_fraction);
    maybe(s, "classification", "settled_rel", c.settled_rel);
    maybe(s, "classification", "divergence_bound", c.divergence_bound);
    maybe(s, "classification", "t_min", c.t_min);
    if (c.window_peaks < 2) {
      throw ConfigError("classification.window_peaks must be >= 2");
    }
    positive(c.amplitude_rel_tol, "classification.amplitude_rel_tol");
    positive(c.equilibrium_rel, "classification.equilibrium_rel");
  }
  if (doc.contains("threshold")) {
    const auto& s = doc["threshold"];
    only_keys(s, "threshold", {"c_lo", "c_hi", "tol_c"});
    ThresholdSpec t;
    t.c_lo = number(s, "threshold", "c_lo");
    t.c_hi = number(s, "threshold", "c_hi");
    maybe(s, "threshold", "tol_c", t.tol_c);
    positive(t.tol_c, "threshold.tol_c");
    cfg.threshold = t;
  }
  if (doc.contains("zones")) {
    const auto& s = doc["zones"];
    only_keys(s, "zones", {"b1_lo", "b1_hi", "b1_samples", "b2_lo", "b2_hi", "b2_samples"});
    ZoneGrid z;
    maybe(s, "zones", "b1_lo", z.b1_lo);
    maybe(s, "zones", "b1_hi", z.b1_hi);
    maybe(s, "zones", "b1_samples", z.b1_samples);
    maybe(s, "zones", "b2_lo", z.b2_lo);
    maybe(s, "zones", "b2_hi", z.b2_hi);
    maybe(s, "zones", "b2_samples", z.b2_samples);
    if (z.b1_samples < 2 || z.b2_samples < 2) {
      throw ConfigError("zones needs at least 2 samples per axis");
    }
    if (!(z.b1_lo < z.b1_hi) || !(z.b2_lo < z.b2_hi)) {
      throw ConfigError("zones ranges must be increasing");
    }
    cfg.zones = z;
  }
  if (doc.contains("output")) {
    const auto& s = doc["output"];
    only_keys(s, "output", {"samples_per_period", "t_from", "t_to", "plots"});
    maybe(s, "output", "samples_per_period", cfg.output.samples_per_period);
    maybe(s, "output", "t_from", cfg.output.t_from);
    if (s.contains("t_to")) {
      cfg.output.t_to = number(s, "output", "t_to");
    }
    maybe(s, "output", "plots", cfg.output.plots);
    if (!(cfg.output.samples_per_period >= 2.0)) {
      throw ConfigError("output.samples_per_period must be >= 2");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& sets) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw ConfigError("config file " + path.string() + " is not valid JSON");
  }
  return parse_config(apply_overrides(std::move(doc), sets));
}

}  // namespace bautin::cli

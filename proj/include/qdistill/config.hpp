// Copyright (c) 2026 qdistill developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdistill/pipelines.hpp"

namespace qdistill {

/// Thrown for any config-file problem; the message carries the key path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg)
      : std::runtime_error("config: " + msg) {}
};

struct ParsedConfig {
  ExperimentConfig experiment;
  std::string counts_path;  // optional input table for reconstruction runs
};

namespace detail {

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "family",    "epsilon",  "lambda",   "theta",
      "prep",      "depol_weight", "t_v",  "t_h",
      "tv_true",   "acquisition_scale",    "method",
      "noise",     "seed",     "mc_trials", "mc_seed",
      "tv_list",   "eps_list", "counts_path"};
  return keys;
}

inline double config_number(const nlohmann::json& j, const std::string& key,
                            double lo, double hi, bool lo_open = false) {
  if (!j.is_number())
    throw ConfigError(key + ": expected a number");
  const double v = j.get<double>();
  const bool ok = (lo_open ? v > lo : v >= lo) && v <= hi;
  if (!ok) {
    std::ostringstream ss;
    ss << key << ": value " << v << " outside " << (lo_open ? "(" : "[") << lo
       << ", " << hi << "]";
    throw ConfigError(ss.str());
  }
  return v;
}

inline std::uint64_t config_seed(const nlohmann::json& j,
                                 const std::string& key) {
  if (!j.is_number_integer() || j.get<double>() < 0)
    throw ConfigError(key + ": expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

inline std::string config_choice(const nlohmann::json& j,
                                 const std::string& key,
                                 const std::vector<std::string>& options) {
  if (!j.is_string()) throw ConfigError(key + ": expected a string");
  const std::string v = j.get<std::string>();
  for (const auto& o : options)
    if (v == o) return v;
  std::string opts;
  for (const auto& o : options) opts += (opts.empty() ? "" : "|") + o;
  throw ConfigError(key + ": unknown value '" + v + "' (expected " + opts + ")");
}

}  // namespace detail

/// Parses and validates a JSON config document. Unknown keys are
/// rejected, values are range checked, defaults fill everything absent;
/// keys listed in `required` must be present.
inline ParsedConfig parse_config_text(const std::string& text,
                                      const std::vector<std::string>& required = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("top level must be an object");

  for (const auto& [key, value] : j.items()) {
    if (detail::known_config_keys().count(key) == 0)
      throw ConfigError("unknown key '" + key + "'");
    (void)value;
  }
  for (const auto& key : required) {
    if (!j.contains(key))
      throw ConfigError("missing required key '" + key + "'");
  }

  ParsedConfig out;
  ExperimentConfig& c = out.experiment;
  if (j.contains("family"))
    c.family = detail::config_choice(j["family"], "family", {"phi", "psi"}) ==
                       "phi"
                   ? StateFamily::Phi
                   : StateFamily::Psi;
  if (j.contains("epsilon"))
    c.epsilon = detail::config_number(j["epsilon"], "epsilon", 0.0, 1.0, true);
  if (j.contains("lambda"))
    c.lambda = detail::config_number(j["lambda"], "lambda", 0.0, 1.0);
  if (j.contains("theta"))
    c.theta = detail::config_number(j["theta"], "theta", -10.0, 10.0);
  if (j.contains("prep"))
    c.prep = detail::config_choice(j["prep"], "prep", {"approx", "exact"}) ==
                     "approx"
                 ? PrepForm::Approx
                 : PrepForm::Exact;
  if (j.contains("depol_weight"))
    c.depol_weight =
        detail::config_number(j["depol_weight"], "depol_weight", 0.0, 1.0);
  if (j.contains("t_v"))
    c.t_v = detail::config_number(j["t_v"], "t_v", 0.0, 1.0);
  if (j.contains("t_h"))
    c.t_h = detail::config_number(j["t_h"], "t_h", 0.0, 1.0);
  if (j.contains("tv_true"))
    c.tv_true = detail::config_number(j["tv_true"], "tv_true", 0.0, 1.0);
  if (j.contains("acquisition_scale"))
    c.acquisition_scale = detail::config_number(
        j["acquisition_scale"], "acquisition_scale", 0.0, 1e15, true);
  if (j.contains("method"))
    c.method = detail::config_choice(j["method"], "method",
                                     {"linear", "mle"}) == "linear"
                   ? TomoMethod::Linear
                   : TomoMethod::Mle;
  if (j.contains("noise"))
    c.noise = detail::config_choice(j["noise"], "noise",
                                    {"none", "poisson"}) == "none"
                  ? Noise::None
                  : Noise::Poisson;
  if (j.contains("seed")) c.seed = detail::config_seed(j["seed"], "seed");
  if (j.contains("mc_trials")) {
    const double v =
        detail::config_number(j["mc_trials"], "mc_trials", 0.0, 1e9);
    c.mc_trials = static_cast<int>(v);
  }
  if (j.contains("mc_seed"))
    c.mc_seed = detail::config_seed(j["mc_seed"], "mc_seed");
  if (j.contains("tv_list")) {
    if (!j["tv_list"].is_array()) throw ConfigError("tv_list: expected an array");
    for (std::size_t i = 0; i < j["tv_list"].size(); ++i) {
      std::ostringstream key;
      key << "tv_list[" << i << "]";
      c.tv_list.push_back(
          detail::config_number(j["tv_list"][i], key.str(), 0.0, 1.0));
    }
  }
  if (j.contains("eps_list")) {
    if (!j["eps_list"].is_array())
      throw ConfigError("eps_list: expected an array");
    for (std::size_t i = 0; i < j["eps_list"].size(); ++i) {
      std::ostringstream key;
      key << "eps_list[" << i << "]";
      c.eps_list.push_back(
          detail::config_number(j["eps_list"][i], key.str(), 0.0, 1.0, true));
    }
  }
  if (j.contains("counts_path")) {
    if (!j["counts_path"].is_string())
      throw ConfigError("counts_path: expected a string");
    out.counts_path = j["counts_path"].get<std::string>();
  }
  return out;
}

inline ParsedConfig parse_config(const std::string& path,
                                 const std::vector<std::string>& required = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), required);
}

}  // namespace qdistill

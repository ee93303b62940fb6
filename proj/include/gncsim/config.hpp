/*
 * Copyright 2026 The gncsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gncsim/dataset.hpp"  // IoError
#include "gncsim/optimizer.hpp"

namespace gncsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text with dotted section keys. Lines that are blank or
/// start with '#' are ignored. Duplicate keys in one source are rejected;
/// overrides happen only through set(). Every key must be consumed by a
/// typed getter; leftovers are reported so misspelled keys never pass
/// silently.
class KeyValues {
 public:
  static KeyValues parse_text(const std::string& text,
                              const std::string& origin = "<inline>") {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string trimmed = trim(line);
      if (trimmed.empty() || trimmed[0] == '#') {
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": expected `key = value`");
      }
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": empty key");
      }
      if (kv.values_.count(key)) {
        throw ConfigError(origin + ": duplicate key \"" + key + "\"");
      }
      kv.values_[key] = value;
    }
    return kv;
  }

  static KeyValues parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
      throw IoError("config: cannot open " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_text(text.str(), path.string());
  }

  /// Insert or override (CLI flags, seed sets, presets).
  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }

  /// Insert only when absent (preset defaults never shadow explicit keys).
  void set_default(const std::string& key, const std::string& value) {
    values_.emplace(key, value);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  /// Read without consuming; for dispatch decisions only.
  std::optional<std::string> peek(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? std::nullopt
                               : std::optional<std::string>(it->second);
  }

  std::optional<std::string> take(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) {
      return std::nullopt;
    }
    consumed_.insert(key);
    return it->second;
  }

  std::string take_or(const std::string& key, const std::string& fallback) {
    return take(key).value_or(fallback);
  }

  std::string take_required(const std::string& key) {
    auto v = take(key);
    if (!v.has_value()) {
      throw ConfigError("config: missing required key \"" + key + "\"");
    }
    return *v;
  }

  double take_real(const std::string& key, double fallback) {
    const auto v = take(key);
    return v.has_value() ? parse_real(key, *v) : fallback;
  }

  std::uint64_t take_u64(const std::string& key, std::uint64_t fallback) {
    const auto v = take(key);
    return v.has_value() ? parse_u64(key, *v) : fallback;
  }

  std::uint64_t take_u64_required(const std::string& key) {
    return parse_u64(key, take_required(key));
  }

  bool take_bool(const std::string& key, bool fallback) {
    const auto v = take(key);
    if (!v.has_value()) {
      return fallback;
    }
    if (*v == "on" || *v == "true" || *v == "1") {
      return true;
    }
    if (*v == "off" || *v == "false" || *v == "0") {
      return false;
    }
    throw ConfigError("config: " + key + ": expected on/off, got \"" + *v +
                      "\"");
  }

  /// Comma-separated unsigned list ("80,120").
  std::vector<std::uint64_t> take_u64_list(const std::string& key) {
    const auto v = take(key);
    std::vector<std::uint64_t> out;
    if (!v.has_value() || v->empty()) {
      return out;
    }
    std::istringstream in(*v);
    std::string item;
    while (std::getline(in, item, ',')) {
      out.push_back(parse_u64(key, trim(item)));
    }
    return out;
  }

  std::vector<std::string> unconsumed() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : values_) {
      if (!consumed_.count(k)) {
        out.push_back(k);
      }
    }
    return out;
  }

  void reject_unconsumed() const {
    const auto extra = unconsumed();
    if (!extra.empty()) {
      std::string msg = "config: unknown key(s):";
      for (const auto& k : extra) {
        msg += " \"" + k + "\"";
      }
      throw ConfigError(msg);
    }
  }

  /// Deterministic normalized dump (sorted keys), used for run snapshots.
  std::string normalized() const {
    std::string out;
    for (const auto& [k, v] : values_) {
      out += k + " = " + v + "\n";
    }
    return out;
  }

  double parse_real(const std::string& key, const std::string& v) const {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) {
        throw std::invalid_argument(v);
      }
      return d;
    } catch (const std::exception&) {
      throw ConfigError("config: " + key + ": expected a real number, got \"" +
                        v + "\"");
    }
  }

  std::uint64_t parse_u64(const std::string& key, const std::string& v) const {
    try {
      std::size_t used = 0;
      const std::uint64_t n = std::stoull(v, &used, 0);
      if (used != v.size()) {
        throw std::invalid_argument(v);
      }
      return n;
    } catch (const std::exception&) {
      throw ConfigError("config: " + key + ": expected an integer, got \"" +
                        v + "\"");
    }
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
      return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

// --- experiment configuration ------------------------------------------------

struct SeedSet {
  std::uint64_t init = 0;
  std::uint64_t sampler = 0;
  std::uint64_t rnc = 0;
};

// Stream ids carved out of the init seed; pinned so runs are replayable
// piece by piece.
inline constexpr std::uint64_t kStreamDataset = 1;
inline constexpr std::uint64_t kStreamParamInit = 2;

struct ObjectiveConfig {
  std::string family;  // quadratic | logistic | mlp
  // quadratic
  std::size_t dim = 16;
  double cond = 1.0;
  double lambda_max = 1.0;
  std::string spectrum = "geometric";  // geometric | spiked
  std::size_t spikes = 4;
  bool rotate = false;
  std::uint64_t basis_seed = 0;
  // classifiers
  std::size_t features = 8;
  std::size_t classes = 2;
  std::vector<std::size_t> hidden;
};

struct DatasetConfig {
  std::string path;       // when set, load instead of synthesizing
  std::string eval_path;  // optional companion eval set for loaded data
  std::size_t n = 0;
  std::size_t eval_n = 0;
  double sigma = 1.0;       // data noise (quadratic) / blob spread
  double separation = 2.0;  // class-center distance (classifiers)
  double mean = 0.0;        // quadratic data mean
};

struct ExperimentConfig {
  ObjectiveConfig objective;
  DatasetConfig dataset;
  OptimConfig optim;
  std::uint64_t epochs = 1;
  SeedSet seeds;
  std::uint64_t log_cadence = 1;
  std::uint64_t diag_cadence = 0;            // 0 = off
  std::optional<std::uint64_t> fg_cadence;   // absent = once per epoch, 0 = off
  std::uint64_t probe_cadence = 0;           // 0 = off
  std::uint64_t checkpoint_cadence = 0;      // 0 = off
  std::vector<double> eig_percentiles{0.0, 25.0, 50.0, 75.0, 100.0};
  std::string out_dir;
  std::string normalized_snapshot;  // filled by from_keyvalues

  static Method parse_method(const std::string& name) {
    if (name == "baseline") return Method::baseline;
    if (name == "gnc") return Method::gnc;
    if (name == "rnc") return Method::rnc;
    if (name == "gnc-to-rnc") return Method::gnc_to_rnc;
    throw ConfigError("config: unknown method \"" + name + "\"");
  }

  static std::string method_name(Method m) {
    switch (m) {
      case Method::baseline: return "baseline";
      case Method::gnc: return "gnc";
      case Method::rnc: return "rnc";
      case Method::gnc_to_rnc: return "gnc-to-rnc";
    }
    throw std::logic_error("method_name: unreachable");
  }

  /// Consumes the recognized keys; callers decide when to reject leftovers
  /// (compare-mode keys live in the same file).
  static ExperimentConfig from_keyvalues(KeyValues& kv);

  void validate() const;
};

inline ExperimentConfig ExperimentConfig::from_keyvalues(KeyValues& kv) {
  ExperimentConfig cfg;
  cfg.normalized_snapshot = kv.normalized();

  cfg.objective.family = kv.take_or("objective.family", "quadratic");
  cfg.objective.dim = kv.take_u64("objective.dim", 16);
  cfg.objective.cond = kv.take_real("objective.cond", 1.0);
  cfg.objective.lambda_max = kv.take_real("objective.lambda_max", 1.0);
  cfg.objective.spectrum = kv.take_or("objective.spectrum", "geometric");
  cfg.objective.spikes = kv.take_u64("objective.spikes", 4);
  cfg.objective.rotate = kv.take_bool("objective.rotate", false);
  cfg.objective.basis_seed = kv.take_u64("objective.basis_seed", 0);
  cfg.objective.features = kv.take_u64("objective.features", 8);
  cfg.objective.classes = kv.take_u64("objective.classes", 2);
  for (const auto h : kv.take_u64_list("objective.hidden")) {
    cfg.objective.hidden.push_back(h);
  }

  cfg.dataset.path = kv.take_or("dataset.path", "");
  cfg.dataset.eval_path = kv.take_or("dataset.eval_path", "");
  cfg.dataset.n = kv.take_u64("dataset.n", 256);
  cfg.dataset.eval_n = kv.take_u64("dataset.eval_n", 0);
  cfg.dataset.sigma = kv.take_real("dataset.sigma", 1.0);
  cfg.dataset.separation = kv.take_real("dataset.separation", 2.0);
  cfg.dataset.mean = kv.take_real("dataset.mean", 0.0);

  cfg.optim.method = parse_method(kv.take_or("optim.method", "baseline"));
  cfg.optim.workers = kv.take_u64("optim.workers", 1);
  cfg.optim.shard_size = kv.take_u64("optim.shard_size", 1);
  cfg.optim.alpha = kv.take_real("optim.alpha", 0.0);
  cfg.optim.alpha_rnc = kv.take_real("optim.alpha_rnc", 0.0);
  cfg.optim.switch_epoch = kv.take_u64("optim.switch_epoch", 0);
  cfg.optim.momentum = kv.take_real("optim.momentum", 0.0);
  cfg.optim.weight_decay = kv.take_real("optim.weight_decay", 0.0);
  cfg.optim.lars.enabled = kv.take_bool("optim.lars", false);
  cfg.optim.lars.tau = kv.take_real("optim.lars_tau", 0.001);
  const std::string scaling = kv.take_or("optim.noise_scaling", "plain");
  if (scaling == "plain") {
    cfg.optim.scaling = NoiseScaling::plain;
  } else if (scaling == "filter-wise") {
    cfg.optim.scaling = NoiseScaling::filter_wise;
  } else {
    throw ConfigError("config: optim.noise_scaling must be plain|filter-wise");
  }

  cfg.optim.schedule.base_lr = kv.take_real("schedule.base_lr", 0.1);
  cfg.optim.schedule.warmup_epochs = kv.take_u64("schedule.warmup_epochs", 0);
  cfg.optim.schedule.warmup_start_lr =
      kv.take_real("schedule.warmup_start_lr", 0.0);
  const std::string decay = kv.take_or("schedule.decay", "none");
  if (decay == "none") {
    cfg.optim.schedule.decay = DecayRule::none;
  } else if (decay == "step") {
    cfg.optim.schedule.decay = DecayRule::step;
  } else if (decay == "polynomial") {
    cfg.optim.schedule.decay = DecayRule::polynomial;
  } else {
    throw ConfigError("config: schedule.decay must be none|step|polynomial");
  }
  cfg.optim.schedule.milestones = kv.take_u64_list("schedule.milestones");
  cfg.optim.schedule.decay_factor = kv.take_real("schedule.decay_factor", 0.1);
  cfg.optim.schedule.poly_total = kv.take_u64("schedule.poly_total", 0);
  cfg.optim.schedule.poly_power = kv.take_real("schedule.poly_power", 2.0);
  cfg.optim.schedule.collapse_epoch =
      kv.take_u64("schedule.collapse_epoch", 0);
  cfg.optim.schedule.collapse_divisor =
      kv.take_real("schedule.collapse_divisor", 1.0);

  cfg.epochs = kv.take_u64("run.epochs", 1);
  // seeds are explicit by contract: no wall-clock fallbacks anywhere
  cfg.seeds.init = kv.take_u64_required("run.seed_init");
  cfg.seeds.sampler = kv.take_u64_required("run.seed_sampler");
  cfg.seeds.rnc = kv.take_u64_required("run.seed_rnc");
  cfg.log_cadence = kv.take_u64("run.log_cadence", 1);
  cfg.diag_cadence = kv.take_u64("run.diag_cadence", 0);
  if (const auto fg = kv.take("run.fg_cadence")) {
    cfg.fg_cadence = kv.parse_u64("run.fg_cadence", *fg);
  }
  cfg.probe_cadence = kv.take_u64("run.probe_cadence", 0);
  cfg.checkpoint_cadence = kv.take_u64("run.checkpoint_cadence", 0);
  cfg.out_dir = kv.take_or("run.out", "");
  return cfg;
}

/// Structurally valid keys of the compare section. They are consumed only
/// by `compare`, but other subcommands must still tell them apart from
/// typos.
inline bool is_compare_key(const std::string& key) {
  if (key == "compare.seed_set_base") {
    return true;
  }
  for (const char* method : {"baseline", "gnc", "rnc", "gnc-to-rnc"}) {
    const std::string prefix = std::string("compare.") + method + ".";
    if (key == prefix + "alpha" || key == prefix + "alpha_rnc") {
      return true;
    }
  }
  return false;
}

/// Rejects every unconsumed key that is not a well-formed compare key.
inline void reject_unknown_keys(const KeyValues& kv) {
  std::string unknown;
  for (const std::string& key : kv.unconsumed()) {
    if (!is_compare_key(key)) {
      unknown += " \"" + key + "\"";
    }
  }
  if (!unknown.empty()) {
    throw ConfigError("config: unknown key(s):" + unknown);
  }
}

inline void ExperimentConfig::validate() const {
  if (objective.family != "quadratic" && objective.family != "logistic" &&
      objective.family != "mlp") {
    throw ConfigError(
        "config: objective.family must be quadratic|logistic|mlp");
  }
  if (objective.family == "mlp" && objective.hidden.empty()) {
    throw ConfigError("config: mlp needs objective.hidden");
  }
  if (objective.family == "logistic" && !objective.hidden.empty()) {
    throw ConfigError("config: logistic must not set objective.hidden");
  }
  if (objective.spectrum != "geometric" && objective.spectrum != "spiked") {
    throw ConfigError("config: objective.spectrum must be geometric|spiked");
  }
  if (epochs == 0) {
    throw ConfigError("config: run.epochs must be >= 1");
  }
  if (log_cadence == 0) {
    throw ConfigError("config: run.log_cadence must be >= 1");
  }
  if (dataset.path.empty() && dataset.n == 0) {
    throw ConfigError("config: dataset.n must be >= 1");
  }
  if (dataset.path.empty() &&
      optim.shard_size * optim.workers > dataset.n) {
    throw ConfigError(
        "config: constraint violated: shard_size * workers <= dataset.n (" +
        std::to_string(optim.shard_size) + " * " +
        std::to_string(optim.workers) + " > " + std::to_string(dataset.n) +
        ")");
  }
  // schedule.iterations_per_epoch is derived at run time; validate the rest
  OptimConfig probe = optim;
  probe.schedule.iterations_per_epoch = 1;
  probe.validate(epochs);
}

}  // namespace gncsim

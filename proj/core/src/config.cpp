// Copyright 2026 The t6gps Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "t6gps/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "t6gps/error.hpp"

namespace t6gps {

RunMode ParseRunMode(const std::string& name) {
  if (name == "t6gps") return RunMode::kT6gps;
  if (name == "baseline-gps" || name == "baseline") return RunMode::kBaselineGps;
  if (name == "evaluate") return RunMode::kEvaluate;
  throw Error(ErrorCategory::kConfig, "unknown mode: " + name);
}

const char* ToString(RunMode mode) {
  switch (mode) {
    case RunMode::kT6gps: return "t6gps";
    case RunMode::kBaselineGps: return "baseline-gps";
    case RunMode::kEvaluate: return "evaluate";
  }
  return "?";
}

LocalizationOptions RunConfig::MakeLocalizationOptions() const {
  LocalizationOptions opt;
  opt.truncation_cap = truncation_cap;
  opt.txi_min = txi_min;
  opt.choice = ParseReductionChoice(reduction);
  opt.max_modes = multimodal ? max_modes : 1;
  opt.ransac_iters = ransac_iters;
  opt.seed = seed;
  opt.workers = workers;
  return opt;
}

namespace {

struct FieldBinder {
  std::map<std::string, std::function<void(RunConfig&, const std::string&)>> set;
  std::map<std::string, std::function<std::string(const RunConfig&)>> get;
  std::vector<std::string> order;

  template <typename T>
  static T Parse(const std::string& v);

  template <typename Getter, typename Setter>
  void Bind(const std::string& key, Getter g, Setter s) {
    order.push_back(key);
    get[key] = g;
    set[key] = s;
  }
};

template <>
int FieldBinder::Parse<int>(const std::string& v) {
  return std::stoi(v);
}
template <>
uint64_t FieldBinder::Parse<uint64_t>(const std::string& v) {
  return std::stoull(v);
}
template <>
double FieldBinder::Parse<double>(const std::string& v) {
  return std::stod(v);
}
template <>
bool FieldBinder::Parse<bool>(const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw Error(ErrorCategory::kConfig, "expected on/off: " + v);
}
template <>
std::string FieldBinder::Parse<std::string>(const std::string& v) {
  return v;
}

#define BIND_FIELD(binder, name, member, type)                              \
  binder.Bind(                                                              \
      name,                                                                 \
      [](const RunConfig& c) {                                              \
        std::ostringstream os;                                              \
        os.precision(17);                                                   \
        os << c.member;                                                     \
        return os.str();                                                    \
      },                                                                    \
      [](RunConfig& c, const std::string& v) {                              \
        c.member = FieldBinder::Parse<type>(v);                             \
      })

FieldBinder MakeBinder() {
  FieldBinder b;
  b.Bind(
      "mode", [](const RunConfig& c) { return std::string(ToString(c.mode)); },
      [](RunConfig& c, const std::string& v) { c.mode = ParseRunMode(v); });
  BIND_FIELD(b, "iterations", iterations, int);
  BIND_FIELD(b, "samples_per_iteration", samples_per_iteration, int);
  BIND_FIELD(b, "horizon", horizon, int);
  BIND_FIELD(b, "eval_horizon", eval_horizon, int);
  BIND_FIELD(b, "episodes", episodes, int);
  BIND_FIELD(b, "subtraj_length", subtraj_length, int);
  BIND_FIELD(b, "reduction", reduction, std::string);
  b.Bind(
      "multimodal",
      [](const RunConfig& c) { return std::string(c.multimodal ? "on" : "off"); },
      [](RunConfig& c, const std::string& v) {
        c.multimodal = FieldBinder::Parse<bool>(v);
      });
  BIND_FIELD(b, "max_modes", max_modes, int);
  BIND_FIELD(b, "ransac_iters", ransac_iters, int);
  BIND_FIELD(b, "truncation_cap", truncation_cap, int);
  BIND_FIELD(b, "txi_min", txi_min, int);
  BIND_FIELD(b, "kl_weight", kl_weight, double);
  BIND_FIELD(b, "kl_skip_threshold", kl_skip_threshold, double);
  BIND_FIELD(b, "noise_initial", noise_initial, double);
  BIND_FIELD(b, "noise_final", noise_final, double);
  BIND_FIELD(b, "train_epochs", train_epochs, int);
  BIND_FIELD(b, "train_lr", train_lr, double);
  BIND_FIELD(b, "train_momentum", train_momentum, double);
  BIND_FIELD(b, "recency_weight", recency_weight, double);
  BIND_FIELD(b, "data_retention", data_retention, std::string);
  BIND_FIELD(b, "target_speed", target_speed, double);
  BIND_FIELD(b, "cost_weight_vertical", cost_weight_vertical, double);
  BIND_FIELD(b, "waypoint_radius", waypoint_radius, double);
  BIND_FIELD(b, "waypoint_timeout", waypoint_timeout, double);
  BIND_FIELD(b, "waypoint_min_dist", waypoint_min_dist, double);
  BIND_FIELD(b, "waypoint_max_dist", waypoint_max_dist, double);
  BIND_FIELD(b, "terrain_seed", terrain_seed, uint64_t);
  BIND_FIELD(b, "terrain_mean_slope", terrain_mean_slope, double);
  BIND_FIELD(b, "terrain_std_slope", terrain_std_slope, double);
  BIND_FIELD(b, "terrain_max_variation", terrain_max_variation, double);
  BIND_FIELD(b, "terrain_extent", terrain_extent, double);
  BIND_FIELD(b, "terrain_cell", terrain_cell, double);
  BIND_FIELD(b, "baseline_directions", baseline_directions, int);
  BIND_FIELD(b, "node_mass", physics.node_mass, double);
  BIND_FIELD(b, "bar_length", physics.bar_length, double);
  BIND_FIELD(b, "cable_stiffness", physics.cable_stiffness, double);
  BIND_FIELD(b, "cable_damping", physics.cable_damping, double);
  BIND_FIELD(b, "rod_stiffness", physics.rod_stiffness, double);
  BIND_FIELD(b, "rod_damping", physics.rod_damping, double);
  BIND_FIELD(b, "contact_normal_stiffness", physics.contact_normal_stiffness,
             double);
  BIND_FIELD(b, "contact_damping", physics.contact_damping, double);
  BIND_FIELD(b, "friction_coefficient", physics.friction_coefficient, double);
  BIND_FIELD(b, "friction_regularization", physics.friction_regularization,
             double);
  BIND_FIELD(b, "actuator_rate_limit", physics.actuator_rate_limit, double);
  BIND_FIELD(b, "gravity", physics.gravity, double);
  BIND_FIELD(b, "rest_length_lower_frac", physics.rest_length_lower_frac,
             double);
  BIND_FIELD(b, "rest_length_upper_frac", physics.rest_length_upper_frac,
             double);
  BIND_FIELD(b, "prestress_frac", physics.prestress_frac, double);
  BIND_FIELD(b, "dt", physics.dt, double);
  BIND_FIELD(b, "control_period", physics.control_period, double);
  BIND_FIELD(b, "seed", seed, uint64_t);
  BIND_FIELD(b, "workers", workers, int);
  b.Bind(
      "log_trajectories",
      [](const RunConfig& c) {
        return std::string(c.log_trajectories ? "on" : "off");
      },
      [](RunConfig& c, const std::string& v) {
        c.log_trajectories = FieldBinder::Parse<bool>(v);
      });
  b.Bind(
      "plateau_stop",
      [](const RunConfig& c) {
        return std::string(c.plateau_stop ? "on" : "off");
      },
      [](RunConfig& c, const std::string& v) {
        c.plateau_stop = FieldBinder::Parse<bool>(v);
      });
  return b;
}

#undef BIND_FIELD

const FieldBinder& Binder() {
  static const FieldBinder b = MakeBinder();
  return b;
}

}  // namespace

RunConfig ParseRunConfig(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key)) continue;
    if (!(ls >> value)) {
      throw Error(ErrorCategory::kConfig,
                  "config line " + std::to_string(line_no) + ": missing value");
    }
    auto it = Binder().set.find(key);
    if (it == Binder().set.end()) {
      throw Error(ErrorCategory::kConfig, "unknown config key: " + key);
    }
    try {
      it->second(config, value);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCategory::kConfig,
                  "config key " + key + ": " + e.what());
    }
  }
  return config;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseRunConfig(buf.str());
}

std::string SerializeRunConfig(const RunConfig& config) {
  std::ostringstream out;
  for (const std::string& key : Binder().order) {
    out << key << " " << Binder().get.at(key)(config) << "\n";
  }
  return out.str();
}

uint64_t SampleBudget(const RunConfig& config) {
  uint64_t steps = static_cast<uint64_t>(config.iterations) *
                   config.samples_per_iteration * config.horizon;
  if (config.mode == RunMode::kBaselineGps) {
    steps *= config.baseline_directions;
  }
  return steps;
}

}  // namespace t6gps

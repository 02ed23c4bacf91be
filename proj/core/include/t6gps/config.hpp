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

#ifndef T6GPS_CONFIG_HPP_
#define T6GPS_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "t6gps/localization.hpp"
#include "t6gps/robot_model.hpp"

namespace t6gps {

enum class RunMode { kT6gps, kBaselineGps, kEvaluate };

RunMode ParseRunMode(const std::string& name);
const char* ToString(RunMode mode);

// Every knob of a run; serialized verbatim into each run directory as a
// flat key-value file.
struct RunConfig {
  RunMode mode = RunMode::kT6gps;

  // Sampling
  int iterations = 5;
  int samples_per_iteration = 300;
  int horizon = 250;            // control steps per sample
  int eval_horizon = 900;
  int episodes = 3;             // evaluate mode

  // C-step
  int subtraj_length = 15;
  std::string reduction = "nodes";
  bool multimodal = true;
  int max_modes = 6;
  int ransac_iters = 100;
  int truncation_cap = 50;
  int txi_min = 5;
  double kl_weight = 1.0;
  double kl_skip_threshold = 0.2;  // halve c past this skip fraction

  // Exploration noise, linear decay over iterations
  double noise_initial = 0.04;
  double noise_final = 0.01;

  // S-step
  int train_epochs = 300;
  double train_lr = 1e-3;
  double train_momentum = 0.9;
  double recency_weight = 2.0;      // newest iteration weighting
  std::string data_retention = "accumulate";  // accumulate | latest

  // Scenario
  double target_speed = 0.8;
  double cost_weight_vertical = 0.1;
  double waypoint_radius = 0.485;
  double waypoint_timeout = 5.0;
  double waypoint_min_dist = 2.0;
  double waypoint_max_dist = 6.0;

  // Terrain
  uint64_t terrain_seed = 0;  // 0: derived from seed
  double terrain_mean_slope = 0.0;  // 0: flat
  double terrain_std_slope = 0.0;
  double terrain_max_variation = 0.0;
  double terrain_extent = 30.0;
  double terrain_cell = 0.25;

  // Baseline GPS
  int baseline_directions = 36;

  // Physics
  PhysicsParams physics;

  // Run control
  uint64_t seed = 1;
  int workers = 0;  // 0: hardware concurrency
  bool log_trajectories = true;
  bool plateau_stop = false;  // stop when improvement < 2% over 2 iterations

  LocalizationOptions MakeLocalizationOptions() const;
};

RunConfig ParseRunConfig(const std::string& text);
RunConfig LoadRunConfig(const std::string& path);
std::string SerializeRunConfig(const RunConfig& config);

// Published sample-budget arithmetic: iterations*N*T for the t6gps mode,
// iterations*J*N*T for the baseline.
uint64_t SampleBudget(const RunConfig& config);

}  // namespace t6gps

#endif  // T6GPS_CONFIG_HPP_

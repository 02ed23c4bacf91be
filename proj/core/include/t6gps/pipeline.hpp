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

#ifndef T6GPS_PIPELINE_HPP_
#define T6GPS_PIPELINE_HPP_

#include <string>
#include <vector>

#include "t6gps/config.hpp"
#include "t6gps/localization.hpp"
#include "t6gps/policy.hpp"
#include "t6gps/rollout.hpp"
#include "t6gps/symmetry.hpp"
#include "t6gps/trajopt.hpp"

namespace t6gps {

struct IterationReport {
  int iteration = 0;
  double mean_sample_cost = 0.0;
  double mean_forward_speed = 0.0;  // mean of v_com . d_hat
  double stuck_fraction = 0.0;      // |v_com| < 0.05 m/s
  std::vector<int> speed_histogram; // of v_com . d_hat
  double speed_hist_lo = -0.8;
  double speed_hist_hi = 1.6;
  int total_steps = 0;
  int segment_count = 0;
  int discarded_steps = 0;
  int class_count = 0;
  int subtraj_count = 0;
  int skip_count = 0;
  int fallback_count = 0;
  double mean_predicted_improvement = 0.0;
  int training_pairs = 0;
  double train_initial_loss = 0.0;
  double train_final_loss = 0.0;
  double kl_weight_used = 0.0;
  double noise_scale_used = 0.0;
  double wall_time_s = 0.0;
  std::vector<ClassCensusRow> census;
};

// Mutable state threaded through the iterations.
struct TrainingState {
  PolicyParams params;
  TrainingSet data;
  double kl_weight = 1.0;
  int iteration = 0;
};

struct RunContext {
  RobotModel model;
  SymmetryTable table;
  Terrain terrain;

  static RunContext Make(const RunConfig& config);
};

// One full iteration: rollouts, post-hoc localization, sub-trajectory
// backward passes, pair collection, supervised training. Artifacts are
// written under out_dir unless it is empty.
IterationReport RunT6gpsIteration(const RunConfig& config, RunContext& ctx,
                                  TrainingState& state,
                                  const std::string& out_dir);

// Standard-GPS baseline iteration: repeated sampling of one settled
// start state per commanded direction, a single LTV fit per direction,
// full-sample backward passes, no symmetry reduction or localization.
IterationReport RunBaselineIteration(const RunConfig& config, RunContext& ctx,
                                     TrainingState& state,
                                     const std::string& out_dir);

// Runs config.iterations iterations of the configured mode, writing the
// config copy, terrain, per-iteration artifacts, and summary.csv.
std::vector<IterationReport> RunTraining(const RunConfig& config,
                                         const std::string& out_dir);

struct EvalEpisode {
  double mean_cost = 0.0;
  double mean_forward_speed = 0.0;
  int arrivals = 0;
  double stuck_fraction = 0.0;
};

struct EvalReport {
  std::vector<EvalEpisode> episodes;
  double mean_cost = 0.0;
  double mean_forward_speed = 0.0;
  double stuck_fraction = 0.0;
  int total_arrivals = 0;
};

// Zero-noise evaluation episodes on the configured terrain; per-episode
// ground tracks and bottom-face footprints land in out_dir.
EvalReport Evaluate(const RunConfig& config, const PolicyParams& params,
                    const std::string& out_dir);

void WriteIterationReportCsv(const std::vector<IterationReport>& reports,
                             const std::string& path);

}  // namespace t6gps

#endif  // T6GPS_PIPELINE_HPP_

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

#ifndef T6GPS_ROLLOUT_HPP_
#define T6GPS_ROLLOUT_HPP_

#include <cstdint>
#include <string>

#include "t6gps/policy.hpp"
#include "t6gps/scenario.hpp"
#include "t6gps/symmetry.hpp"

namespace t6gps {

struct RolloutOptions {
  int horizon = 250;          // control steps
  double noise_scale = 0.0;   // m, std of per-cable exploration noise
  uint64_t seed = 0;
  // When true the symmetry reduction is bypassed (identity frame); used
  // by the standard-GPS baseline.
  bool identity_frame = false;
};

// Executes the policy at the control rate: reduce the observation,
// evaluate, add exploration noise, clamp, relabel to physical cables,
// advance the physics through one control period. Deterministic for a
// fixed seed.
Trajectory Rollout(const PolicyParams& policy, const FullState& x0,
                   ScenarioState scenario, const RolloutOptions& options,
                   const RobotModel& model, const SymmetryTable& table,
                   const Terrain& terrain);

// One CSV row per control step: sim_time, node positions, node
// velocities, rest lengths, commands, bottom face, cost, target heading.
void WriteTrajectoryCsv(const Trajectory& traj, const std::string& path);

}  // namespace t6gps

#endif  // T6GPS_ROLLOUT_HPP_

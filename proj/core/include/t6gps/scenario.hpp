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

#ifndef T6GPS_SCENARIO_HPP_
#define T6GPS_SCENARIO_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "t6gps/engine.hpp"
#include "t6gps/robot_model.hpp"
#include "t6gps/state.hpp"
#include "t6gps/terrain.hpp"

namespace t6gps {

inline constexpr int kWaypointsPerTrial = 5;

// Waypoint sequence steering one trial. A waypoint is reached when the
// CoM ground-plane distance drops below the radius; waypoints also
// expire on a timeout so the vehicle cannot idle in stuck states.
struct ScenarioState {
  std::array<Vec2, kWaypointsPerTrial> waypoints;
  double radius = 0.485;        // m, half the vehicle diameter / 2
  double timeout = 5.0;         // s
  double target_speed = 0.8;    // m/s
  Vec3 cost_weights{1.0, 1.0, 0.1};  // diagonal of W

  int active = 0;               // index of the active waypoint
  double activation_time = 0.0;
  int arrivals = 0;
  int timeouts = 0;
  Vec3 last_dir = Vec3::UnitX();

  bool done() const { return active >= kWaypointsPerTrial; }
};

ScenarioState MakeScenario(uint64_t seed, const Vec2& start,
                           const Terrain& terrain, double min_dist = 2.0,
                           double max_dist = 6.0);

// Advances the waypoint state for time t and returns the ground-plane
// unit direction toward the active waypoint. After the last waypoint the
// direction holds its final value; a CoM exactly at the waypoint center
// keeps the previous direction.
Vec3 UpdateTarget(ScenarioState& scn, const Vec3& com, double t);

// l = (v - v* d)^T W (v - v* d) with diagonal W.
double RunningCost(const Vec3& v_com, const Vec3& d_hat, double v_star,
                   const Vec3& w_diag);

// Randomized initial states: uniform location within the terrain
// interior, random face-down orientation and yaw, rest lengths
// perturbed +-10% of neutral, then settled for 2 s. Failed settles are
// resampled up to 5 times.
std::vector<FullState> SampleInitialStates(int n, uint64_t seed,
                                           const Terrain& terrain,
                                           const RobotModel& model,
                                           double margin = 6.0);

}  // namespace t6gps

#endif  // T6GPS_SCENARIO_HPP_

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

#ifndef T6GPS_STATE_HPP_
#define T6GPS_STATE_HPP_

#include <array>
#include <optional>
#include <vector>

#include "t6gps/types.hpp"

namespace t6gps {

// Node positions/velocities plus actuated cable rest lengths.
struct FullState {
  std::array<Vec3, kNumNodes> node_pos;
  std::array<Vec3, kNumNodes> node_vel;
  std::array<double, kNumCables> rest_lengths;
  double sim_time = 0.0;

  Vec3 com() const {
    Vec3 c = Vec3::Zero();
    for (const Vec3& p : node_pos) c += p;
    return c / kNumNodes;
  }
  Vec3 com_velocity() const {
    Vec3 v = Vec3::Zero();
    for (const Vec3& u : node_vel) v += u;
    return v / kNumNodes;
  }
  bool finite() const;
};

// Desired cable rest lengths; clamped to the model bounds on use.
struct ControlCommand {
  std::array<double, kNumCables> target_rest_lengths;
};

struct TrajectoryStep {
  FullState state;
  VecX observation;                        // kObservationDim entries
  ControlCommand control;                  // physical cable order
  std::optional<ControlCommand> improved_control;
  int bottom_face = -1;
  double cost = 0.0;
  Vec3 target_dir = Vec3::UnitX();         // world ground-plane unit vector
  // Symmetry frame active at this step (constant within a segment).
  int frame_map_index = 0;
  double frame_heading = 0.0;
  int previous_face = -1;
  int waypoint_index = 0;
  bool arrival = false;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  FullState final_state;    // state after the last control period
  int start_face = -1;
  bool timed_out = false;   // scenario consumed all waypoints by timeout
  int length() const { return static_cast<int>(steps.size()); }
  const FullState& state_at(int t) const {
    return t < length() ? steps[t].state : final_state;
  }
};

}  // namespace t6gps

#endif  // T6GPS_STATE_HPP_

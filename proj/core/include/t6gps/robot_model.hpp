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

#ifndef T6GPS_ROBOT_MODEL_HPP_
#define T6GPS_ROBOT_MODEL_HPP_

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "t6gps/types.hpp"

namespace t6gps {

// Exterior triangle kind: kDelta faces are bounded by three cables,
// kLambda faces contain one bar ("virtual") edge.
enum class FaceType { kDelta, kLambda };

struct Face {
  std::array<int, 3> nodes;  // ascending node ids
  FaceType type;
};

// Physical parameters of the point-mass spring-rod vehicle.
struct PhysicsParams {
  double node_mass = 1.0;               // kg
  double bar_length = 1.94;             // m
  double cable_stiffness = 1000.0;      // N/m
  double cable_damping = 30.0;          // N s/m
  double rod_stiffness = 50000.0;       // N/m
  double rod_damping = 200.0;           // N s/m
  double contact_normal_stiffness = 20000.0;  // N/m
  double contact_damping = 300.0;       // N s/m
  double friction_coefficient = 0.5;
  double friction_regularization = 500.0;  // N s/m, tangential cap slope
  double actuator_rate_limit = 0.25;    // m/s
  double gravity = 9.81;                // m/s^2, +down
  double rest_length_lower_frac = 0.6;  // of neutral cable length
  double rest_length_upper_frac = 1.1;
  // Neutral command as a fraction of the geometric cable length. Below
  // 1.0 the cable net carries pretension, which the tension-only
  // structure needs to hold its shape under load.
  double prestress_frac = 0.95;
  double dt = 1e-3;                     // physics substep, s
  double control_period = 0.1;          // s between policy evaluations
};

// Fixed 6-bar / 24-cable topology plus neutral geometry and parameters.
struct RobotModel {
  std::array<Vec3, kNumNodes> node_positions_neutral;
  std::array<std::pair<int, int>, kNumBars> bars;      // node id pairs
  std::array<std::pair<int, int>, kNumCables> cables;  // node id pairs
  std::array<Face, kNumFaces> faces;
  PhysicsParams params;

  double neutral_cable_length = 0.0;  // identical for all 24 cables
  double neutral_rest_length = 0.0;   // prestressed neutral command
  double rest_length_min = 0.0;
  double rest_length_max = 0.0;

  // node id -> bar id, and node id -> the 4 incident cable ids
  std::array<int, kNumNodes> bar_of_node;
  std::array<std::array<int, 4>, kNumNodes> cables_of_node;

  int cable_index(int a, int b) const;          // -1 if not a cable
  int bar_index(int a, int b) const;            // -1 if not a bar
  int face_index(const std::array<int, 3>& nodes) const;  // -1 if absent

  // Shared edge between two faces, or nullopt when they are not adjacent.
  std::optional<std::pair<int, int>> shared_edge(int face_a, int face_b) const;

  // Which edge slot (0..2) of `face` the node pair {a,b} occupies; the
  // slots follow EdgeSlots() ordering. Returns -1 if not an edge of face.
  int edge_slot(int face, int a, int b) const;

  // The three edges of a face as sorted node pairs, in a fixed order:
  // for kDelta faces ascending by (min,max) node id; for kLambda faces
  // the virtual edge first, then the two cable edges ascending.
  std::array<std::pair<int, int>, 3> EdgeSlots(int face) const;

  Vec3 face_centroid_neutral(int face) const;
};

// Builds the neutral icosahedral arrangement: 12 vertices at the cyclic
// permutations of (0, ±1, ±phi) scaled by bar_length/(2 phi), bars on
// the 6 long chords that flip the sign of the phi coordinate, cables on
// 24 of the 30 icosahedron edges; the 6 cable-less edges between
// parallel bar ends are the virtual edges of the Lambda faces. Throws
// ErrorCategory::kConfig for non-positive physical parameters.
RobotModel BuildRobot(const PhysicsParams& params = PhysicsParams{});

}  // namespace t6gps

#endif  // T6GPS_ROBOT_MODEL_HPP_

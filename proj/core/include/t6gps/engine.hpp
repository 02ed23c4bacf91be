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

#ifndef T6GPS_ENGINE_HPP_
#define T6GPS_ENGINE_HPP_

#include <array>

#include "t6gps/robot_model.hpp"
#include "t6gps/state.hpp"
#include "t6gps/terrain.hpp"

namespace t6gps {

// Per-element force breakdown for diagnostics and tests.
struct ForceReport {
  std::array<double, kNumCables> cable_tension;  // >= 0, N
  std::array<double, kNumBars> rod_force;        // signed along axis, N
  std::array<double, kNumNodes> contact_normal;  // >= 0, N
  std::array<Vec3, kNumNodes> total;             // N, includes gravity
};

ForceReport ComputeForces(const FullState& state, const RobotModel& model,
                          const Terrain& terrain);

// Semi-implicit Euler update over one physics substep. Rest lengths move
// toward the (bound-clamped) command at most actuator_rate_limit * dt.
// Throws ErrorCategory::kNumeric naming the first non-finite node.
FullState Step(const FullState& state, const ControlCommand& cmd,
               const RobotModel& model, const Terrain& terrain, double dt);

// Kinetic + gravitational + elastic energy (taut cables only), J.
double MechanicalEnergy(const FullState& state, const RobotModel& model);
double KineticEnergy(const FullState& state, const RobotModel& model);

// Neutral geometry oriented with `face` down, placed just above the
// terrain at (x, y) = (0, 0) plus `offset`, zero velocities, neutral
// rest lengths.
FullState MakeDroppedState(const RobotModel& model, const Terrain& terrain,
                           int face, const Vec2& offset = Vec2::Zero(),
                           double yaw = 0.0);

// Simulates with constant neutral rest lengths until kinetic energy
// drops below 1e-4 J (quasi-static) or 10 s elapse; the latter throws a
// settle-failure (kNumeric) reporting the final energy.
FullState SettleNeutral(const RobotModel& model, const Terrain& terrain,
                        int start_face);

// Runs the state forward `duration` seconds holding `cmd`.
FullState Simulate(const FullState& state, const ControlCommand& cmd,
                   const RobotModel& model, const Terrain& terrain,
                   double duration);

// omega = (d x d_dot) / |d|^2 per bar; the axial spin of a rod of point
// masses is unobservable and identically zero. Throws for |d| < 1e-6 m.
std::array<Vec3, kNumBars> BarAngularVelocities(const FullState& state,
                                                const RobotModel& model);

ControlCommand NeutralCommand(const RobotModel& model);
ControlCommand ClampCommand(const ControlCommand& cmd, const RobotModel& model);

}  // namespace t6gps

#endif  // T6GPS_ENGINE_HPP_

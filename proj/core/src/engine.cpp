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

#include "t6gps/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "t6gps/error.hpp"

namespace t6gps {

bool FullState::finite() const {
  for (const Vec3& p : node_pos) {
    if (!p.allFinite()) return false;
  }
  for (const Vec3& v : node_vel) {
    if (!v.allFinite()) return false;
  }
  for (double r : rest_lengths) {
    if (!std::isfinite(r)) return false;
  }
  return std::isfinite(sim_time);
}

ForceReport ComputeForces(const FullState& state, const RobotModel& model,
                          const Terrain& terrain) {
  const PhysicsParams& pp = model.params;
  ForceReport report;
  report.cable_tension.fill(0.0);
  report.rod_force.fill(0.0);
  report.contact_normal.fill(0.0);
  const Vec3 gravity(0.0, 0.0, -pp.gravity * pp.node_mass);
  for (int n = 0; n < kNumNodes; ++n) report.total[n] = gravity;

  // Cables: tension-only linear spring + damper.
  for (int c = 0; c < kNumCables; ++c) {
    auto [a, b] = model.cables[c];
    Vec3 d = state.node_pos[b] - state.node_pos[a];
    double len = d.norm();
    double rest = state.rest_lengths[c];
    if (len <= rest || len < 1e-12) continue;
    Vec3 dir = d / len;
    double rate = (state.node_vel[b] - state.node_vel[a]).dot(dir);
    double tension =
        pp.cable_stiffness * (len - rest) + pp.cable_damping * rate;
    if (tension <= 0.0) continue;
    report.cable_tension[c] = tension;
    report.total[a] += tension * dir;
    report.total[b] -= tension * dir;
  }

  // Rods: stiff two-sided spring + damper holding bar_length.
  for (int r = 0; r < kNumBars; ++r) {
    auto [a, b] = model.bars[r];
    Vec3 d = state.node_pos[b] - state.node_pos[a];
    double len = d.norm();
    if (len < 1e-12) continue;
    Vec3 dir = d / len;
    double rate = (state.node_vel[b] - state.node_vel[a]).dot(dir);
    double force =
        pp.rod_stiffness * (len - pp.bar_length) + pp.rod_damping * rate;
    report.rod_force[r] = force;
    report.total[a] += force * dir;
    report.total[b] -= force * dir;
  }

  // Node-terrain contact: penalty normal + regularized Coulomb friction.
  for (int n = 0; n < kNumNodes; ++n) {
    const Vec3& p = state.node_pos[n];
    double ground = terrain.height(p.x(), p.y());
    if (p.z() >= ground) continue;
    Vec3 normal = terrain.normal(p.x(), p.y());
    double depth = (ground - p.z()) * normal.z();
    double vn = state.node_vel[n].dot(normal);
    double fn = pp.contact_normal_stiffness * depth - pp.contact_damping * vn;
    if (fn <= 0.0) continue;
    report.contact_normal[n] = fn;
    report.total[n] += fn * normal;
    Vec3 vt = state.node_vel[n] - vn * normal;
    double speed = vt.norm();
    if (speed > 1e-9) {
      double ft = std::min(pp.friction_coefficient * fn,
                           pp.friction_regularization * speed);
      report.total[n] -= (ft / speed) * vt;
    }
  }
  return report;
}

FullState Step(const FullState& state, const ControlCommand& cmd,
               const RobotModel& model, const Terrain& terrain, double dt) {
  const PhysicsParams& pp = model.params;
  FullState next = state;

  // Actuators: rate-limited tracking of the clamped command.
  double max_move = pp.actuator_rate_limit * dt;
  for (int c = 0; c < kNumCables; ++c) {
    double target = std::clamp(cmd.target_rest_lengths[c],
                               model.rest_length_min, model.rest_length_max);
    double delta =
        std::clamp(target - state.rest_lengths[c], -max_move, max_move);
    next.rest_lengths[c] = state.rest_lengths[c] + delta;
  }

  ForceReport forces = ComputeForces(next, model, terrain);
  double inv_mass = 1.0 / pp.node_mass;
  for (int n = 0; n < kNumNodes; ++n) {
    next.node_vel[n] += dt * inv_mass * forces.total[n];
    next.node_pos[n] += dt * next.node_vel[n];
  }
  next.sim_time = state.sim_time + dt;

  for (int n = 0; n < kNumNodes; ++n) {
    if (!next.node_pos[n].allFinite() || !next.node_vel[n].allFinite()) {
      throw Error(ErrorCategory::kNumeric,
                  "integration blowup at node " + std::to_string(n) +
                      ", t=" + std::to_string(next.sim_time));
    }
  }
  return next;
}

double KineticEnergy(const FullState& state, const RobotModel& model) {
  double e = 0.0;
  for (const Vec3& v : state.node_vel) e += v.squaredNorm();
  return 0.5 * model.params.node_mass * e;
}

double MechanicalEnergy(const FullState& state, const RobotModel& model) {
  const PhysicsParams& pp = model.params;
  double e = KineticEnergy(state, model);
  for (const Vec3& p : state.node_pos) {
    e += pp.node_mass * pp.gravity * p.z();
  }
  for (int c = 0; c < kNumCables; ++c) {
    auto [a, b] = model.cables[c];
    double len = (state.node_pos[b] - state.node_pos[a]).norm();
    double stretch = len - state.rest_lengths[c];
    if (stretch > 0.0) e += 0.5 * pp.cable_stiffness * stretch * stretch;
  }
  for (int r = 0; r < kNumBars; ++r) {
    auto [a, b] = model.bars[r];
    double len = (state.node_pos[b] - state.node_pos[a]).norm();
    double stretch = len - pp.bar_length;
    e += 0.5 * pp.rod_stiffness * stretch * stretch;
  }
  return e;
}

FullState MakeDroppedState(const RobotModel& model, const Terrain& terrain,
                           int face, const Vec2& offset, double yaw) {
  if (face < 0 || face >= kNumFaces) {
    throw Error(ErrorCategory::kConfig, "face id out of range");
  }
  // Rotate the neutral arrangement so the face's outward normal points
  // straight down, then apply the yaw.
  Vec3 outward = model.face_centroid_neutral(face).normalized();
  Eigen::Quaterniond q =
      Eigen::Quaterniond::FromTwoVectors(outward, Vec3(0, 0, -1));
  Eigen::AngleAxisd spin(yaw, Vec3::UnitZ());
  Mat3 rot = (spin * q).toRotationMatrix();

  FullState state;
  double min_clearance = 1e300;
  for (int n = 0; n < kNumNodes; ++n) {
    Vec3 p = rot * model.node_positions_neutral[n];
    p.x() += offset.x();
    p.y() += offset.y();
    state.node_pos[n] = p;
    state.node_vel[n] = Vec3::Zero();
  }
  for (int n = 0; n < kNumNodes; ++n) {
    const Vec3& p = state.node_pos[n];
    min_clearance =
        std::min(min_clearance, p.z() - terrain.height(p.x(), p.y()));
  }
  double lift = 0.01 - min_clearance;
  for (int n = 0; n < kNumNodes; ++n) state.node_pos[n].z() += lift;
  state.rest_lengths.fill(model.neutral_cable_length);
  state.sim_time = 0.0;
  return state;
}

FullState Simulate(const FullState& state, const ControlCommand& cmd,
                   const RobotModel& model, const Terrain& terrain,
                   double duration) {
  FullState s = state;
  int steps = static_cast<int>(std::ceil(duration / model.params.dt));
  for (int i = 0; i < steps; ++i) {
    s = Step(s, cmd, model, terrain, model.params.dt);
  }
  return s;
}

FullState SettleNeutral(const RobotModel& model, const Terrain& terrain,
                        int start_face) {
  FullState state = MakeDroppedState(model, terrain, start_face);
  ControlCommand neutral = NeutralCommand(model);
  constexpr double kEnergyThreshold = 1e-4;  // J
  constexpr double kMaxTime = 10.0;          // s
  double dt = model.params.dt;
  int max_steps = static_cast<int>(kMaxTime / dt);
  if (KineticEnergy(state, model) < kEnergyThreshold) {
    // Already quasi-static (e.g. the zero-gravity test hook).
    ForceReport f = ComputeForces(state, model, terrain);
    double fmax = 0.0;
    for (const Vec3& v : f.total) fmax = std::max(fmax, v.norm());
    if (fmax < 1e-9) return state;
  }
  for (int i = 0; i < max_steps; ++i) {
    state = Step(state, neutral, model, terrain, dt);
    // Energy check every 10 ms once the drop transient has passed.
    if (i % 10 == 0 && state.sim_time > 0.2 &&
        KineticEnergy(state, model) < kEnergyThreshold) {
      return state;
    }
  }
  throw Error(ErrorCategory::kNumeric,
              "settle failure: kinetic energy " +
                  std::to_string(KineticEnergy(state, model)) + " J after " +
                  std::to_string(kMaxTime) + " s");
}

std::array<Vec3, kNumBars> BarAngularVelocities(const FullState& state,
                                                const RobotModel& model) {
  std::array<Vec3, kNumBars> omega;
  for (int r = 0; r < kNumBars; ++r) {
    auto [a, b] = model.bars[r];
    Vec3 d = state.node_pos[b] - state.node_pos[a];
    double d2 = d.squaredNorm();
    if (d2 < 1e-12) {
      throw Error(ErrorCategory::kNumeric,
                  "degenerate bar " + std::to_string(r));
    }
    Vec3 ddot = state.node_vel[b] - state.node_vel[a];
    omega[r] = d.cross(ddot) / d2;
  }
  return omega;
}

ControlCommand NeutralCommand(const RobotModel& model) {
  ControlCommand cmd;
  cmd.target_rest_lengths.fill(model.neutral_rest_length);
  return cmd;
}

ControlCommand ClampCommand(const ControlCommand& cmd,
                            const RobotModel& model) {
  ControlCommand out = cmd;
  for (double& v : out.target_rest_lengths) {
    v = std::clamp(v, model.rest_length_min, model.rest_length_max);
  }
  return out;
}

}  // namespace t6gps

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

#include <cmath>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "t6gps/error.hpp"
#include "t6gps/rng.hpp"

namespace t6gps {
namespace {

// Neutral arrangement floating high above the terrain, zero velocities.
FullState AirborneNeutral(const RobotModel& model, double height = 50.0) {
  FullState state;
  for (int n = 0; n < kNumNodes; ++n) {
    state.node_pos[n] = model.node_positions_neutral[n];
    state.node_pos[n].z() += height;
    state.node_vel[n] = Vec3::Zero();
  }
  state.rest_lengths.fill(model.neutral_cable_length);
  return state;
}

TEST(Engine, AirborneGravityOnlyStep) {
  RobotModel model = BuildRobot();
  Terrain terrain = Terrain::Flat();
  FullState state = AirborneNeutral(model);
  double dt = model.params.dt;
  ControlCommand hold;
  hold.target_rest_lengths = state.rest_lengths;  // cables stay at rest
  FullState next = Step(state, hold, model, terrain, dt);
  for (int n = 0; n < kNumNodes; ++n) {
    EXPECT_NEAR(next.node_vel[n].z(), -model.params.gravity * dt, 1e-12);
    EXPECT_NEAR(next.node_vel[n].x(), 0.0, 1e-12);
    EXPECT_NEAR(next.node_vel[n].y(), 0.0, 1e-12);
  }
}

TEST(Engine, SlackCableContributesNoForce) {
  RobotModel model = BuildRobot();
  Terrain terrain = Terrain::Flat();
  FullState state = AirborneNeutral(model);
  // Make every cable slack by a visible margin.
  for (double& r : state.rest_lengths) r = model.neutral_cable_length + 0.05;
  ForceReport forces = ComputeForces(state, model, terrain);
  for (int c = 0; c < kNumCables; ++c) {
    EXPECT_EQ(forces.cable_tension[c], 0.0) << "cable " << c;
  }
}

TEST(Engine, ActuatorRateLimitArithmetic) {
  RobotModel model = BuildRobot();
  Terrain terrain = Terrain::Flat();
  FullState state = AirborneNeutral(model);
  ControlCommand cmd = NeutralCommand(model);
  cmd.target_rest_lengths[3] = state.rest_lengths[3] - 0.2;
  FullState next = Step(state, cmd, model, terrain, 1e-3);
  // rate limit 0.25 m/s over 1 ms
  EXPECT_NEAR(state.rest_lengths[3] - next.rest_lengths[3], 2.5e-4, 1e-12);
}

TEST(Engine, EnergyNonIncreasingWithoutContact) {
  PhysicsParams params;
  params.gravity = 1e-12;  // keep the cluster from falling into range
  RobotModel model = BuildRobot(params);
  Terrain terrain = Terrain::Flat();
  FullState state = AirborneNeutral(model, 200.0);
  // Gentle stir with mild pretension. The tension-only transition has a
  // position overshoot of one substep, so the 1e-6 J per-step budget
  // implies modest relative velocities.
  Rng rng = MakeRng(7);
  std::uniform_real_distribution<double> u(-0.03, 0.03);
  for (int n = 0; n < kNumNodes; ++n) {
    state.node_vel[n] = Vec3(u(rng), u(rng), u(rng));
  }
  for (double& r : state.rest_lengths) r = model.neutral_cable_length - 0.01;
  ControlCommand hold;
  hold.target_rest_lengths = state.rest_lengths;
  double energy = MechanicalEnergy(state, model);
  for (int i = 0; i < 2000; ++i) {
    state = Step(state, hold, model, terrain, params.dt);
    double next_energy = MechanicalEnergy(state, model);
    EXPECT_LE(next_energy, energy + 1e-6) << "step " << i;
    energy = next_energy;
  }
  // The stir must actually decay.
  EXPECT_LT(KineticEnergy(state, model), 1e-4);
}

TEST(Engine, HorizontalMomentumConservedInFreeFall) {
  RobotModel model = BuildRobot();
  Terrain terrain = Terrain::Flat();
  FullState state = AirborneNeutral(model, 500.0);
  Rng rng = MakeRng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int n = 0; n < kNumNodes; ++n) {
    state.node_vel[n] = Vec3(u(rng), u(rng), u(rng));
  }
  for (double& r : state.rest_lengths) r = model.rest_length_min + 0.02;
  ControlCommand hold;
  hold.target_rest_lengths = state.rest_lengths;
  Vec3 momentum = Vec3::Zero();
  for (int n = 0; n < kNumNodes; ++n) momentum += state.node_vel[n];
  for (int i = 0; i < 500; ++i) {
    state = Step(state, hold, model, terrain, model.params.dt);
    Vec3 next = Vec3::Zero();
    for (int n = 0; n < kNumNodes; ++n) next += state.node_vel[n];
    EXPECT_NEAR(next.x(), momentum.x(), 1e-9);
    EXPECT_NEAR(next.y(), momentum.y(), 1e-9);
    momentum = next;
  }
}

TEST(Engine, SettleNeutralReachesQuasiStatic) {
  RobotModel model = BuildRobot();
  Terrain terrain = Terrain::Flat();
  int delta_face = -1;
  for (int f = 0; f < kNumFaces; ++f) {
    if (model.faces[f].type == FaceType::kDelta) {
      delta_face = f;
      break;
    }
  }
  FullState settled = SettleNeutral(model, terrain, delta_face);
  EXPECT_LT(KineticEnergy(settled, model), 1e-4);

  // The three lowest nodes are the start face.
  std::array<std::pair<double, int>, kNumNodes> by_height;
  for (int n = 0; n < kNumNodes; ++n) {
    by_height[n] = {settled.node_pos[n].z(), n};
  }
  std::sort(by_height.begin(), by_height.end());
  std::array<int, 3> lowest = {by_height[0].second, by_height[1].second,
                               by_height[2].second};
  std::sort(lowest.begin(), lowest.end());
  EXPECT_EQ(lowest, model.faces[delta_face].nodes);
}

TEST(Engine, ZeroGravitySettleReturnsInitialState) {
  PhysicsParams params;
  params.gravity = 0.0;
  params.prestress_frac = 1.0;  // no commanded contraction either
  RobotModel model = BuildRobot(params);
  Terrain terrain = Terrain::Flat();
  FullState settled = SettleNeutral(model, terrain, 0);
  FullState initial = MakeDroppedState(model, terrain, 0);
  for (int n = 0; n < kNumNodes; ++n) {
    EXPECT_EQ(settled.node_pos[n], initial.node_pos[n]);
    EXPECT_EQ(settled.node_vel[n], Vec3::Zero());
  }
}

TEST(Engine, BarAngularVelocityZeroForCommonTranslation) {
  RobotModel model = BuildRobot();
  FullState state = AirborneNeutral(model);
  for (int n = 0; n < kNumNodes; ++n) state.node_vel[n] = Vec3(1.0, -2.0, 0.5);
  auto omega = BarAngularVelocities(state, model);
  for (const Vec3& w : omega) {
    EXPECT_NEAR(w.norm(), 0.0, 1e-12);
  }
}

TEST(Engine, BarAngularVelocityCrossProductCase) {
  RobotModel model = BuildRobot();
  FullState state = AirborneNeutral(model);
  auto [a, b] = model.bars[0];
  state.node_pos[a] = Vec3(0, 0, 0);
  state.node_pos[b] = Vec3(1, 0, 0);
  state.node_vel[a] = Vec3::Zero();
  state.node_vel[b] = Vec3(0, 1, 0);
  auto omega = BarAngularVelocities(state, model);
  EXPECT_NEAR((omega[0] - Vec3(0, 0, 1)).norm(), 0.0, 1e-12);
}

TEST(Engine, BarAngularVelocityRecoversRigidRotation) {
  RobotModel model = BuildRobot();
  Rng rng = MakeRng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    FullState state = AirborneNeutral(model);
    Vec3 center(u(rng), u(rng), 10.0 + u(rng));
    auto [a, b] = model.bars[trial % kNumBars];
    // Angular velocity orthogonal to the bar axis (the axial component
    // is unobservable for point masses).
    Vec3 axis = (state.node_pos[b] - state.node_pos[a]).normalized();
    Vec3 raw(u(rng), u(rng), u(rng));
    Vec3 w = raw - raw.dot(axis) * axis;
    for (int n : {a, b}) {
      state.node_vel[n] = w.cross(state.node_pos[n] - center);
    }
    auto omega = BarAngularVelocities(state, model);
    EXPECT_NEAR((omega[trial % kNumBars] - w).norm(), 0.0, 1e-9);
  }
}

TEST(Engine, DegenerateBarThrows) {
  RobotModel model = BuildRobot();
  FullState state = AirborneNeutral(model);
  auto [a, b] = model.bars[2];
  state.node_pos[b] = state.node_pos[a];
  EXPECT_THROW(BarAngularVelocities(state, model), Error);
}

TEST(Engine, TensionOnlyInvariantDuringDrop) {
  RobotModel model = BuildRobot();
  Terrain terrain = Terrain::Flat();
  FullState state = MakeDroppedState(model, terrain, 0);
  ControlCommand cmd = NeutralCommand(model);
  for (int i = 0; i < 3000; ++i) {
    state = Step(state, cmd, model, terrain, model.params.dt);
    if (i % 50 != 0) continue;
    ForceReport forces = ComputeForces(state, model, terrain);
    for (int c = 0; c < kNumCables; ++c) {
      double len = (state.node_pos[model.cables[c].second] -
                    state.node_pos[model.cables[c].first])
                       .norm();
      if (len <= state.rest_lengths[c]) {
        EXPECT_EQ(forces.cable_tension[c], 0.0);
      }
    }
  }
}

}  // namespace
}  // namespace t6gps

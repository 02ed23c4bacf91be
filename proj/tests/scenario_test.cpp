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

#include "t6gps/scenario.hpp"

#include <gtest/gtest.h>

namespace t6gps {
namespace {

ScenarioState SimpleScenario() {
  ScenarioState scn;
  scn.waypoints = {Vec2(2, 0), Vec2(2, 2), Vec2(0, 2), Vec2(-2, 2),
                   Vec2(-2, 0)};
  scn.radius = 0.485;
  return scn;
}

TEST(Scenario, ArrivalAdvancesAndResetsClock) {
  ScenarioState scn = SimpleScenario();
  Vec3 com(1.9, 0.0, 1.0);  // within radius of waypoint 0
  Vec3 d = UpdateTarget(scn, com, 1.0);
  EXPECT_EQ(scn.active, 1);
  EXPECT_EQ(scn.arrivals, 1);
  EXPECT_EQ(scn.activation_time, 1.0);
  // Direction points at waypoint 1 now.
  Vec2 expect = (scn.waypoints[1] - com.head<2>()).normalized();
  EXPECT_NEAR(d.x(), expect.x(), 1e-12);
  EXPECT_NEAR(d.y(), expect.y(), 1e-12);
  EXPECT_EQ(d.z(), 0.0);
}

TEST(Scenario, TimeoutAdvances) {
  ScenarioState scn = SimpleScenario();
  Vec3 com(-5.0, -5.0, 1.0);
  UpdateTarget(scn, com, 0.0);
  EXPECT_EQ(scn.active, 0);
  UpdateTarget(scn, com, 4.99);
  EXPECT_EQ(scn.active, 0);
  UpdateTarget(scn, com, 5.0);
  EXPECT_EQ(scn.active, 1);
  EXPECT_EQ(scn.timeouts, 1);
  EXPECT_EQ(scn.arrivals, 0);
}

TEST(Scenario, DegenerateCenterKeepsPreviousDirection) {
  ScenarioState scn = SimpleScenario();
  scn.radius = 0.0;  // arrival disabled: the center case becomes reachable
  Vec3 before = UpdateTarget(scn, Vec3(0.0, 0.0, 1.0), 0.0);
  Vec3 at_center = UpdateTarget(scn, Vec3(2.0, 0.0, 1.0), 0.1);
  EXPECT_EQ(at_center, before);
}

TEST(Scenario, IndicesStrictlyIncreaseAndHoldAfterLast) {
  ScenarioState scn = SimpleScenario();
  Vec3 com(100.0, 100.0, 1.0);  // never arrives
  int last = -1;
  for (int i = 0; i < 8; ++i) {
    UpdateTarget(scn, com, 5.0 * i);
    EXPECT_GE(scn.active, last);
    last = scn.active;
  }
  EXPECT_TRUE(scn.done());
  EXPECT_EQ(scn.timeouts, kWaypointsPerTrial);
  Vec3 held = UpdateTarget(scn, com, 1000.0);
  EXPECT_EQ(held, scn.last_dir);
}

TEST(Scenario, RunningCostExamples) {
  Vec3 w(1.0, 1.0, 0.1);
  Vec3 d_hat = Vec3::UnitX();
  EXPECT_DOUBLE_EQ(RunningCost(0.8 * d_hat, d_hat, 0.8, w), 0.0);
  EXPECT_DOUBLE_EQ(RunningCost(Vec3::Zero(), d_hat, 0.8, w), 0.64);
  EXPECT_DOUBLE_EQ(RunningCost(Vec3(0, 0, 1), d_hat, 0.8, w), 0.74);
}

TEST(Scenario, RunningCostNonNegativeAndZeroOnlyAtTarget) {
  Vec3 w(1.0, 1.0, 0.1);
  for (int i = 0; i < 50; ++i) {
    Vec3 v(0.1 * i - 2.0, 0.03 * i, 0.01 * i - 0.2);
    Vec3 d(std::cos(0.3 * i), std::sin(0.3 * i), 0.0);
    double cost = RunningCost(v, d, 0.8, w);
    EXPECT_GE(cost, 0.0);
    if ((v - 0.8 * d).norm() > 1e-12) EXPECT_GT(cost, 0.0);
  }
}

TEST(Scenario, MakeScenarioDeterministic) {
  Terrain terrain = Terrain::Flat();
  ScenarioState a = MakeScenario(99, Vec2(1.0, -2.0), terrain);
  ScenarioState b = MakeScenario(99, Vec2(1.0, -2.0), terrain);
  for (int i = 0; i < kWaypointsPerTrial; ++i) {
    EXPECT_EQ(a.waypoints[i], b.waypoints[i]);
  }
}

TEST(Scenario, SampleInitialStatesSettledAndDeterministic) {
  RobotModel model = BuildRobot();
  Terrain terrain = Terrain::Flat();
  auto states = SampleInitialStates(4, 31, terrain, model);
  ASSERT_EQ(states.size(), 4u);
  auto repeat = SampleInitialStates(4, 31, terrain, model);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LT(KineticEnergy(states[i], model), 0.5);
    for (int n = 0; n < kNumNodes; ++n) {
      // No node below the terrain beyond the contact tolerance.
      double ground =
          terrain.height(states[i].node_pos[n].x(), states[i].node_pos[n].y());
      EXPECT_GT(states[i].node_pos[n].z(), ground - 0.02);
      EXPECT_EQ(states[i].node_pos[n], repeat[i].node_pos[n]);
    }
  }
  // Distinct samples differ.
  EXPECT_NE(states[0].node_pos[0], states[1].node_pos[0]);
}

}  // namespace
}  // namespace t6gps

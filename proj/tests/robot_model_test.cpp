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

#include "t6gps/robot_model.hpp"

#include <gtest/gtest.h>

#include "t6gps/error.hpp"

namespace t6gps {
namespace {

TEST(RobotModel, Counts) {
  RobotModel model = BuildRobot();
  EXPECT_EQ(model.node_positions_neutral.size(), 12u);
  EXPECT_EQ(model.bars.size(), 6u);
  EXPECT_EQ(model.cables.size(), 24u);
  int delta = 0, lambda = 0;
  for (const Face& f : model.faces) {
    (f.type == FaceType::kDelta ? delta : lambda)++;
  }
  EXPECT_EQ(delta, 8);
  EXPECT_EQ(lambda, 12);
}

TEST(RobotModel, NodeDegrees) {
  RobotModel model = BuildRobot();
  for (int n = 0; n < kNumNodes; ++n) {
    int bar_count = 0;
    for (const auto& [a, b] : model.bars) {
      if (a == n || b == n) ++bar_count;
    }
    EXPECT_EQ(bar_count, 1) << "node " << n;
    int cable_count = 0;
    for (const auto& [a, b] : model.cables) {
      if (a == n || b == n) ++cable_count;
    }
    EXPECT_EQ(cable_count, 4) << "node " << n;
  }
}

TEST(RobotModel, LambdaFacesHaveExactlyOneVirtualEdge) {
  RobotModel model = BuildRobot();
  for (int f = 0; f < kNumFaces; ++f) {
    const auto& nodes = model.faces[f].nodes;
    int virtual_edges = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        if (model.cable_index(nodes[i], nodes[j]) < 0) ++virtual_edges;
      }
    }
    if (model.faces[f].type == FaceType::kLambda) {
      EXPECT_EQ(virtual_edges, 1) << "face " << f;
    } else {
      EXPECT_EQ(virtual_edges, 0) << "face " << f;
    }
  }
}

TEST(RobotModel, VirtualEdgesSpanParallelBarEnds) {
  RobotModel model = BuildRobot();
  for (int f = 0; f < kNumFaces; ++f) {
    if (model.faces[f].type != FaceType::kLambda) continue;
    auto edges = model.EdgeSlots(f);
    // Slot 0 is the virtual edge; its endpoints belong to two distinct
    // bars and carry no cable.
    EXPECT_LT(model.cable_index(edges[0].first, edges[0].second), 0);
    EXPECT_NE(model.bar_of_node[edges[0].first],
              model.bar_of_node[edges[0].second]);
  }
}

TEST(RobotModel, BarLengthsExact) {
  RobotModel model = BuildRobot();
  for (const auto& [a, b] : model.bars) {
    double len = (model.node_positions_neutral[a] -
                  model.node_positions_neutral[b])
                     .norm();
    EXPECT_NEAR(len, model.params.bar_length, 1e-9);
  }
}

TEST(RobotModel, NeutralCableLengthsEqual) {
  RobotModel model = BuildRobot();
  double first = (model.node_positions_neutral[model.cables[0].first] -
                  model.node_positions_neutral[model.cables[0].second])
                     .norm();
  for (const auto& [a, b] : model.cables) {
    double len = (model.node_positions_neutral[a] -
                  model.node_positions_neutral[b])
                     .norm();
    EXPECT_NEAR(len, first, 1e-9);
  }
  EXPECT_NEAR(first, model.neutral_cable_length, 1e-9);
}

TEST(RobotModel, RejectsNonPositiveParameters) {
  PhysicsParams params;
  params.cable_stiffness = 0.0;
  EXPECT_THROW(BuildRobot(params), Error);
  params = PhysicsParams{};
  params.node_mass = -1.0;
  EXPECT_THROW(BuildRobot(params), Error);
  params = PhysicsParams{};
  params.bar_length = 0.0;
  EXPECT_THROW(BuildRobot(params), Error);
}

TEST(RobotModel, EdgeSlotsLambdaBarFirst) {
  RobotModel model = BuildRobot();
  for (int f = 0; f < kNumFaces; ++f) {
    if (model.faces[f].type != FaceType::kLambda) continue;
    auto edges = model.EdgeSlots(f);
    EXPECT_GE(model.bar_index(edges[0].first, edges[0].second), 0);
    EXPECT_GE(model.cable_index(edges[1].first, edges[1].second), 0);
    EXPECT_GE(model.cable_index(edges[2].first, edges[2].second), 0);
  }
}

TEST(RobotModel, SharedEdgeAdjacency) {
  RobotModel model = BuildRobot();
  // Every face has exactly three adjacent faces.
  for (int f = 0; f < kNumFaces; ++f) {
    int adjacent = 0;
    for (int g = 0; g < kNumFaces; ++g) {
      if (model.shared_edge(f, g)) ++adjacent;
    }
    EXPECT_EQ(adjacent, 3) << "face " << f;
  }
}

}  // namespace
}  // namespace t6gps

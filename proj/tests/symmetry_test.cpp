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

#include "t6gps/symmetry.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "t6gps/engine.hpp"

namespace t6gps {
namespace {

class SymmetryTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    model_ = new RobotModel(BuildRobot());
    table_ = new SymmetryTable(SymmetryTable::Build(*model_));
    terrain_ = new Terrain(Terrain::Flat());
    settled_delta_ = new FullState(
        SettleNeutral(*model_, *terrain_, table_->canonical_face(FaceType::kDelta)));
    settled_lambda_ = new FullState(SettleNeutral(
        *model_, *terrain_, table_->canonical_face(FaceType::kLambda)));
  }
  static void TearDownTestSuite() {
    delete settled_lambda_;
    delete settled_delta_;
    delete terrain_;
    delete table_;
    delete model_;
  }

  static RobotModel* model_;
  static SymmetryTable* table_;
  static Terrain* terrain_;
  static FullState* settled_delta_;
  static FullState* settled_lambda_;
};

RobotModel* SymmetryTest::model_ = nullptr;
SymmetryTable* SymmetryTest::table_ = nullptr;
Terrain* SymmetryTest::terrain_ = nullptr;
FullState* SymmetryTest::settled_delta_ = nullptr;
FullState* SymmetryTest::settled_lambda_ = nullptr;

TEST_F(SymmetryTest, ExactlyTwentyFourMaps) {
  EXPECT_EQ(table_->size(), 24);
}

TEST_F(SymmetryTest, IdentityPresent) {
  const SymmetryMap& id = table_->map(table_->identity_index());
  for (int n = 0; n < kNumNodes; ++n) EXPECT_EQ(id.node_perm[n], n);
  EXPECT_TRUE(id.orthogonal.isApprox(Mat3::Identity(), 1e-12));
}

TEST_F(SymmetryTest, OrthogonalMatrices) {
  for (const SymmetryMap& m : table_->maps()) {
    EXPECT_TRUE((m.orthogonal * m.orthogonal.transpose())
                    .isApprox(Mat3::Identity(), 1e-12));
  }
}

TEST_F(SymmetryTest, OrthogonalRealizesNodePermutation) {
  for (const SymmetryMap& m : table_->maps()) {
    for (int n = 0; n < kNumNodes; ++n) {
      Vec3 image = m.orthogonal * model_->node_positions_neutral[n];
      EXPECT_LT(
          (image - model_->node_positions_neutral[m.node_perm[n]]).norm(),
          1e-9);
    }
  }
}

TEST_F(SymmetryTest, GroupClosureAndInverses) {
  // compose() is built by exhaustive search and throws on a closure
  // violation; verify the group axioms through it.
  int id = table_->identity_index();
  for (int i = 0; i < 24; ++i) {
    EXPECT_EQ(table_->compose(i, table_->inverse(i)), id);
    EXPECT_EQ(table_->compose(table_->inverse(i), i), id);
    EXPECT_EQ(table_->compose(i, id), i);
    EXPECT_EQ(table_->compose(id, i), i);
  }
  // Composition matches matrix products.
  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 24; ++j) {
      int k = table_->compose(i, j);
      EXPECT_TRUE((table_->map(i).orthogonal * table_->map(j).orthogonal)
                      .isApprox(table_->map(k).orthogonal, 1e-12));
    }
  }
}

TEST_F(SymmetryTest, InducedPermutationsPreserveAdjacency) {
  for (const SymmetryMap& m : table_->maps()) {
    for (int c = 0; c < kNumCables; ++c) {
      auto [a, b] = model_->cables[c];
      EXPECT_EQ(model_->cable_index(m.node_perm[a], m.node_perm[b]),
                m.cable_perm[c]);
    }
    for (int r = 0; r < kNumBars; ++r) {
      auto [a, b] = model_->bars[r];
      EXPECT_EQ(model_->bar_index(m.node_perm[a], m.node_perm[b]),
                m.bar_perm[r]);
    }
  }
}

TEST_F(SymmetryTest, BottomTriangleOfSettledState) {
  int face = table_->canonical_face(FaceType::kDelta);
  EXPECT_EQ(BottomTriangle(*settled_delta_, *model_, *terrain_, -1), face);
}

TEST_F(SymmetryTest, BottomTriangleAirborneFallsBack) {
  FullState state = *settled_delta_;
  for (int n = 0; n < kNumNodes; ++n) state.node_pos[n].z() += 5.0;
  EXPECT_EQ(BottomTriangle(state, *model_, *terrain_, 17), 17);
}

TEST_F(SymmetryTest, BottomTriangleEdgeTieBreaksToLowerId) {
  // Two adjacent faces lowered onto the ground with the CoM exactly
  // above the shared edge; everything else is symmetric and high up.
  int f1 = -1, f2 = -1;
  std::pair<int, int> edge;
  for (int a = 0; a < kNumFaces && f1 < 0; ++a) {
    for (int b = a + 1; b < kNumFaces; ++b) {
      if (auto e = model_->shared_edge(a, b)) {
        f1 = a;
        f2 = b;
        edge = *e;
        break;
      }
    }
  }
  ASSERT_GE(f1, 0);
  std::set<int> low_nodes;
  for (int n : model_->faces[f1].nodes) low_nodes.insert(n);
  for (int n : model_->faces[f2].nodes) low_nodes.insert(n);
  ASSERT_EQ(low_nodes.size(), 4u);
  int apex1 = -1, apex2 = -1;
  for (int n : model_->faces[f1].nodes) {
    if (n != edge.first && n != edge.second) apex1 = n;
  }
  for (int n : model_->faces[f2].nodes) {
    if (n != edge.first && n != edge.second) apex2 = n;
  }

  FullState state;
  for (int n = 0; n < kNumNodes; ++n) {
    state.node_pos[n] = Vec3(0.1 * n - 0.55, 0.0, 10.0);  // parked high
    state.node_vel[n] = Vec3::Zero();
  }
  state.node_pos[edge.first] = Vec3(-1.0, 0.0, 0.01);
  state.node_pos[edge.second] = Vec3(1.0, 0.0, 0.01);
  state.node_pos[apex1] = Vec3(0.0, 1.0, 0.01);
  state.node_pos[apex2] = Vec3(0.0, -1.0, 0.01);
  // Re-center the parked nodes so the CoM lands exactly on the edge.
  Vec3 com = state.com();
  for (int n = 0; n < kNumNodes; ++n) {
    if (low_nodes.count(n)) continue;
    state.node_pos[n].x() -= com.x() * 12.0 / 8.0;
    state.node_pos[n].y() -= com.y() * 12.0 / 8.0;
  }
  com = state.com();
  ASSERT_NEAR(com.x(), 0.0, 1e-12);
  ASSERT_NEAR(com.y(), 0.0, 1e-12);
  state.rest_lengths.fill(model_->neutral_cable_length);

  EXPECT_EQ(BottomTriangle(state, *model_, *terrain_, -1), std::min(f1, f2));
}

TEST_F(SymmetryTest, DeltaFrameResolutionsExhaustive) {
  // Every (Delta face, entry edge) pair resolves to a unique map that
  // sends the face to the reference face and the edge to slot 0.
  int reference = table_->canonical_face(FaceType::kDelta);
  std::set<int> used_maps;
  int cases = 0;
  for (int f = 0; f < kNumFaces; ++f) {
    if (model_->faces[f].type != FaceType::kDelta) continue;
    // A state resting on face f, generated from the canonical one.
    int to_f = -1;
    for (int k = 0; k < 24; ++k) {
      if (table_->map(k).face_perm[reference] == f) to_f = k;
    }
    ASSERT_GE(to_f, 0);
    FullState state = table_->TransformState(*settled_delta_, to_f, 0.3 * f);
    for (int g = 0; g < kNumFaces; ++g) {
      auto edge = model_->shared_edge(f, g);
      if (!edge) continue;
      ReductionFrame frame =
          ComputeReductionFrame(*table_, *model_, state, f, g);
      const SymmetryMap& m = table_->map(frame.map_index);
      EXPECT_EQ(m.face_perm[f], reference);
      EXPECT_EQ(model_->edge_slot(reference, m.node_perm[edge->first],
                                  m.node_perm[edge->second]),
                0);
      used_maps.insert(frame.map_index);
      ++cases;
    }
  }
  EXPECT_EQ(cases, 24);
  EXPECT_EQ(used_maps.size(), 24u);
}

TEST_F(SymmetryTest, LambdaNonAdjacentTieBreaksToLowestIndex) {
  int face = table_->canonical_face(FaceType::kLambda);
  // A non-adjacent previous face.
  int far_face = -1;
  for (int g = 0; g < kNumFaces; ++g) {
    if (g != face && !model_->shared_edge(face, g)) {
      far_face = g;
      break;
    }
  }
  ASSERT_GE(far_face, 0);
  ReductionFrame frame =
      ComputeReductionFrame(*table_, *model_, *settled_lambda_, face, far_face);
  int lowest = -1;
  for (int k = 0; k < 24; ++k) {
    if (table_->map(k).face_perm[face] == face) {
      lowest = k;
      break;
    }
  }
  EXPECT_EQ(frame.map_index, lowest);
}

TEST_F(SymmetryTest, ObservationLength) {
  ReductionFrame frame = ComputeReductionFrame(
      *table_, *model_, *settled_delta_,
      table_->canonical_face(FaceType::kDelta), -1);
  VecX y = ReduceObservation(*settled_delta_, frame, Vec3::UnitX(), *table_,
                             *model_);
  EXPECT_EQ(y.size(), 47);
  EXPECT_EQ(y[0], 1.0);  // Delta flag
}

TEST_F(SymmetryTest, IdentityFrameKeepsPhysicalOrder) {
  FullState state = *settled_delta_;
  for (int c = 0; c < kNumCables; ++c) {
    state.rest_lengths[c] = model_->neutral_cable_length + 1e-4 * c;
  }
  ReductionFrame frame;
  frame.map_index = table_->identity_index();
  frame.reference_face = table_->canonical_face(FaceType::kDelta);
  frame.heading_rotation = 0.0;
  VecX y = ReduceObservation(state, frame, Vec3::UnitX(), *table_, *model_);
  for (int c = 0; c < kNumCables; ++c) {
    EXPECT_DOUBLE_EQ(y[1 + c], state.rest_lengths[c]);
  }
}

// Symmetric-equivalent states produce identical observations; exercises
// rotations, reflections, and the ground-plane yaw in one sweep.
TEST_F(SymmetryTest, ObservationInvariance) {
  FullState base = *settled_delta_;
  for (int c = 0; c < kNumCables; ++c) {
    base.rest_lengths[c] = model_->neutral_cable_length * (1.0 + 0.002 * c);
  }
  int current = table_->canonical_face(FaceType::kDelta);
  int previous = -1;
  for (int g = 0; g < kNumFaces; ++g) {
    if (model_->shared_edge(current, g)) {
      previous = g;
      break;
    }
  }
  Vec3 d_hat(std::cos(0.7), std::sin(0.7), 0.0);
  ReductionFrame frame =
      ComputeReductionFrame(*table_, *model_, base, current, previous);
  VecX reference = ReduceObservation(base, frame, d_hat, *table_, *model_);

  for (int k = 0; k < 24; ++k) {
    double yaw = 0.25 * k;
    FullState moved = table_->TransformState(base, k, yaw);
    int cur2 = table_->map(k).face_perm[current];
    int prev2 = table_->map(k).face_perm[previous];
    EXPECT_EQ(BottomTriangle(moved, *model_, *terrain_, -1), cur2);
    ReductionFrame frame2 =
        ComputeReductionFrame(*table_, *model_, moved, cur2, prev2);
    Vec3 d2 = table_->world_action(k, yaw) * d_hat;
    VecX y2 = ReduceObservation(moved, frame2, d2, *table_, *model_);
    EXPECT_LT((y2 - reference).norm(), 1e-9) << "map " << k;
  }
}

// The Lambda bar-edge entry is disambiguated by the relabeled rest
// lengths, which keeps the reduction consistent across all 24 maps.
TEST_F(SymmetryTest, ObservationInvarianceLambdaVirtualEntry) {
  FullState base = *settled_lambda_;
  for (int c = 0; c < kNumCables; ++c) {
    base.rest_lengths[c] = model_->neutral_cable_length * (1.0 + 0.003 * c);
  }
  int current = table_->canonical_face(FaceType::kLambda);
  // The paired Lambda face across the bar edge.
  auto edges = model_->EdgeSlots(current);
  int previous = -1;
  for (int g = 0; g < kNumFaces; ++g) {
    if (g == current) continue;
    auto e = model_->shared_edge(current, g);
    if (e && *e == edges[0]) previous = g;
  }
  ASSERT_GE(previous, 0);
  ASSERT_EQ(model_->faces[previous].type, FaceType::kLambda);

  Vec3 d_hat(std::cos(-0.4), std::sin(-0.4), 0.0);
  ReductionFrame frame =
      ComputeReductionFrame(*table_, *model_, base, current, previous);
  VecX reference = ReduceObservation(base, frame, d_hat, *table_, *model_);
  for (int k = 0; k < 24; ++k) {
    double yaw = -0.15 * k;
    FullState moved = table_->TransformState(base, k, yaw);
    int cur2 = table_->map(k).face_perm[current];
    int prev2 = table_->map(k).face_perm[previous];
    ReductionFrame frame2 =
        ComputeReductionFrame(*table_, *model_, moved, cur2, prev2);
    Vec3 d2 = table_->world_action(k, yaw) * d_hat;
    VecX y2 = ReduceObservation(moved, frame2, d2, *table_, *model_);
    EXPECT_LT((y2 - reference).norm(), 1e-9) << "map " << k;
  }
}

TEST_F(SymmetryTest, RelabelControlRoundTrip) {
  ControlCommand canonical;
  for (int c = 0; c < kNumCables; ++c) {
    canonical.target_rest_lengths[c] = 1.0 + 0.01 * c;
  }
  for (int k = 0; k < 24; ++k) {
    ReductionFrame frame;
    frame.map_index = k;
    frame.reference_face = table_->canonical_face(FaceType::kDelta);
    ControlCommand physical = RelabelControl(canonical, frame, *table_);
    ControlCommand back = ForwardRelabelControl(physical, frame, *table_);
    for (int c = 0; c < kNumCables; ++c) {
      EXPECT_EQ(back.target_rest_lengths[c], canonical.target_rest_lengths[c]);
    }
  }
}

TEST_F(SymmetryTest, FaceStabilizerCablesFormThreeCycles) {
  // A non-identity map fixing the canonical Delta face cycles every
  // cable orbit with period three.
  int face = table_->canonical_face(FaceType::kDelta);
  int rot = -1;
  for (int k = 0; k < 24; ++k) {
    if (k != table_->identity_index() &&
        table_->map(k).face_perm[face] == face) {
      rot = k;
      break;
    }
  }
  ASSERT_GE(rot, 0);
  const auto& perm = table_->map(rot).cable_perm;
  for (int c = 0; c < kNumCables; ++c) {
    EXPECT_NE(perm[c], c);
    EXPECT_EQ(perm[perm[perm[c]]], c);
  }
}

TEST_F(SymmetryTest, CanonicalizationLossless) {
  FullState base = *settled_delta_;
  for (int c = 0; c < kNumCables; ++c) {
    base.rest_lengths[c] = model_->neutral_cable_length * (1.0 + 0.001 * c);
  }
  int current = table_->canonical_face(FaceType::kDelta);
  for (int k = 0; k < 24; ++k) {
    FullState moved = table_->TransformState(base, k, 0.11 * k + 0.05);
    int cur2 = table_->map(k).face_perm[current];
    ReductionFrame frame =
        ComputeReductionFrame(*table_, *model_, moved, cur2, -1);
    FullState canonical = CanonicalizeState(moved, frame, *table_);
    FullState back = UncanonicalizeState(canonical, frame, *table_);
    for (int n = 0; n < kNumNodes; ++n) {
      EXPECT_LT((back.node_pos[n] - moved.node_pos[n]).norm(), 1e-12);
      EXPECT_LT((back.node_vel[n] - moved.node_vel[n]).norm(), 1e-12);
    }
    for (int c = 0; c < kNumCables; ++c) {
      EXPECT_EQ(back.rest_lengths[c], moved.rest_lengths[c]);
    }
  }
}

// Relabeling plus a gravity-preserving world action commutes with the
// simulation on flat ground.
TEST_F(SymmetryTest, DynamicsEquivariance) {
  FullState x0 = *settled_delta_;
  const int control_steps = 10;  // 1 s
  std::vector<ControlCommand> commands(control_steps);
  for (int t = 0; t < control_steps; ++t) {
    for (int c = 0; c < kNumCables; ++c) {
      commands[t].target_rest_lengths[c] =
          model_->neutral_cable_length *
          (0.95 + 0.04 * std::sin(0.7 * t + 0.9 * c));
    }
  }
  auto simulate = [&](FullState state,
                      const std::vector<ControlCommand>& cmds) {
    for (const ControlCommand& cmd : cmds) {
      state = Simulate(state, cmd, *model_, *terrain_,
                       model_->params.control_period);
    }
    return state;
  };
  FullState end_direct = simulate(x0, commands);

  for (int k = 0; k < 24; ++k) {
    std::vector<ControlCommand> mapped(control_steps);
    for (int t = 0; t < control_steps; ++t) {
      mapped[t] = table_->TransformCommand(commands[t], k);
    }
    FullState end_mapped = simulate(table_->TransformState(x0, k), mapped);
    FullState expected = table_->TransformState(end_direct, k);
    double err = 0.0;
    for (int n = 0; n < kNumNodes; ++n) {
      err = std::max(err,
                     (end_mapped.node_pos[n] - expected.node_pos[n]).norm());
    }
    EXPECT_LT(err, 1e-6) << "map " << k;
  }
}

TEST_F(SymmetryTest, ExportJsonRoundTrip) {
  nlohmann::json doc = nlohmann::json::parse(table_->ExportJson());
  EXPECT_EQ(doc["order"], 24);
  EXPECT_EQ(doc["maps"].size(), 24u);
  for (const auto& jm : doc["maps"]) {
    EXPECT_EQ(jm["node_perm"].size(), 12u);
    EXPECT_EQ(jm["cable_perm"].size(), 24u);
    EXPECT_EQ(jm["orthogonal"].size(), 3u);
  }
}

}  // namespace
}  // namespace t6gps

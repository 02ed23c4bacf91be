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

#ifndef T6GPS_SYMMETRY_HPP_
#define T6GPS_SYMMETRY_HPP_

#include <array>
#include <string>
#include <vector>

#include "t6gps/engine.hpp"
#include "t6gps/robot_model.hpp"
#include "t6gps/state.hpp"
#include "t6gps/terrain.hpp"

namespace t6gps {

// One structure-preserving map: a label automorphism together with the
// signed-permutation matrix that realizes it on the neutral geometry.
struct SymmetryMap {
  std::array<int, kNumNodes> node_perm;   // node i -> node_perm[i]
  std::array<int, kNumCables> cable_perm;
  std::array<int, kNumBars> bar_perm;
  std::array<int, kNumFaces> face_perm;
  Mat3 orthogonal;  // orthogonal * neutral[i] = neutral[node_perm[i]]
  bool proper;      // det(orthogonal) > 0
};

// Frame selecting how a state is mapped into the canonical volume:
// which of the 24 maps relabels the bottom face onto the reference face,
// plus the yaw that fixes the face orientation in the ground plane.
struct ReductionFrame {
  int map_index = 0;
  int reference_face = 0;
  double heading_rotation = 0.0;  // radians about vertical
};

// The 24 maps, their composition structure, and the canonical-frame
// conventions. Immutable after Build; safe for concurrent readers.
class SymmetryTable {
 public:
  static SymmetryTable Build(const RobotModel& model);

  const std::vector<SymmetryMap>& maps() const { return maps_; }
  const SymmetryMap& map(int k) const { return maps_[k]; }
  int size() const { return static_cast<int>(maps_.size()); }

  int compose(int i, int j) const { return compose_[i][j]; }  // i after j
  int inverse(int i) const { return inverse_[i]; }
  int identity_index() const { return identity_; }

  int canonical_face(FaceType type) const {
    return type == FaceType::kDelta ? canonical_delta_ : canonical_lambda_;
  }
  // Fixed vertex used to pin the in-plane orientation of each canonical
  // face (the vertex opposite the canonical entry edge for Delta, the
  // apex off the bar for Lambda).
  int orientation_vertex(FaceType type) const {
    return type == FaceType::kDelta ? orient_delta_ : orient_lambda_;
  }
  // Canonical node ids of the six lowest nodes when the vehicle rests on
  // the canonical face of the given type (neutral shape), ascending.
  const std::array<int, 6>& lower_six_nodes(FaceType type) const {
    return type == FaceType::kDelta ? lower_six_delta_ : lower_six_lambda_;
  }

  // World-frame action paired with map k: the vertical-plane mirror for
  // improper maps, identity otherwise, optionally composed with a yaw.
  Mat3 world_action(int k, double yaw = 0.0) const;

  // Relabels the state by map k and applies world_action(k, yaw) to all
  // positions and velocities. On flat ground this is a dynamics symmetry.
  FullState TransformState(const FullState& state, int k, double yaw = 0.0) const;
  ControlCommand TransformCommand(const ControlCommand& cmd, int k) const;

  std::string ExportJson() const;  // permutations + matrices

 private:
  std::vector<SymmetryMap> maps_;
  std::array<std::array<int, 24>, 24> compose_;
  std::array<int, 24> inverse_;
  int identity_ = 0;
  int canonical_delta_ = -1;
  int canonical_lambda_ = -1;
  int orient_delta_ = -1;
  int orient_lambda_ = -1;
  std::array<int, 6> lower_six_delta_;
  std::array<int, 6> lower_six_lambda_;
  const RobotModel* model_ = nullptr;
};

// Supporting face beneath the CoM: among faces whose three nodes are all
// within 0.08 m of the local terrain, the one whose horizontal triangle
// contains the CoM projection (lowest face id on ties). Falls back to
// `previous` when no face qualifies.
int BottomTriangle(const FullState& state, const RobotModel& model,
                   const Terrain& terrain, int previous);

// Selects the map sending `current` onto the canonical face of its type.
// When previous is adjacent, the shared entry edge must map onto the
// canonical entry edge; a Lambda face entered over its bar edge is
// disambiguated by comparing canonically relabeled rest-length vectors,
// and a non-adjacent previous falls back to the lowest map index.
ReductionFrame ComputeReductionFrame(const SymmetryTable& table,
                                     const RobotModel& model,
                                     const FullState& state, int current,
                                     int previous);

// Relabel + world rotation into the canonical frame; exactly invertible.
FullState CanonicalizeState(const FullState& state, const ReductionFrame& frame,
                            const SymmetryTable& table);
FullState UncanonicalizeState(const FullState& canonical,
                              const ReductionFrame& frame,
                              const SymmetryTable& table);

// 47-entry observation: [face-type flag, 24 canonical rest lengths,
// 18 canonical bar angular velocity entries, target heading (sin, cos),
// CoM track heading (sin, cos)].
VecX ReduceObservation(const FullState& state, const ReductionFrame& frame,
                       const Vec3& target_dir, const SymmetryTable& table,
                       const RobotModel& model);

// Canonical-frame command -> physical cables (inverse relabeling).
ControlCommand RelabelControl(const ControlCommand& canonical,
                              const ReductionFrame& frame,
                              const SymmetryTable& table);
// Physical command -> canonical frame (forward relabeling).
ControlCommand ForwardRelabelControl(const ControlCommand& physical,
                                     const ReductionFrame& frame,
                                     const SymmetryTable& table);

}  // namespace t6gps

#endif  // T6GPS_SYMMETRY_HPP_

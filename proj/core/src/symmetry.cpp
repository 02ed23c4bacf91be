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

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "t6gps/error.hpp"

namespace t6gps {
namespace {

Mat3 YawMatrix(double yaw) {
  Mat3 r = Mat3::Identity();
  double c = std::cos(yaw), s = std::sin(yaw);
  r(0, 0) = c;
  r(0, 1) = -s;
  r(1, 0) = s;
  r(1, 1) = c;
  return r;
}

// xz-plane mirror; pairs with improper label maps so that the composite
// world action preserves gravity and flat-ground dynamics.
Mat3 MirrorY() {
  Mat3 m = Mat3::Identity();
  m(1, 1) = -1.0;
  return m;
}

int FindNode(const RobotModel& model, const Vec3& p) {
  for (int n = 0; n < kNumNodes; ++n) {
    if ((model.node_positions_neutral[n] - p).norm() < 1e-9) return n;
  }
  return -1;
}

// Arbitrary but fixed total order used when an entry edge cannot
// disambiguate the Lambda frame: compare canonically relabeled rest
// lengths lexicographically. Relabel-equivalent states compare
// identically, which keeps the reduction well defined across maps.
bool CanonicalRestLess(const FullState& state, const SymmetryMap& a,
                       const SymmetryMap& b) {
  for (int j = 0; j < kNumCables; ++j) {
    // canonical[j] = physical[perm^-1(j)]
    double ra = 0.0, rb = 0.0;
    for (int c = 0; c < kNumCables; ++c) {
      if (a.cable_perm[c] == j) ra = state.rest_lengths[c];
      if (b.cable_perm[c] == j) rb = state.rest_lengths[c];
    }
    if (ra < rb) return true;
    if (ra > rb) return false;
  }
  return false;
}

}  // namespace

SymmetryTable SymmetryTable::Build(const RobotModel& model) {
  SymmetryTable table;
  table.model_ = &model;

  // Brute-force over the 48 signed permutation matrices of 3-space.
  static const int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                   {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& perm : kPerms) {
    for (int sx : {1, -1}) {
      for (int sy : {1, -1}) {
        for (int sz : {1, -1}) {
          Mat3 o = Mat3::Zero();
          const int sign[3] = {sx, sy, sz};
          for (int r = 0; r < 3; ++r) o(r, perm[r]) = sign[r];

          SymmetryMap map;
          map.orthogonal = o;
          bool valid = true;
          for (int n = 0; n < kNumNodes && valid; ++n) {
            int img = FindNode(model, o * model.node_positions_neutral[n]);
            if (img < 0) valid = false;
            map.node_perm[n] = img;
          }
          if (!valid) continue;
          for (int r = 0; r < kNumBars && valid; ++r) {
            auto [a, b] = model.bars[r];
            int idx = model.bar_index(map.node_perm[a], map.node_perm[b]);
            if (idx < 0) valid = false;
            map.bar_perm[r] = idx;
          }
          if (!valid) continue;
          for (int c = 0; c < kNumCables && valid; ++c) {
            auto [a, b] = model.cables[c];
            int idx = model.cable_index(map.node_perm[a], map.node_perm[b]);
            if (idx < 0) valid = false;
            map.cable_perm[c] = idx;
          }
          if (!valid) continue;
          for (int f = 0; f < kNumFaces; ++f) {
            const auto& nodes = model.faces[f].nodes;
            int idx = model.face_index({map.node_perm[nodes[0]],
                                        map.node_perm[nodes[1]],
                                        map.node_perm[nodes[2]]});
            if (idx < 0) {
              valid = false;
              break;
            }
            map.face_perm[f] = idx;
          }
          if (!valid) continue;
          map.proper = o.determinant() > 0.0;
          table.maps_.push_back(map);
        }
      }
    }
  }

  if (table.maps_.size() != 24) {
    throw Error(ErrorCategory::kInternal,
                "symmetry enumeration yielded " +
                    std::to_string(table.maps_.size()) + " maps, expected 24");
  }

  // Composition table; compose(i, j) applies j first.
  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 24; ++j) {
      std::array<int, kNumNodes> np;
      for (int n = 0; n < kNumNodes; ++n) {
        np[n] = table.maps_[i].node_perm[table.maps_[j].node_perm[n]];
      }
      int found = -1;
      for (int k = 0; k < 24; ++k) {
        if (table.maps_[k].node_perm == np) {
          found = k;
          break;
        }
      }
      if (found < 0) {
        throw Error(ErrorCategory::kInternal, "symmetry group not closed");
      }
      table.compose_[i][j] = found;
    }
  }
  table.identity_ = -1;
  for (int k = 0; k < 24; ++k) {
    bool ident = true;
    for (int n = 0; n < kNumNodes; ++n) {
      if (table.maps_[k].node_perm[n] != n) ident = false;
    }
    if (ident) table.identity_ = k;
  }
  if (table.identity_ < 0) {
    throw Error(ErrorCategory::kInternal, "identity map missing");
  }
  for (int i = 0; i < 24; ++i) {
    int inv = -1;
    for (int j = 0; j < 24; ++j) {
      if (table.compose_[i][j] == table.identity_) inv = j;
    }
    if (inv < 0) throw Error(ErrorCategory::kInternal, "map without inverse");
    table.inverse_[i] = inv;
  }

  for (int f = 0; f < kNumFaces; ++f) {
    if (model.faces[f].type == FaceType::kDelta && table.canonical_delta_ < 0) {
      table.canonical_delta_ = f;
    }
    if (model.faces[f].type == FaceType::kLambda &&
        table.canonical_lambda_ < 0) {
      table.canonical_lambda_ = f;
    }
  }
  // Orientation vertices: opposite the canonical entry edge for Delta
  // (EdgeSlots()[0] = (n0,n1), so n2), the off-bar apex for Lambda.
  table.orient_delta_ = model.faces[table.canonical_delta_].nodes[2];
  {
    auto edges = model.EdgeSlots(table.canonical_lambda_);
    for (int n : model.faces[table.canonical_lambda_].nodes) {
      if (n != edges[0].first && n != edges[0].second) {
        table.orient_lambda_ = n;
      }
    }
  }

  // Six lowest canonical nodes when resting on each canonical face.
  for (FaceType type : {FaceType::kDelta, FaceType::kLambda}) {
    int face = table.canonical_face(type);
    Vec3 outward = model.face_centroid_neutral(face).normalized();
    Eigen::Quaterniond q =
        Eigen::Quaterniond::FromTwoVectors(outward, Vec3(0, 0, -1));
    Mat3 rot = q.toRotationMatrix();
    std::array<std::pair<double, int>, kNumNodes> byz;
    for (int n = 0; n < kNumNodes; ++n) {
      double z = (rot * model.node_positions_neutral[n]).z();
      byz[n] = {std::round(z * 1e9) / 1e9, n};
    }
    std::sort(byz.begin(), byz.end());
    std::array<int, 6> lower;
    for (int i = 0; i < 6; ++i) lower[i] = byz[i].second;
    std::sort(lower.begin(), lower.end());
    (type == FaceType::kDelta ? table.lower_six_delta_
                              : table.lower_six_lambda_) = lower;
  }
  return table;
}

Mat3 SymmetryTable::world_action(int k, double yaw) const {
  Mat3 w = YawMatrix(yaw);
  if (!maps_[k].proper) w = w * MirrorY();
  return w;
}

FullState SymmetryTable::TransformState(const FullState& state, int k,
                                        double yaw) const {
  const SymmetryMap& m = maps_[k];
  Mat3 w = world_action(k, yaw);
  FullState out;
  for (int n = 0; n < kNumNodes; ++n) {
    out.node_pos[m.node_perm[n]] = w * state.node_pos[n];
    out.node_vel[m.node_perm[n]] = w * state.node_vel[n];
  }
  for (int c = 0; c < kNumCables; ++c) {
    out.rest_lengths[m.cable_perm[c]] = state.rest_lengths[c];
  }
  out.sim_time = state.sim_time;
  return out;
}

ControlCommand SymmetryTable::TransformCommand(const ControlCommand& cmd,
                                               int k) const {
  const SymmetryMap& m = maps_[k];
  ControlCommand out;
  for (int c = 0; c < kNumCables; ++c) {
    out.target_rest_lengths[m.cable_perm[c]] = cmd.target_rest_lengths[c];
  }
  return out;
}

int BottomTriangle(const FullState& state, const RobotModel& model,
                   const Terrain& terrain, int previous) {
  constexpr double kContactBand = 0.08;  // m
  constexpr double kEdgeEps = 1e-9;
  Vec3 com = state.com();
  for (int f = 0; f < kNumFaces; ++f) {
    const auto& nodes = model.faces[f].nodes;
    bool grounded = true;
    for (int n : nodes) {
      const Vec3& p = state.node_pos[n];
      if (p.z() - terrain.height(p.x(), p.y()) >= kContactBand) {
        grounded = false;
        break;
      }
    }
    if (!grounded) continue;
    // CoM horizontal projection inside the face triangle (inclusive).
    Vec2 a = state.node_pos[nodes[0]].head<2>();
    Vec2 b = state.node_pos[nodes[1]].head<2>();
    Vec2 c = state.node_pos[nodes[2]].head<2>();
    Vec2 p = com.head<2>();
    double d1 = (b.x() - a.x()) * (p.y() - a.y()) -
                (b.y() - a.y()) * (p.x() - a.x());
    double d2 = (c.x() - b.x()) * (p.y() - b.y()) -
                (c.y() - b.y()) * (p.x() - b.x());
    double d3 = (a.x() - c.x()) * (p.y() - c.y()) -
                (a.y() - c.y()) * (p.x() - c.x());
    bool has_neg = d1 < -kEdgeEps || d2 < -kEdgeEps || d3 < -kEdgeEps;
    bool has_pos = d1 > kEdgeEps || d2 > kEdgeEps || d3 > kEdgeEps;
    if (!(has_neg && has_pos)) return f;
  }
  return previous;
}

ReductionFrame ComputeReductionFrame(const SymmetryTable& table,
                                     const RobotModel& model,
                                     const FullState& state, int current,
                                     int previous) {
  FaceType type = model.faces[current].type;
  int reference = table.canonical_face(type);

  std::vector<int> candidates;
  for (int k = 0; k < table.size(); ++k) {
    if (table.map(k).face_perm[current] == reference) candidates.push_back(k);
  }
  if (candidates.empty()) {
    throw Error(ErrorCategory::kInternal,
                "no symmetry map reaches the canonical face");
  }

  auto entry = (previous >= 0 && previous != current)
                   ? model.shared_edge(previous, current)
                   : std::nullopt;
  if (entry) {
    bool entry_is_virtual =
        model.cable_index(entry->first, entry->second) < 0;
    // Delta entry edges pin slot 0; Lambda cable entries pin slot 1.
    // A Lambda virtual-edge entry maps to slot 0 under both candidates
    // and falls through to the comparator below.
    int required_slot =
        type == FaceType::kDelta ? 0 : (entry_is_virtual ? 0 : 1);
    std::vector<int> filtered;
    for (int k : candidates) {
      const SymmetryMap& m = table.map(k);
      int slot = model.edge_slot(reference, m.node_perm[entry->first],
                                 m.node_perm[entry->second]);
      if (slot == required_slot) filtered.push_back(k);
    }
    if (filtered.empty()) {
      throw Error(ErrorCategory::kInternal,
                  "entry edge does not map onto the canonical face");
    }
    candidates = filtered;
    if (candidates.size() > 1) {
      // Lambda entered over its bar edge: order by relabeled rest lengths.
      std::sort(candidates.begin(), candidates.end(), [&](int x, int y) {
        if (CanonicalRestLess(state, table.map(x), table.map(y))) return true;
        if (CanonicalRestLess(state, table.map(y), table.map(x))) return false;
        return x < y;
      });
      candidates.resize(1);
    }
  } else {
    // Jump or trajectory start: lowest map index.
    std::sort(candidates.begin(), candidates.end());
    candidates.resize(1);
  }

  ReductionFrame frame;
  frame.map_index = candidates.front();
  frame.reference_face = reference;

  // Yaw pinning the canonical face orientation: the physical node that
  // relabels to the orientation vertex ends up along +x from the face
  // centroid after the world action.
  const SymmetryMap& m = table.map(frame.map_index);
  int vref = table.orientation_vertex(type);
  int phys = -1;
  for (int n = 0; n < kNumNodes; ++n) {
    if (m.node_perm[n] == vref) phys = n;
  }
  Vec3 centroid = Vec3::Zero();
  for (int n : model.faces[current].nodes) centroid += state.node_pos[n];
  centroid /= 3.0;
  Vec3 w = table.world_action(frame.map_index, 0.0) *
           (state.node_pos[phys] - centroid);
  double angle = std::atan2(w.y(), w.x());
  frame.heading_rotation = -angle;
  return frame;
}

FullState CanonicalizeState(const FullState& state, const ReductionFrame& frame,
                            const SymmetryTable& table) {
  return table.TransformState(state, frame.map_index, frame.heading_rotation);
}

FullState UncanonicalizeState(const FullState& canonical,
                              const ReductionFrame& frame,
                              const SymmetryTable& table) {
  const SymmetryMap& m = table.map(frame.map_index);
  Mat3 w_inv =
      table.world_action(frame.map_index, frame.heading_rotation).transpose();
  FullState out;
  for (int n = 0; n < kNumNodes; ++n) {
    out.node_pos[n] = w_inv * canonical.node_pos[m.node_perm[n]];
    out.node_vel[n] = w_inv * canonical.node_vel[m.node_perm[n]];
  }
  for (int c = 0; c < kNumCables; ++c) {
    out.rest_lengths[c] = canonical.rest_lengths[m.cable_perm[c]];
  }
  out.sim_time = canonical.sim_time;
  return out;
}

VecX ReduceObservation(const FullState& state, const ReductionFrame& frame,
                       const Vec3& target_dir, const SymmetryTable& table,
                       const RobotModel& model) {
  FullState canonical = CanonicalizeState(state, frame, table);
  const Face& face = model.faces[frame.reference_face];

  VecX y(kObservationDim);
  int at = 0;
  y[at++] = face.type == FaceType::kDelta ? 1.0 : 0.0;
  for (int c = 0; c < kNumCables; ++c) y[at++] = canonical.rest_lengths[c];
  auto omega = BarAngularVelocities(canonical, model);
  for (int r = 0; r < kNumBars; ++r) {
    y[at++] = omega[r].x();
    y[at++] = omega[r].y();
    y[at++] = omega[r].z();
  }
  Mat3 w = table.world_action(frame.map_index, frame.heading_rotation);
  Vec3 t = w * target_dir;
  double theta_t = std::atan2(t.y(), t.x());
  y[at++] = std::sin(theta_t);
  y[at++] = std::cos(theta_t);
  Vec3 v = canonical.com_velocity();
  double theta_v =
      v.head<2>().norm() < 1e-9 ? 0.0 : std::atan2(v.y(), v.x());
  y[at++] = std::sin(theta_v);
  y[at++] = std::cos(theta_v);
  return y;
}

ControlCommand RelabelControl(const ControlCommand& canonical,
                              const ReductionFrame& frame,
                              const SymmetryTable& table) {
  const SymmetryMap& m = table.map(frame.map_index);
  ControlCommand physical;
  for (int c = 0; c < kNumCables; ++c) {
    physical.target_rest_lengths[c] =
        canonical.target_rest_lengths[m.cable_perm[c]];
  }
  return physical;
}

ControlCommand ForwardRelabelControl(const ControlCommand& physical,
                                     const ReductionFrame& frame,
                                     const SymmetryTable& table) {
  const SymmetryMap& m = table.map(frame.map_index);
  ControlCommand canonical;
  for (int c = 0; c < kNumCables; ++c) {
    canonical.target_rest_lengths[m.cable_perm[c]] =
        physical.target_rest_lengths[c];
  }
  return canonical;
}

std::string SymmetryTable::ExportJson() const {
  nlohmann::json doc;
  doc["order"] = maps_.size();
  doc["canonical_delta_face"] = canonical_delta_;
  doc["canonical_lambda_face"] = canonical_lambda_;
  nlohmann::json arr = nlohmann::json::array();
  for (const SymmetryMap& m : maps_) {
    nlohmann::json jm;
    jm["node_perm"] = m.node_perm;
    jm["cable_perm"] = m.cable_perm;
    jm["bar_perm"] = m.bar_perm;
    jm["face_perm"] = m.face_perm;
    jm["proper"] = m.proper;
    std::array<std::array<double, 3>, 3> o;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) o[r][c] = m.orthogonal(r, c);
    }
    jm["orthogonal"] = o;
    arr.push_back(jm);
  }
  doc["maps"] = arr;
  return doc.dump(2);
}

}  // namespace t6gps

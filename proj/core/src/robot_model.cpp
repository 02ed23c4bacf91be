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

#include <algorithm>
#include <cmath>
#include <set>

#include "t6gps/error.hpp"

namespace t6gps {
namespace {

constexpr double kGolden = 1.6180339887498948482;

void CheckPositive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCategory::kConfig,
                std::string("physical parameter must be positive: ") + name);
  }
}

}  // namespace

int RobotModel::cable_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (int c = 0; c < kNumCables; ++c) {
    if (cables[c].first == a && cables[c].second == b) return c;
  }
  return -1;
}

int RobotModel::bar_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (int r = 0; r < kNumBars; ++r) {
    if (bars[r].first == a && bars[r].second == b) return r;
  }
  return -1;
}

int RobotModel::face_index(const std::array<int, 3>& nodes) const {
  std::array<int, 3> key = nodes;
  std::sort(key.begin(), key.end());
  for (int f = 0; f < kNumFaces; ++f) {
    if (faces[f].nodes == key) return f;
  }
  return -1;
}

std::optional<std::pair<int, int>> RobotModel::shared_edge(int face_a,
                                                           int face_b) const {
  if (face_a == face_b) return std::nullopt;
  std::vector<int> common;
  for (int u : faces[face_a].nodes) {
    for (int v : faces[face_b].nodes) {
      if (u == v) common.push_back(u);
    }
  }
  if (common.size() != 2) return std::nullopt;
  return std::make_pair(std::min(common[0], common[1]),
                        std::max(common[0], common[1]));
}

std::array<std::pair<int, int>, 3> RobotModel::EdgeSlots(int face) const {
  const auto& n = faces[face].nodes;
  std::array<std::pair<int, int>, 3> edges = {
      std::make_pair(n[0], n[1]), std::make_pair(n[0], n[2]),
      std::make_pair(n[1], n[2])};
  if (faces[face].type == FaceType::kLambda) {
    // the cable-less virtual edge first
    for (int i = 0; i < 3; ++i) {
      if (cable_index(edges[i].first, edges[i].second) < 0) {
        std::swap(edges[0], edges[i]);
        break;
      }
    }
    if (edges[1] > edges[2]) std::swap(edges[1], edges[2]);
  }
  return edges;
}

int RobotModel::edge_slot(int face, int a, int b) const {
  if (a > b) std::swap(a, b);
  auto edges = EdgeSlots(face);
  for (int i = 0; i < 3; ++i) {
    if (edges[i].first == a && edges[i].second == b) return i;
  }
  return -1;
}

Vec3 RobotModel::face_centroid_neutral(int face) const {
  Vec3 c = Vec3::Zero();
  for (int n : faces[face].nodes) c += node_positions_neutral[n];
  return c / 3.0;
}

RobotModel BuildRobot(const PhysicsParams& params) {
  CheckPositive(params.node_mass, "node_mass");
  CheckPositive(params.bar_length, "bar_length");
  CheckPositive(params.cable_stiffness, "cable_stiffness");
  CheckPositive(params.cable_damping, "cable_damping");
  CheckPositive(params.rod_stiffness, "rod_stiffness");
  CheckPositive(params.rod_damping, "rod_damping");
  CheckPositive(params.contact_normal_stiffness, "contact_normal_stiffness");
  CheckPositive(params.contact_damping, "contact_damping");
  CheckPositive(params.friction_coefficient, "friction_coefficient");
  CheckPositive(params.friction_regularization, "friction_regularization");
  CheckPositive(params.actuator_rate_limit, "actuator_rate_limit");
  CheckPositive(params.rest_length_lower_frac, "rest_length_lower_frac");
  CheckPositive(params.rest_length_upper_frac, "rest_length_upper_frac");
  CheckPositive(params.dt, "dt");
  CheckPositive(params.control_period, "control_period");
  if (params.gravity < 0.0 || !std::isfinite(params.gravity)) {
    throw Error(ErrorCategory::kConfig, "gravity must be non-negative");
  }
  if (params.rest_length_lower_frac >= params.rest_length_upper_frac) {
    throw Error(ErrorCategory::kConfig, "rest length bounds out of order");
  }
  CheckPositive(params.prestress_frac, "prestress_frac");
  if (params.prestress_frac < params.rest_length_lower_frac ||
      params.prestress_frac > params.rest_length_upper_frac) {
    throw Error(ErrorCategory::kConfig,
                "prestress_frac outside rest length bounds");
  }
  if (params.dt > 5e-3) {
    throw Error(ErrorCategory::kConfig, "dt must be in (0, 5e-3]");
  }

  RobotModel model;
  model.params = params;

  // Vertices: cyclic permutations of (0, +-1, +-phi), scaled by
  // bar_length / (2 phi) so the 6 long chords (the strut pairs that
  // flip the sign of the phi coordinate) measure bar_length. The 30
  // icosahedron edges then split into 24 cables and the 6 cable-less
  // "virtual" edges (the pairs flipping the sign of the unit
  // coordinate) that bound the Lambda faces.
  const double s = params.bar_length / (2.0 * kGolden);
  int idx = 0;
  for (int perm = 0; perm < 3; ++perm) {
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        double base[3] = {0.0, s1 * 1.0, s2 * kGolden};
        Vec3 p;
        for (int k = 0; k < 3; ++k) p[(k + perm) % 3] = base[k] * s;
        model.node_positions_neutral[idx++] = p;
      }
    }
  }

  auto coordinate_flips = [&](int a, int b, double magnitude) {
    const Vec3& pa = model.node_positions_neutral[a];
    const Vec3& pb = model.node_positions_neutral[b];
    int diff_axis = -1;
    int diffs = 0;
    for (int k = 0; k < 3; ++k) {
      if (std::abs(pa[k] - pb[k]) > 1e-9) {
        diff_axis = k;
        ++diffs;
      }
    }
    return diffs == 1 && std::abs(std::abs(pa[diff_axis]) - magnitude) < 1e-9;
  };

  // Bars: the long chords flipping the +-phi coordinate.
  int bar_count = 0;
  model.bar_of_node.fill(-1);
  for (int a = 0; a < kNumNodes; ++a) {
    for (int b = a + 1; b < kNumNodes; ++b) {
      if (!coordinate_flips(a, b, kGolden * s)) continue;
      if (bar_count >= kNumBars) {
        throw Error(ErrorCategory::kInternal, "too many bar chords");
      }
      model.bars[bar_count] = {a, b};
      model.bar_of_node[a] = bar_count;
      model.bar_of_node[b] = bar_count;
      ++bar_count;
    }
  }
  if (bar_count != kNumBars) {
    throw Error(ErrorCategory::kInternal, "bar chord search failed");
  }

  // Icosahedron edges (length 2s): cables except the virtual pairs.
  const double edge2 = 4.0 * s * s;
  std::vector<std::pair<int, int>> edges;
  int cable_count = 0;
  for (int a = 0; a < kNumNodes; ++a) {
    for (int b = a + 1; b < kNumNodes; ++b) {
      double d2 = (model.node_positions_neutral[a] -
                   model.node_positions_neutral[b])
                      .squaredNorm();
      if (std::abs(d2 - edge2) >= 1e-9 * edge2) continue;
      edges.emplace_back(a, b);
      if (coordinate_flips(a, b, s)) continue;  // virtual edge
      if (cable_count >= kNumCables) {
        throw Error(ErrorCategory::kInternal, "too many cable edges");
      }
      model.cables[cable_count++] = {a, b};
    }
  }
  if (edges.size() != 30 || cable_count != kNumCables) {
    throw Error(ErrorCategory::kInternal, "icosahedron edge partition failed");
  }

  // Faces: all vertex triples that are pairwise edges.
  std::set<std::array<int, 3>> face_set;
  auto is_edge = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
  };
  std::sort(edges.begin(), edges.end());
  for (int a = 0; a < kNumNodes; ++a) {
    for (int b = a + 1; b < kNumNodes; ++b) {
      if (!is_edge(a, b)) continue;
      for (int c = b + 1; c < kNumNodes; ++c) {
        if (is_edge(a, c) && is_edge(b, c)) face_set.insert({a, b, c});
      }
    }
  }
  if (face_set.size() != kNumFaces) {
    throw Error(ErrorCategory::kInternal, "expected 20 triangular faces");
  }
  int f = 0;
  for (const auto& nodes : face_set) {
    int virtual_edges = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        if (model.cable_index(nodes[i], nodes[j]) < 0) ++virtual_edges;
      }
    }
    if (virtual_edges > 1) {
      throw Error(ErrorCategory::kInternal, "face with multiple virtual edges");
    }
    model.faces[f].nodes = nodes;
    model.faces[f].type =
        virtual_edges == 1 ? FaceType::kLambda : FaceType::kDelta;
    ++f;
  }

  // Per-node incident cables.
  for (int n = 0; n < kNumNodes; ++n) {
    int k = 0;
    for (int c = 0; c < kNumCables; ++c) {
      if (model.cables[c].first == n || model.cables[c].second == n) {
        if (k >= 4) {
          throw Error(ErrorCategory::kInternal, "node with >4 cables");
        }
        model.cables_of_node[n][k++] = c;
      }
    }
    if (k != 4 || model.bar_of_node[n] < 0) {
      throw Error(ErrorCategory::kInternal, "node degree check failed");
    }
  }

  model.neutral_cable_length = 2.0 * s;  // = bar_length / phi
  model.neutral_rest_length =
      params.prestress_frac * model.neutral_cable_length;
  model.rest_length_min =
      params.rest_length_lower_frac * model.neutral_cable_length;
  model.rest_length_max =
      params.rest_length_upper_frac * model.neutral_cable_length;
  return model;
}

}  // namespace t6gps

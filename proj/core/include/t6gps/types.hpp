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

#ifndef T6GPS_TYPES_HPP_
#define T6GPS_TYPES_HPP_

#include <Eigen/Core>

namespace t6gps {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Structure counts of the 6-bar vehicle; fixed by the topology.
inline constexpr int kNumNodes = 12;
inline constexpr int kNumBars = 6;
inline constexpr int kNumCables = 24;
inline constexpr int kNumFaces = 20;

// Policy observation layout: face-type flag, 24 rest lengths,
// 6 bar angular velocities, target heading (sin,cos), track heading
// (sin,cos).
inline constexpr int kObservationDim = 1 + kNumCables + 3 * kNumBars + 2 + 2;

}  // namespace t6gps

#endif  // T6GPS_TYPES_HPP_

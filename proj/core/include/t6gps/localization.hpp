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

#ifndef T6GPS_LOCALIZATION_HPP_
#define T6GPS_LOCALIZATION_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "t6gps/state.hpp"
#include "t6gps/symmetry.hpp"

namespace t6gps {

// Where a segment sits inside its trajectory.
enum class PartialKind { kNone, kLeading, kTrailing, kTruncated };

// Collapsed form used for classification.
enum class SegmentPartial { kComplete, kPartial, kTruncated };

// Entry/exit edge in canonical-face terms. Slots follow
// RobotModel::EdgeSlots of the reference face: for Delta faces slot 0 is
// the canonical entry edge; for Lambda faces slot 0 is the bar edge and
// slots 1/2 the two cable edges.
enum class EdgeKind { kNone, kJump, kSlot0, kSlot1, kSlot2 };

const char* ToString(EdgeKind kind);
const char* ToString(SegmentPartial partial);

struct SegmentClassKey {
  FaceType face_type = FaceType::kDelta;
  EdgeKind entry = EdgeKind::kNone;
  EdgeKind exit = EdgeKind::kNone;
  SegmentPartial partial = SegmentPartial::kComplete;

  auto operator<=>(const SegmentClassKey&) const = default;
  std::string ToString() const;
};

struct Segment {
  int trajectory_id = 0;
  int start = 0;  // [start, end)
  int end = 0;
  int bottom_face = -1;
  ReductionFrame frame;
  EdgeKind entry = EdgeKind::kNone;
  EdgeKind exit = EdgeKind::kNone;
  PartialKind partial = PartialKind::kNone;
  int length() const { return end - start; }
};

struct SegmentationResult {
  std::vector<Segment> segments;
  int discarded_steps = 0;  // truncation remainders, excluded from fits
};

// Cuts maximal constant-bottom-face runs; first/last runs are leading/
// trailing partial (trailing wins for a single run), runs longer than
// truncation_cap are cut there with the remainder discarded. Entry/exit
// edges are resolved through each segment's own reduction frame, which
// is taken from the run's first recorded step.
SegmentationResult SegmentTrajectory(const Trajectory& traj, int trajectory_id,
                                     int truncation_cap,
                                     const RobotModel& model,
                                     const SymmetryTable& table);

SegmentClassKey ClassifySegment(const Segment& seg, const RobotModel& model);

// Uniform stretch: absolute source indices t(k) = start + floor(k*n/T_xi).
std::vector<int> WarpIndices(int start, int n, int t_xi);

enum class ReductionChoice {
  kComVelOnly,
  kNodesLower6,
  kNodes,
  kNodesVels,
  kNodesCables,
};

ReductionChoice ParseReductionChoice(const std::string& name);
const char* ToString(ReductionChoice choice);
int ReducedDim(ReductionChoice choice);

// Reduced state in the given canonical frame: CoM velocity first (cost
// observability), then CoM-relative node positions / velocities / rest
// lengths per the choice.
VecX ReduceState(const FullState& state, const ReductionFrame& frame,
                 ReductionChoice choice, const SymmetryTable& table,
                 const RobotModel& model);

struct ReducedPoint {
  VecX x;       // reduced state
  VecX u;       // canonical-frame command (24)
  VecX x_next;  // reduced next state, same frame
};

// One linear mode of a multi-modal cell fit.
struct ModeModel {
  MatX F;  // x_next ~ F [x;u] + f
  VecX f;
  MatX P;  // u ~ P x + p
  VecX p;
  VecX dyn_noise;  // diagonal residual covariance
  VecX pol_noise;
  int inlier_count = 0;
  bool low_rank = false;  // ridge fallback or rank-deficient design
};

// Recursive RANSAC: mode h is fit on the outliers of mode h-1, with the
// inlier threshold set to one standard deviation of the residuals about
// a preliminary least-squares fit. Fewer than min_fit points yield a
// single ridge-damped least-squares mode flagged low_rank.
std::vector<ModeModel> FitMultimodal(const std::vector<ReducedPoint>& points,
                                     int min_fit, int max_modes, uint64_t seed,
                                     int ransac_iters = 100);

// Index of the mode minimizing ||x_next - (F [x;u] + f)||; lowest index
// on ties.
int AssignMode(const ReducedPoint& point, const std::vector<ModeModel>& modes);

struct ClassSeries {
  int t_xi = 0;                       // warped series length
  std::vector<std::vector<ModeModel>> cells;  // t_xi entries, possibly empty
  int segment_count = 0;
  int point_count = 0;
};

struct SurrogateModelSet {
  std::map<SegmentClassKey, ClassSeries> classes;
  std::string ExportJson() const;
};

// Per-step association into the model set (valid for every step of the
// trajectory; steps past a truncation cap bind to the truncated class
// with a clamped warp index).
struct StepBinding {
  SegmentClassKey key;
  int txi_index = 0;
  int segment_index = -1;  // into the trajectory's segment list
};

struct LocalizationOptions {
  int truncation_cap = 50;
  int txi_min = 5;
  ReductionChoice choice = ReductionChoice::kNodes;
  int max_modes = 6;
  int ransac_iters = 100;
  uint64_t seed = 0;
  int workers = 1;
};

struct ClassCensusRow {
  SegmentClassKey key;
  int segment_count = 0;
  int step_count = 0;
  int t_xi = 0;
  int max_modes_seen = 0;
  double mean_modes = 0.0;
};

struct LocalizationResult {
  SurrogateModelSet models;
  std::vector<SegmentationResult> segmentation;       // per trajectory
  std::vector<std::vector<StepBinding>> bindings;     // per trajectory/step
  std::vector<ClassCensusRow> census;
  int discarded_steps = 0;
};

// Full post-hoc localization over one iteration's samples: segmentation,
// classification, per-class median-length warping, reduction, and
// multi-modal fitting per (class, warped step) cell.
LocalizationResult Localize(const std::vector<Trajectory>& trajectories,
                            const LocalizationOptions& options,
                            const SymmetryTable& table,
                            const RobotModel& model);

}  // namespace t6gps

#endif  // T6GPS_LOCALIZATION_HPP_

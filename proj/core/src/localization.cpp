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

#include "t6gps/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "t6gps/error.hpp"
#include "t6gps/parallel.hpp"
#include "t6gps/rng.hpp"

namespace t6gps {

const char* ToString(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kNone: return "none";
    case EdgeKind::kJump: return "jump";
    case EdgeKind::kSlot0: return "e0";
    case EdgeKind::kSlot1: return "e1";
    case EdgeKind::kSlot2: return "e2";
  }
  return "?";
}

const char* ToString(SegmentPartial partial) {
  switch (partial) {
    case SegmentPartial::kComplete: return "complete";
    case SegmentPartial::kPartial: return "partial";
    case SegmentPartial::kTruncated: return "truncated";
  }
  return "?";
}

std::string SegmentClassKey::ToString() const {
  std::string s = face_type == FaceType::kDelta ? "D" : "L";
  s += ":";
  s += t6gps::ToString(entry);
  s += ">";
  s += t6gps::ToString(exit);
  s += ":";
  s += t6gps::ToString(partial);
  return s;
}

namespace {

EdgeKind SlotToKind(int slot) {
  switch (slot) {
    case 0: return EdgeKind::kSlot0;
    case 1: return EdgeKind::kSlot1;
    case 2: return EdgeKind::kSlot2;
    default: return EdgeKind::kJump;
  }
}

// Canonical edge kind of the shared edge between two faces, as seen
// through `frame` of the segment on `face`.
EdgeKind ResolveEdge(const RobotModel& model, const SymmetryTable& table,
                     const ReductionFrame& frame, int face, int other_face) {
  auto edge = model.shared_edge(face, other_face);
  if (!edge) return EdgeKind::kJump;
  const SymmetryMap& m = table.map(frame.map_index);
  int slot = model.edge_slot(frame.reference_face, m.node_perm[edge->first],
                             m.node_perm[edge->second]);
  return SlotToKind(slot);
}

}  // namespace

SegmentationResult SegmentTrajectory(const Trajectory& traj, int trajectory_id,
                                     int truncation_cap,
                                     const RobotModel& model,
                                     const SymmetryTable& table) {
  SegmentationResult result;
  int n = traj.length();
  if (n == 0) return result;

  // Maximal constant-face runs.
  std::vector<std::pair<int, int>> runs;  // [start, end)
  int run_start = 0;
  for (int t = 1; t <= n; ++t) {
    if (t == n || traj.steps[t].bottom_face != traj.steps[run_start].bottom_face) {
      runs.emplace_back(run_start, t);
      run_start = t;
    }
  }

  int num_runs = static_cast<int>(runs.size());
  for (int i = 0; i < num_runs; ++i) {
    auto [a, b] = runs[i];
    Segment seg;
    seg.trajectory_id = trajectory_id;
    seg.start = a;
    seg.bottom_face = traj.steps[a].bottom_face;
    seg.frame.map_index = traj.steps[a].frame_map_index;
    seg.frame.heading_rotation = traj.steps[a].frame_heading;
    seg.frame.reference_face =
        table.canonical_face(model.faces[seg.bottom_face].type);

    seg.entry = i == 0 ? EdgeKind::kNone
                       : ResolveEdge(model, table, seg.frame, seg.bottom_face,
                                     traj.steps[runs[i - 1].first].bottom_face);
    seg.exit = i + 1 == num_runs
                   ? EdgeKind::kNone
                   : ResolveEdge(model, table, seg.frame, seg.bottom_face,
                                 traj.steps[runs[i + 1].first].bottom_face);
    seg.partial = PartialKind::kNone;
    if (i == 0) seg.partial = PartialKind::kLeading;
    if (i + 1 == num_runs) seg.partial = PartialKind::kTrailing;

    if (b - a > truncation_cap) {
      result.discarded_steps += (b - a) - truncation_cap;
      b = a + truncation_cap;
      seg.partial = PartialKind::kTruncated;
      seg.exit = EdgeKind::kNone;
    }
    seg.end = b;
    result.segments.push_back(seg);
  }
  return result;
}

SegmentClassKey ClassifySegment(const Segment& seg, const RobotModel& model) {
  SegmentClassKey key;
  key.face_type = model.faces[seg.bottom_face].type;
  key.entry = seg.entry;
  key.exit = seg.exit;
  switch (seg.partial) {
    case PartialKind::kNone: key.partial = SegmentPartial::kComplete; break;
    case PartialKind::kLeading:
    case PartialKind::kTrailing: key.partial = SegmentPartial::kPartial; break;
    case PartialKind::kTruncated: key.partial = SegmentPartial::kTruncated; break;
  }
  return key;
}

std::vector<int> WarpIndices(int start, int n, int t_xi) {
  if (n < 1 || t_xi < 1) {
    throw Error(ErrorCategory::kConfig, "warp needs n, t_xi >= 1");
  }
  std::vector<int> idx(t_xi);
  for (int k = 0; k < t_xi; ++k) {
    idx[k] = start + static_cast<int>((static_cast<int64_t>(k) * n) / t_xi);
  }
  return idx;
}

ReductionChoice ParseReductionChoice(const std::string& name) {
  if (name == "com-vel-only") return ReductionChoice::kComVelOnly;
  if (name == "nodes-lower6") return ReductionChoice::kNodesLower6;
  if (name == "nodes") return ReductionChoice::kNodes;
  if (name == "nodes+vels") return ReductionChoice::kNodesVels;
  if (name == "nodes+cables") return ReductionChoice::kNodesCables;
  throw Error(ErrorCategory::kConfig, "unknown reduction choice: " + name);
}

const char* ToString(ReductionChoice choice) {
  switch (choice) {
    case ReductionChoice::kComVelOnly: return "com-vel-only";
    case ReductionChoice::kNodesLower6: return "nodes-lower6";
    case ReductionChoice::kNodes: return "nodes";
    case ReductionChoice::kNodesVels: return "nodes+vels";
    case ReductionChoice::kNodesCables: return "nodes+cables";
  }
  return "?";
}

int ReducedDim(ReductionChoice choice) {
  switch (choice) {
    case ReductionChoice::kComVelOnly: return 3;
    case ReductionChoice::kNodesLower6: return 3 + 6 * 3;
    case ReductionChoice::kNodes: return 3 + kNumNodes * 3;
    case ReductionChoice::kNodesVels: return 3 + kNumNodes * 6;
    case ReductionChoice::kNodesCables: return 3 + kNumNodes * 3 + kNumCables;
  }
  return 0;
}

VecX ReduceState(const FullState& state, const ReductionFrame& frame,
                 ReductionChoice choice, const SymmetryTable& table,
                 const RobotModel& model) {
  FullState canonical = CanonicalizeState(state, frame, table);
  Vec3 com = canonical.com();
  VecX x(ReducedDim(choice));
  x.head<3>() = canonical.com_velocity();
  int at = 3;
  switch (choice) {
    case ReductionChoice::kComVelOnly:
      break;
    case ReductionChoice::kNodesLower6: {
      FaceType type = model.faces[frame.reference_face].type;
      for (int n : table.lower_six_nodes(type)) {
        x.segment<3>(at) = canonical.node_pos[n] - com;
        at += 3;
      }
      break;
    }
    case ReductionChoice::kNodes:
      for (int n = 0; n < kNumNodes; ++n) {
        x.segment<3>(at) = canonical.node_pos[n] - com;
        at += 3;
      }
      break;
    case ReductionChoice::kNodesVels:
      for (int n = 0; n < kNumNodes; ++n) {
        x.segment<3>(at) = canonical.node_pos[n] - com;
        at += 3;
      }
      for (int n = 0; n < kNumNodes; ++n) {
        x.segment<3>(at) = canonical.node_vel[n];
        at += 3;
      }
      break;
    case ReductionChoice::kNodesCables:
      for (int n = 0; n < kNumNodes; ++n) {
        x.segment<3>(at) = canonical.node_pos[n] - com;
        at += 3;
      }
      for (int c = 0; c < kNumCables; ++c) x[at++] = canonical.rest_lengths[c];
      break;
  }
  return x;
}

namespace {

// Least squares with relative ridge damping; design gets an implicit
// bias column. Returns coefficients (cols(Z) x cols(Y)) and the offset.
struct LinearFit {
  MatX coeff;
  VecX offset;
  bool low_rank = false;
};

LinearFit RidgeFit(const MatX& z, const MatX& y) {
  int n = static_cast<int>(z.rows());
  int d = static_cast<int>(z.cols());
  VecX z_mean = z.colwise().mean();
  VecX y_mean = y.colwise().mean();
  MatX zc = z.rowwise() - z_mean.transpose();
  MatX yc = y.rowwise() - y_mean.transpose();
  MatX gram = zc.transpose() * zc;
  double scale = gram.trace() / std::max(1, d);
  double lambda = 1e-8 * (scale + 1.0);
  gram.diagonal().array() += lambda;
  Eigen::LDLT<MatX> ldlt(gram);
  LinearFit fit;
  fit.coeff = ldlt.solve(zc.transpose() * yc).transpose();
  fit.offset = y_mean - fit.coeff * z_mean;
  // A centered design cannot determine more directions than points.
  fit.low_rank = n < d + 1;
  return fit;
}

MatX StackInputs(const std::vector<ReducedPoint>& points,
                 const std::vector<int>& idx) {
  int dx = static_cast<int>(points[idx[0]].x.size());
  int du = static_cast<int>(points[idx[0]].u.size());
  MatX z(idx.size(), dx + du);
  for (size_t i = 0; i < idx.size(); ++i) {
    z.row(i).head(dx) = points[idx[i]].x.transpose();
    z.row(i).tail(du) = points[idx[i]].u.transpose();
  }
  return z;
}

MatX StackTargets(const std::vector<ReducedPoint>& points,
                  const std::vector<int>& idx) {
  int dx = static_cast<int>(points[idx[0]].x_next.size());
  MatX y(idx.size(), dx);
  for (size_t i = 0; i < idx.size(); ++i) {
    y.row(i) = points[idx[i]].x_next.transpose();
  }
  return y;
}

VecX ResidualNorms(const std::vector<ReducedPoint>& points,
                   const std::vector<int>& idx, const LinearFit& fit) {
  int dx = static_cast<int>(points[idx[0]].x.size());
  int du = static_cast<int>(points[idx[0]].u.size());
  VecX z(dx + du);
  VecX norms(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) {
    z.head(dx) = points[idx[i]].x;
    z.tail(du) = points[idx[i]].u;
    norms[i] = (points[idx[i]].x_next - fit.coeff * z - fit.offset).norm();
  }
  return norms;
}

VecX DiagonalNoise(const MatX& residuals) {
  VecX var = residuals.array().square().colwise().mean();
  return var.array().max(1e-10);
}

ModeModel MakeMode(const std::vector<ReducedPoint>& points,
                   const std::vector<int>& inliers, bool flag_low_rank) {
  MatX z = StackInputs(points, inliers);
  MatX y = StackTargets(points, inliers);
  LinearFit dyn = RidgeFit(z, y);

  int dx = static_cast<int>(points[inliers[0]].x.size());
  MatX x_only = z.leftCols(dx);
  MatX u(inliers.size(), points[inliers[0]].u.size());
  for (size_t i = 0; i < inliers.size(); ++i) {
    u.row(i) = points[inliers[i]].u.transpose();
  }
  LinearFit pol = RidgeFit(x_only, u);

  ModeModel mode;
  mode.F = dyn.coeff;
  mode.f = dyn.offset;
  mode.P = pol.coeff;
  mode.p = pol.offset;
  mode.inlier_count = static_cast<int>(inliers.size());
  mode.low_rank = flag_low_rank || dyn.low_rank;

  MatX dyn_res = y - z * dyn.coeff.transpose();
  dyn_res.rowwise() -= dyn.offset.transpose();
  mode.dyn_noise = DiagonalNoise(dyn_res);
  MatX pol_res = u - x_only * pol.coeff.transpose();
  pol_res.rowwise() -= pol.offset.transpose();
  mode.pol_noise = DiagonalNoise(pol_res);
  return mode;
}

}  // namespace

std::vector<ModeModel> FitMultimodal(const std::vector<ReducedPoint>& points,
                                     int min_fit, int max_modes, uint64_t seed,
                                     int ransac_iters) {
  if (points.empty()) {
    throw Error(ErrorCategory::kConfig, "multimodal fit needs >= 1 point");
  }
  std::vector<ModeModel> modes;
  std::vector<int> remaining(points.size());
  std::iota(remaining.begin(), remaining.end(), 0);

  int n_all = static_cast<int>(points.size());
  if (n_all < min_fit) {
    modes.push_back(MakeMode(points, remaining, /*flag_low_rank=*/true));
    return modes;
  }

  int dx = static_cast<int>(points[0].x.size());
  int hypothesis_size = dx + 2;
  Rng rng = MakeRng(seed);

  while (static_cast<int>(remaining.size()) >= min_fit &&
         static_cast<int>(modes.size()) < max_modes) {
    LinearFit prelim = RidgeFit(StackInputs(points, remaining),
                                StackTargets(points, remaining));
    VecX norms = ResidualNorms(points, remaining, prelim);
    double rms = std::sqrt(norms.array().square().mean());
    double y_scale = 0.0;
    for (int i : remaining) y_scale += points[i].x_next.norm();
    y_scale /= remaining.size();
    double tau = std::max(rms, 1e-9 * (1.0 + y_scale));

    int m = static_cast<int>(remaining.size());
    int h = std::min(hypothesis_size, m);
    std::vector<int> best_inliers;
    std::vector<int> sample(h);
    std::vector<int> pool(remaining);
    for (int it = 0; it < ransac_iters; ++it) {
      // Partial Fisher-Yates draw of h distinct points.
      for (int i = 0; i < h; ++i) {
        std::uniform_int_distribution<int> pick(i, m - 1);
        std::swap(pool[i], pool[pick(rng)]);
        sample[i] = pool[i];
      }
      LinearFit hyp = RidgeFit(StackInputs(points, sample),
                               StackTargets(points, sample));
      VecX r = ResidualNorms(points, remaining, hyp);
      std::vector<int> inliers;
      inliers.reserve(m);
      for (int i = 0; i < m; ++i) {
        if (r[i] <= tau) inliers.push_back(remaining[i]);
      }
      if (inliers.size() > best_inliers.size()) best_inliers = inliers;
    }
    if (static_cast<int>(best_inliers.size()) < std::max(2, h)) {
      best_inliers = remaining;  // degenerate consensus: fit everything
    }
    modes.push_back(MakeMode(points, best_inliers, /*flag_low_rank=*/false));

    std::vector<int> outliers;
    outliers.reserve(remaining.size());
    std::vector<bool> used(points.size(), false);
    for (int i : best_inliers) used[i] = true;
    for (int i : remaining) {
      if (!used[i]) outliers.push_back(i);
    }
    if (outliers.size() == remaining.size()) break;  // no progress
    remaining = std::move(outliers);
  }
  return modes;
}

int AssignMode(const ReducedPoint& point, const std::vector<ModeModel>& modes) {
  if (modes.empty()) {
    throw Error(ErrorCategory::kConfig, "assign_mode needs >= 1 mode");
  }
  VecX z(point.x.size() + point.u.size());
  z.head(point.x.size()) = point.x;
  z.tail(point.u.size()) = point.u;
  int best = 0;
  double best_res = (point.x_next - modes[0].F * z - modes[0].f).norm();
  for (size_t i = 1; i < modes.size(); ++i) {
    double res = (point.x_next - modes[i].F * z - modes[i].f).norm();
    if (res < best_res) {
      best_res = res;
      best = static_cast<int>(i);
    }
  }
  return best;
}

LocalizationResult Localize(const std::vector<Trajectory>& trajectories,
                            const LocalizationOptions& options,
                            const SymmetryTable& table,
                            const RobotModel& model) {
  LocalizationResult result;
  result.segmentation.resize(trajectories.size());
  result.bindings.resize(trajectories.size());

  for (size_t i = 0; i < trajectories.size(); ++i) {
    result.segmentation[i] =
        SegmentTrajectory(trajectories[i], static_cast<int>(i),
                          options.truncation_cap, model, table);
    result.discarded_steps += result.segmentation[i].discarded_steps;
  }

  // Class census and per-class warped length (median segment length,
  // clamped to [txi_min, truncation_cap]).
  std::map<SegmentClassKey, std::vector<int>> lengths;
  for (const auto& segres : result.segmentation) {
    for (const Segment& seg : segres.segments) {
      lengths[ClassifySegment(seg, model)].push_back(seg.length());
    }
  }
  for (auto& [key, lens] : lengths) {
    std::sort(lens.begin(), lens.end());
    int median = lens[(lens.size() - 1) / 2];
    ClassSeries series;
    series.t_xi =
        std::clamp(median, options.txi_min, options.truncation_cap);
    series.segment_count = static_cast<int>(lens.size());
    series.cells.resize(series.t_xi);
    result.models.classes.emplace(key, std::move(series));
  }

  // Reduced points per (class, warped step) cell, plus step bindings.
  std::map<SegmentClassKey, std::vector<std::vector<ReducedPoint>>> cell_points;
  for (auto& [key, series] : result.models.classes) {
    cell_points[key].resize(series.t_xi);
  }

  for (size_t ti = 0; ti < trajectories.size(); ++ti) {
    const Trajectory& traj = trajectories[ti];
    result.bindings[ti].resize(traj.length());
    const auto& segments = result.segmentation[ti].segments;
    for (size_t si = 0; si < segments.size(); ++si) {
      const Segment& seg = segments[si];
      SegmentClassKey key = ClassifySegment(seg, model);
      ClassSeries& series = result.models.classes.at(key);
      const int t_xi = series.t_xi;

      // Reduced points for each step of the segment; the next state is
      // reduced in this segment's frame.
      std::vector<ReducedPoint> seg_points(seg.length());
      for (int t = seg.start; t < seg.end; ++t) {
        ReducedPoint pt;
        pt.x = ReduceState(traj.steps[t].state, seg.frame, options.choice,
                           table, model);
        ControlCommand canon = ForwardRelabelControl(traj.steps[t].control,
                                                     seg.frame, table);
        pt.u = Eigen::Map<const VecX>(canon.target_rest_lengths.data(),
                                      kNumCables);
        pt.x_next = ReduceState(traj.state_at(t + 1), seg.frame,
                                options.choice, table, model);
        seg_points[t - seg.start] = std::move(pt);
      }

      auto warp = WarpIndices(seg.start, seg.length(), t_xi);
      auto& cells = cell_points.at(key);
      for (int k = 0; k < t_xi; ++k) {
        cells[k].push_back(seg_points[warp[k] - seg.start]);
        ++series.point_count;
      }
    }

    // Bindings cover every step; steps inside a truncation remainder
    // clamp onto the truncated segment's last warped cells.
    size_t si = 0;
    for (int t = 0; t < traj.length(); ++t) {
      while (si + 1 < segments.size() && t >= segments[si + 1].start) ++si;
      const Segment& seg = segments[si];
      SegmentClassKey key = ClassifySegment(seg, model);
      const ClassSeries& series = result.models.classes.at(key);
      StepBinding binding;
      binding.key = key;
      binding.segment_index = static_cast<int>(si);
      int offset = std::min(t - seg.start, seg.length() - 1);
      binding.txi_index = std::min<int>(
          series.t_xi - 1,
          static_cast<int>((static_cast<int64_t>(offset) * series.t_xi) /
                           seg.length()));
      result.bindings[ti][t] = binding;
    }
  }

  // Fit all cells (independent; parallel).
  struct CellRef {
    SegmentClassKey key;
    int cell = 0;
  };
  std::vector<CellRef> refs;
  for (auto& [key, cells] : cell_points) {
    for (size_t k = 0; k < cells.size(); ++k) {
      if (!cells[k].empty()) refs.push_back({key, static_cast<int>(k)});
    }
  }
  int dx = ReducedDim(options.choice);
  int min_fit = dx + 5;
  ParallelFor(static_cast<int>(refs.size()), options.workers, [&](int i) {
    const CellRef& ref = refs[i];
    const auto& pts = cell_points.at(ref.key)[ref.cell];
    uint64_t seed = DeriveSeed(options.seed, ref.key.ToString(),
                               static_cast<uint64_t>(ref.cell));
    result.models.classes.at(ref.key).cells[ref.cell] = FitMultimodal(
        pts, min_fit, options.max_modes, seed, options.ransac_iters);
  });

  // Census rows.
  for (const auto& [key, series] : result.models.classes) {
    ClassCensusRow row;
    row.key = key;
    row.segment_count = series.segment_count;
    row.t_xi = series.t_xi;
    row.step_count = series.point_count;
    int cells_with_modes = 0;
    int total_modes = 0;
    for (const auto& cell : series.cells) {
      if (cell.empty()) continue;
      ++cells_with_modes;
      total_modes += static_cast<int>(cell.size());
      row.max_modes_seen =
          std::max(row.max_modes_seen, static_cast<int>(cell.size()));
    }
    row.mean_modes = cells_with_modes > 0
                         ? static_cast<double>(total_modes) / cells_with_modes
                         : 0.0;
    result.census.push_back(row);
  }
  return result;
}

std::string SurrogateModelSet::ExportJson() const {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& [key, series] : classes) {
    nlohmann::json jc;
    jc["class"] = key.ToString();
    jc["t_xi"] = series.t_xi;
    jc["segment_count"] = series.segment_count;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : series.cells) {
      nlohmann::json jcell = nlohmann::json::array();
      for (const ModeModel& mode : cell) {
        nlohmann::json jm;
        jm["inliers"] = mode.inlier_count;
        jm["low_rank"] = mode.low_rank;
        std::vector<double> fdata(mode.F.data(), mode.F.data() + mode.F.size());
        jm["F"] = fdata;
        jm["f"] = std::vector<double>(mode.f.data(), mode.f.data() + mode.f.size());
        std::vector<double> pdata(mode.P.data(), mode.P.data() + mode.P.size());
        jm["P"] = pdata;
        jm["p"] = std::vector<double>(mode.p.data(), mode.p.data() + mode.p.size());
        jcell.push_back(jm);
      }
      cells.push_back(jcell);
    }
    jc["cells"] = cells;
    doc.push_back(jc);
  }
  return doc.dump();
}

}  // namespace t6gps

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

#include "t6gps/trajopt.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "t6gps/error.hpp"

namespace t6gps {

std::vector<SubTrajectory> SplitSubtrajectories(
    int trajectory_length, const std::vector<int>& segment_starts,
    int t_tilde, int trajectory_id) {
  if (t_tilde < 2) {
    throw Error(ErrorCategory::kConfig, "sub-trajectory length must be >= 2");
  }
  std::vector<SubTrajectory> subs;
  int start = 0;
  while (start < trajectory_length) {
    int end = std::min(start + t_tilde, trajectory_length);
    // Stop early at a segment boundary at least half a window in, so
    // the next window starts aligned with the transition.
    for (int b : segment_starts) {
      if (b > start && b < end && 2 * (b - start) >= t_tilde) {
        end = b;
        break;
      }
    }
    if (trajectory_length - end > 0 &&
        2 * (trajectory_length - end) < t_tilde && end == start + t_tilde) {
      end = trajectory_length;  // merge a short tail into this window
    }
    subs.push_back({trajectory_id, start, end});
    start = end;
  }
  return subs;
}

QuadCost QuadratizeCost(const VecX& x_rec, const VecX& u_rec,
                        const Vec3& target_dir_canonical, double v_star,
                        const Vec3& w_diag, const ModeModel& mode,
                        double kl_weight) {
  int dx = static_cast<int>(x_rec.size());
  int du = static_cast<int>(u_rec.size());
  QuadCost cost;
  cost.q = VecX::Zero(dx + du);
  cost.Q = MatX::Zero(dx + du, dx + du);

  // Tracking term: (v - v* d)^T W (v - v* d) on the CoM-velocity block.
  Vec3 e = x_rec.head<3>() - v_star * target_dir_canonical;
  Vec3 we = w_diag.cwiseProduct(e);
  cost.q0 = e.dot(we);
  cost.q.head<3>() = 2.0 * we;
  cost.Q.topLeftCorner<3, 3>() = 2.0 * w_diag.asDiagonal();

  if (kl_weight > 0.0) {
    // Deviation of the action from the surrogate policy mean, weighted
    // by the fitted policy covariance (floored so near-deterministic
    // fits do not freeze the optimizer).
    VecX inv_var = mode.pol_noise.array().max(1e-6).inverse();
    VecX err = u_rec - mode.P * x_rec - mode.p;
    VecX se = kl_weight * inv_var.cwiseProduct(err);
    cost.q0 += 0.5 * kl_weight * err.dot(inv_var.cwiseProduct(err));
    cost.q.tail(du) += se;
    cost.q.head(dx) -= mode.P.transpose() * se;
    MatX wP = inv_var.asDiagonal() * mode.P;
    cost.Q.bottomRightCorner(du, du) +=
        kl_weight * MatX(inv_var.asDiagonal());
    cost.Q.topLeftCorner(dx, dx) += kl_weight * mode.P.transpose() * wP;
    cost.Q.bottomLeftCorner(du, dx) -= kl_weight * wP;
    cost.Q.topRightCorner(dx, du) -= kl_weight * wP.transpose();
  }
  return cost;
}

QuadCost TerminalCost(const VecX& x_rec, const Vec3& target_dir_canonical,
                      double v_star, const Vec3& w_diag) {
  int dx = static_cast<int>(x_rec.size());
  QuadCost cost;
  cost.q = VecX::Zero(dx);
  cost.Q = MatX::Zero(dx, dx);
  Vec3 e = x_rec.head<3>() - v_star * target_dir_canonical;
  Vec3 we = w_diag.cwiseProduct(e);
  cost.q0 = e.dot(we);
  cost.q.head<3>() = 2.0 * we;
  cost.Q.topLeftCorner<3, 3>() = 2.0 * w_diag.asDiagonal();
  return cost;
}

LqSolution SolveLqBackward(const LqProblem& problem, double reg_init,
                           int max_retries) {
  int T = problem.horizon();
  LqSolution sol;
  if (T == 0) return sol;
  int dx = static_cast<int>(problem.Fx[0].rows());
  int du = static_cast<int>(problem.Fu[0].cols());

  double reg = reg_init;
  for (int attempt = 0; attempt <= max_retries; ++attempt, reg *= 10.0) {
    sol.K.assign(T, MatX::Zero(du, dx));
    sol.k.assign(T, VecX::Zero(du));
    sol.sigma.assign(T, MatX::Zero(du, du));
    MatX Vxx = problem.terminal.Q;
    VecX vx = problem.terminal.q;
    bool ok = true;
    for (int t = T - 1; t >= 0 && ok; --t) {
      const MatX& Fx = problem.Fx[t];
      const MatX& Fu = problem.Fu[t];
      const VecX& r = problem.drift[t];
      const QuadCost& c = problem.stage[t];

      MatX Cxx = c.Q.topLeftCorner(dx, dx);
      MatX Cuu = c.Q.bottomRightCorner(du, du);
      MatX Cux = c.Q.bottomLeftCorner(du, dx);
      VecX cx = c.q.head(dx);
      VecX cu = c.q.tail(du);

      VecX vr = Vxx * r + vx;
      MatX Qxx = Cxx + Fx.transpose() * Vxx * Fx;
      MatX Quu = Cuu + Fu.transpose() * Vxx * Fu;
      MatX Qux = Cux + Fu.transpose() * Vxx * Fx;
      VecX qx = cx + Fx.transpose() * vr;
      VecX qu = cu + Fu.transpose() * vr;

      Quu.diagonal().array() += reg;
      Quu = 0.5 * (Quu + Quu.transpose()).eval();
      Eigen::LLT<MatX> llt(Quu);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      MatX K = -llt.solve(Qux);
      VecX k = -llt.solve(qu);
      sol.K[t] = K;
      sol.k[t] = k;
      sol.sigma[t] = llt.solve(MatX::Identity(du, du));

      // Value of the regularized-optimal policy (keeps the Bellman
      // argument exact for the reg-augmented objective).
      Vxx = Qxx + K.transpose() * Quu * K + K.transpose() * Qux +
            Qux.transpose() * K;
      Vxx = 0.5 * (Vxx + Vxx.transpose()).eval();
      vx = qx + K.transpose() * Quu * k + K.transpose() * qu +
           Qux.transpose() * k;
    }
    if (ok) {
      sol.success = true;
      sol.reg_used = reg;
      return sol;
    }
  }
  sol.success = false;
  sol.reg_used = reg;
  return sol;
}

double EvaluateLqCost(const LqProblem& problem, const LqSolution* policy) {
  int T = problem.horizon();
  if (T == 0) return 0.0;
  int dx = static_cast<int>(problem.Fx[0].rows());
  int du = static_cast<int>(problem.Fu[0].cols());
  VecX dxv = VecX::Zero(dx);
  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    VecX duv = VecX::Zero(du);
    if (policy) duv = policy->k[t] + policy->K[t] * dxv;
    VecX z(dx + du);
    z.head(dx) = dxv;
    z.tail(du) = duv;
    const QuadCost& c = problem.stage[t];
    total += c.q0 + c.q.dot(z) + 0.5 * z.dot(c.Q * z);
    dxv = problem.Fx[t] * dxv + problem.Fu[t] * duv + problem.drift[t];
  }
  total += problem.terminal.q0 + problem.terminal.q.dot(dxv) +
           0.5 * dxv.dot(problem.terminal.Q * dxv);
  return total;
}

MatX BuildFrameTransfer(const ReductionFrame& from, const ReductionFrame& to,
                        ReductionChoice choice, const SymmetryTable& table,
                        const RobotModel& model) {
  int dim = ReducedDim(choice);
  MatX c = MatX::Zero(dim, dim);
  Mat3 r = table.world_action(to.map_index, to.heading_rotation) *
           table.world_action(from.map_index, from.heading_rotation)
               .transpose();

  const SymmetryMap& ma = table.map(from.map_index);
  const SymmetryMap& mb = table.map(to.map_index);
  std::array<int, kNumNodes> node_map{};   // to-canonical j -> from-canonical i
  std::array<int, kNumNodes> inv_b{};
  for (int n = 0; n < kNumNodes; ++n) inv_b[mb.node_perm[n]] = n;
  for (int j = 0; j < kNumNodes; ++j) node_map[j] = ma.node_perm[inv_b[j]];
  std::array<int, kNumCables> cable_map{};
  std::array<int, kNumCables> cinv_b{};
  for (int n = 0; n < kNumCables; ++n) cinv_b[mb.cable_perm[n]] = n;
  for (int j = 0; j < kNumCables; ++j) cable_map[j] = ma.cable_perm[cinv_b[j]];

  c.topLeftCorner<3, 3>() = r;
  switch (choice) {
    case ReductionChoice::kComVelOnly:
      break;
    case ReductionChoice::kNodes:
      for (int j = 0; j < kNumNodes; ++j) {
        c.block<3, 3>(3 + 3 * j, 3 + 3 * node_map[j]) = r;
      }
      break;
    case ReductionChoice::kNodesVels:
      for (int j = 0; j < kNumNodes; ++j) {
        c.block<3, 3>(3 + 3 * j, 3 + 3 * node_map[j]) = r;
        c.block<3, 3>(39 + 3 * j, 39 + 3 * node_map[j]) = r;
      }
      break;
    case ReductionChoice::kNodesCables:
      for (int j = 0; j < kNumNodes; ++j) {
        c.block<3, 3>(3 + 3 * j, 3 + 3 * node_map[j]) = r;
      }
      for (int j = 0; j < kNumCables; ++j) {
        c(39 + j, 39 + cable_map[j]) = 1.0;
      }
      break;
    case ReductionChoice::kNodesLower6: {
      FaceType ta = model.faces[from.reference_face].type;
      FaceType tb = model.faces[to.reference_face].type;
      const auto& la = table.lower_six_nodes(ta);
      const auto& lb = table.lower_six_nodes(tb);
      for (int jj = 0; jj < 6; ++jj) {
        int i = node_map[lb[jj]];
        for (int ii = 0; ii < 6; ++ii) {
          if (la[ii] == i) c.block<3, 3>(3 + 3 * jj, 3 + 3 * ii) = r;
        }
      }
      break;
    }
  }
  return c;
}

namespace {

// Nearest fitted cell of a class, or nullptr when the class has none.
const std::vector<ModeModel>* NearestCell(const ClassSeries& series,
                                          int txi_index) {
  if (!series.cells.empty() && !series.cells[txi_index].empty()) {
    return &series.cells[txi_index];
  }
  int best = -1;
  for (int k = 0; k < static_cast<int>(series.cells.size()); ++k) {
    if (series.cells[k].empty()) continue;
    if (best < 0 ||
        std::abs(k - txi_index) < std::abs(best - txi_index)) {
      best = k;
    }
  }
  return best >= 0 ? &series.cells[best] : nullptr;
}

}  // namespace

SubTrajectoryResult OptimizeSubtrajectory(
    const Trajectory& traj, const SubTrajectory& sub,
    const std::vector<StepBinding>& bindings,
    const std::vector<Segment>& segments, const SurrogateModelSet& models,
    const TrajoptOptions& options, const SymmetryTable& table,
    const RobotModel& model) {
  SubTrajectoryResult result;
  result.sub = sub;
  int T = sub.length();
  int dx = ReducedDim(options.choice);

  auto frame_of = [&](int t) -> const ReductionFrame& {
    int idx = std::min(t, traj.length() - 1);
    return segments[bindings[idx].segment_index].frame;
  };

  // Recorded reduced states (frame of the owning segment), canonical
  // controls, and canonical target directions.
  std::vector<VecX> x_rec(T + 1);
  std::vector<VecX> u_rec(T);
  std::vector<Vec3> d_can(T + 1);
  for (int i = 0; i <= T; ++i) {
    int t = sub.start + i;
    const ReductionFrame& frame = frame_of(t);
    x_rec[i] = ReduceState(traj.state_at(t), frame, options.choice, table,
                           model);
    const TrajectoryStep& step = traj.steps[std::min(t, traj.length() - 1)];
    d_can[i] = table.world_action(frame.map_index, frame.heading_rotation) *
               step.target_dir;
    if (i < T) {
      ControlCommand canon =
          ForwardRelabelControl(traj.steps[t].control, frame, table);
      u_rec[i] =
          Eigen::Map<const VecX>(canon.target_rest_lengths.data(), kNumCables);
    }
  }

  LqProblem problem;
  problem.Fx.resize(T);
  problem.Fu.resize(T);
  problem.drift.resize(T);
  problem.stage.resize(T);

  // Fallback fit over the window itself, used when a class carries no
  // models this iteration.
  std::vector<ReducedPoint> window_points(T);
  for (int i = 0; i < T; ++i) {
    window_points[i].x = x_rec[i];
    window_points[i].u = u_rec[i];
    // In-frame next state for the fallback fit.
    window_points[i].x_next = ReduceState(
        traj.state_at(sub.start + i + 1), frame_of(sub.start + i),
        options.choice, table, model);
  }
  std::vector<ModeModel> window_fallback;

  for (int i = 0; i < T; ++i) {
    int t = sub.start + i;
    const StepBinding& binding = bindings[t];
    const ModeModel* mode = nullptr;
    auto it = models.classes.find(binding.key);
    const std::vector<ModeModel>* cell =
        it != models.classes.end() ? NearestCell(it->second, binding.txi_index)
                                   : nullptr;
    if (cell) {
      ReducedPoint pt;
      pt.x = x_rec[i];
      pt.u = u_rec[i];
      pt.x_next = window_points[i].x_next;
      mode = &(*cell)[AssignMode(pt, *cell)];
      if (it->second.cells[binding.txi_index].empty()) ++result.fallback_models;
    } else {
      if (window_fallback.empty()) {
        window_fallback = FitMultimodal(window_points, T + 1, 1, 0, 1);
      }
      mode = &window_fallback[0];
      ++result.fallback_models;
    }

    // Fold the frame change at segment transitions into the step model.
    const ReductionFrame& fa = frame_of(t);
    const ReductionFrame& fb = frame_of(t + 1);
    MatX Fx = mode->F.leftCols(dx);
    MatX Fu = mode->F.rightCols(kNumCables);
    VecX foff = mode->f;
    if (fa.map_index != fb.map_index ||
        fa.heading_rotation != fb.heading_rotation) {
      MatX c = BuildFrameTransfer(fa, fb, options.choice, table, model);
      Fx = (c * Fx).eval();
      Fu = (c * Fu).eval();
      foff = (c * foff).eval();
    }
    problem.Fx[i] = Fx;
    problem.Fu[i] = Fu;
    problem.drift[i] = Fx * x_rec[i] + Fu * u_rec[i] + foff - x_rec[i + 1];
    problem.stage[i] =
        QuadratizeCost(x_rec[i], u_rec[i], d_can[i], options.v_star,
                       options.w_diag, *mode, options.kl_weight);
  }
  problem.terminal =
      TerminalCost(x_rec[T], d_can[T], options.v_star, options.w_diag);

  LqSolution sol =
      SolveLqBackward(problem, options.reg_init, options.max_retries);
  if (!sol.success) {
    result.success = false;
    return result;
  }

  result.success = true;
  result.predicted_cost_before = EvaluateLqCost(problem, nullptr);
  result.predicted_cost_after = EvaluateLqCost(problem, &sol);
  result.u_star.resize(T);
  for (int i = 0; i < T; ++i) {
    VecX u = u_rec[i] + sol.k[i];  // zero state deviation at the record
    for (int c = 0; c < kNumCables; ++c) {
      u[c] = std::clamp(u[c], options.u_lo, options.u_hi);
    }
    result.u_star[i] = u;
  }
  return result;
}

std::vector<std::pair<VecX, VecX>> CollectTrainingPairs(
    const Trajectory& traj, const std::vector<SubTrajectoryResult>& results) {
  std::vector<std::pair<VecX, VecX>> pairs;
  for (const SubTrajectoryResult& r : results) {
    if (!r.success) continue;
    for (int i = 0; i < r.sub.length(); ++i) {
      pairs.emplace_back(traj.steps[r.sub.start + i].observation,
                         r.u_star[i]);
    }
  }
  return pairs;
}

}  // namespace t6gps

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

#ifndef T6GPS_TRAJOPT_HPP_
#define T6GPS_TRAJOPT_HPP_

#include <utility>
#include <vector>

#include "t6gps/localization.hpp"
#include "t6gps/state.hpp"
#include "t6gps/symmetry.hpp"

namespace t6gps {

struct SubTrajectory {
  int trajectory_id = 0;
  int start = 0;  // [start, end)
  int end = 0;
  int length() const { return end - start; }
};

// Consecutive optimization windows of nominal length t_tilde. Windows
// end early at a segment boundary at least t_tilde/2 in, so the next
// window starts at the boundary; a trailing remainder shorter than
// t_tilde/2 merges into the previous window.
std::vector<SubTrajectory> SplitSubtrajectories(
    int trajectory_length, const std::vector<int>& segment_starts,
    int t_tilde, int trajectory_id = 0);

// Quadratic cost in deviation coordinates [dx; du] about a recorded
// state-action: value q0, gradient q, Hessian Q.
struct QuadCost {
  double q0 = 0.0;
  VecX q;
  MatX Q;
};

// Exact expansion of the tracking cost plus the KL penalty
// 0.5*c*(u - Px - p)^T S^-1 (u - Px - p) against the surrogate policy.
QuadCost QuadratizeCost(const VecX& x_rec, const VecX& u_rec,
                        const Vec3& target_dir_canonical, double v_star,
                        const Vec3& w_diag, const ModeModel& mode,
                        double kl_weight);
// Tracking term only, in dx (used at the window end).
QuadCost TerminalCost(const VecX& x_rec, const Vec3& target_dir_canonical,
                      double v_star, const Vec3& w_diag);

// Time-varying affine-quadratic subproblem in deviation coordinates.
struct LqProblem {
  std::vector<MatX> Fx;      // T entries
  std::vector<MatX> Fu;
  std::vector<VecX> drift;   // model residual at the recorded points
  std::vector<QuadCost> stage;
  QuadCost terminal;
  int horizon() const { return static_cast<int>(Fx.size()); }
};

struct LqSolution {
  bool success = false;
  std::vector<MatX> K;
  std::vector<VecX> k;
  std::vector<MatX> sigma;  // inverse regularized control Hessian
  double reg_used = 0.0;
};

// Riccati sweep with Levenberg regularization on the control Hessian
// (reg grows x10 on an indefinite block, up to max_retries restarts).
LqSolution SolveLqBackward(const LqProblem& problem, double reg_init = 1e-6,
                           int max_retries = 10);

// Exact cost of running the affine chain from zero deviation, either
// holding the recorded controls (policy == nullptr) or applying the
// feedback policy du = k + K dx.
double EvaluateLqCost(const LqProblem& problem, const LqSolution* policy);

struct TrajoptOptions {
  int t_tilde = 15;
  ReductionChoice choice = ReductionChoice::kNodes;
  double v_star = 0.8;
  Vec3 w_diag{1.0, 1.0, 0.1};
  double kl_weight = 1.0;
  double reg_init = 1e-6;
  int max_retries = 10;
  double u_lo = 0.0;  // rest length bounds for emitted actions
  double u_hi = 0.0;
};

struct SubTrajectoryResult {
  bool success = false;
  SubTrajectory sub;
  std::vector<VecX> u_star;  // canonical frame, clamped; per step
  int fallback_models = 0;   // patched steps served by a fallback fit
  double predicted_cost_before = 0.0;
  double predicted_cost_after = 0.0;
};

// Linear map between two reduction frames acting on reduced states;
// exact for every choice except nodes-lower6, where node sets may not
// overlap and missing entries are zeroed.
MatX BuildFrameTransfer(const ReductionFrame& from, const ReductionFrame& to,
                        ReductionChoice choice, const SymmetryTable& table,
                        const RobotModel& model);

// Patches per-step models out of the surrogate set (nearest fitted
// warped cell of the class when a cell is empty, least squares over the
// window itself when a class has no models at all), quadratizes costs,
// runs the backward pass, and emits improved open-loop actions at the
// recorded states.
SubTrajectoryResult OptimizeSubtrajectory(
    const Trajectory& traj, const SubTrajectory& sub,
    const std::vector<StepBinding>& bindings,
    const std::vector<Segment>& segments, const SurrogateModelSet& models,
    const TrajoptOptions& options, const SymmetryTable& table,
    const RobotModel& model);

// (observation, improved canonical action) pairs from every step of the
// successfully optimized windows.
std::vector<std::pair<VecX, VecX>> CollectTrainingPairs(
    const Trajectory& traj, const std::vector<SubTrajectoryResult>& results);

}  // namespace t6gps

#endif  // T6GPS_TRAJOPT_HPP_

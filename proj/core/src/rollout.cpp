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

#include "t6gps/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "t6gps/error.hpp"
#include "t6gps/rng.hpp"

namespace t6gps {
namespace {

// Face with the lowest summed node height; total fallback for states
// with no grounded support polygon.
int LowestFace(const FullState& state, const RobotModel& model) {
  int best = 0;
  double best_h = 1e300;
  for (int f = 0; f < kNumFaces; ++f) {
    double h = 0.0;
    for (int n : model.faces[f].nodes) h += state.node_pos[n].z();
    if (h < best_h) {
      best_h = h;
      best = f;
    }
  }
  return best;
}

}  // namespace

Trajectory Rollout(const PolicyParams& policy, const FullState& x0,
                   ScenarioState scenario, const RolloutOptions& options,
                   const RobotModel& model, const SymmetryTable& table,
                   const Terrain& terrain) {
  Trajectory traj;
  traj.steps.reserve(options.horizon);

  Rng rng = MakeRng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  FullState state = x0;
  state.sim_time = 0.0;
  int previous = LowestFace(state, model);
  int current = BottomTriangle(state, model, terrain, previous);
  traj.start_face = current;
  ReductionFrame frame =
      ComputeReductionFrame(table, model, state, current, previous);
  if (options.identity_frame) {
    frame.map_index = table.identity_index();
    frame.heading_rotation = 0.0;
  }

  int substeps = std::max(
      1, static_cast<int>(std::round(model.params.control_period /
                                     model.params.dt)));

  for (int t = 0; t < options.horizon; ++t) {
    int face = BottomTriangle(state, model, terrain, current);
    if (face != current) {
      previous = current;
      current = face;
      frame = ComputeReductionFrame(table, model, state, current, previous);
      if (options.identity_frame) {
        frame.map_index = table.identity_index();
        frame.heading_rotation = 0.0;
      }
    }

    double now = t * model.params.control_period;
    int arrivals_before = scenario.arrivals;
    Vec3 d_hat = UpdateTarget(scenario, state.com(), now);

    TrajectoryStep step;
    step.state = state;
    step.bottom_face = current;
    step.previous_face = previous;
    step.target_dir = d_hat;
    step.frame_map_index = frame.map_index;
    step.frame_heading = frame.heading_rotation;
    step.waypoint_index = std::min(scenario.active, kWaypointsPerTrial - 1);
    step.arrival = scenario.arrivals > arrivals_before;
    step.observation = ReduceObservation(state, frame, d_hat, table, model);

    ControlCommand canonical = PolicyForward(policy, step.observation);
    if (options.noise_scale > 0.0) {
      for (double& v : canonical.target_rest_lengths) {
        v += options.noise_scale * gauss(rng);
      }
    }
    canonical = ClampCommand(canonical, model);
    step.control = RelabelControl(canonical, frame, table);
    step.cost = RunningCost(state.com_velocity(), d_hat,
                            scenario.target_speed, scenario.cost_weights);
    traj.steps.push_back(std::move(step));

    const ControlCommand& cmd = traj.steps.back().control;
    for (int s = 0; s < substeps; ++s) {
      state = Step(state, cmd, model, terrain, model.params.dt);
    }
  }
  traj.final_state = state;
  traj.timed_out = scenario.done() && scenario.arrivals == 0;
  return traj;
}

void WriteTrajectoryCsv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write trajectory: " + path);
  out << "sim_time";
  for (int n = 0; n < kNumNodes; ++n) {
    out << ",px" << n << ",py" << n << ",pz" << n;
  }
  for (int n = 0; n < kNumNodes; ++n) {
    out << ",vx" << n << ",vy" << n << ",vz" << n;
  }
  for (int c = 0; c < kNumCables; ++c) out << ",rest" << c;
  for (int c = 0; c < kNumCables; ++c) out << ",cmd" << c;
  out << ",bottom_face,cost,target_heading\n";
  out.precision(10);
  for (const TrajectoryStep& step : traj.steps) {
    out << step.state.sim_time;
    for (const Vec3& p : step.state.node_pos) {
      out << ',' << p.x() << ',' << p.y() << ',' << p.z();
    }
    for (const Vec3& v : step.state.node_vel) {
      out << ',' << v.x() << ',' << v.y() << ',' << v.z();
    }
    for (double r : step.state.rest_lengths) out << ',' << r;
    for (double u : step.control.target_rest_lengths) out << ',' << u;
    out << ',' << step.bottom_face << ',' << step.cost << ','
        << std::atan2(step.target_dir.y(), step.target_dir.x()) << '\n';
  }
  if (!out) throw Error(ErrorCategory::kIo, "trajectory write failed: " + path);
}

}  // namespace t6gps

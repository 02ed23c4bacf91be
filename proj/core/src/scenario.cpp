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

#include "t6gps/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "t6gps/error.hpp"
#include "t6gps/rng.hpp"

namespace t6gps {

ScenarioState MakeScenario(uint64_t seed, const Vec2& start,
                           const Terrain& terrain, double min_dist,
                           double max_dist) {
  Rng rng = MakeRng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> dist(min_dist, max_dist);
  ScenarioState scn;
  double half_x = 0.5 * terrain.extent_x() - 1.0;
  double half_y = 0.5 * terrain.extent_y() - 1.0;
  for (int i = 0; i < kWaypointsPerTrial; ++i) {
    double a = angle(rng);
    double d = dist(rng);
    Vec2 w = start + d * Vec2(std::cos(a), std::sin(a));
    w.x() = std::clamp(w.x(), -half_x, half_x);
    w.y() = std::clamp(w.y(), -half_y, half_y);
    scn.waypoints[i] = w;
  }
  return scn;
}

Vec3 UpdateTarget(ScenarioState& scn, const Vec3& com, double t) {
  if (scn.done()) return scn.last_dir;
  Vec2 p = com.head<2>();
  while (!scn.done()) {
    Vec2 to = scn.waypoints[scn.active] - p;
    if (to.norm() < scn.radius) {
      ++scn.arrivals;
      ++scn.active;
      scn.activation_time = t;
      continue;
    }
    if (t - scn.activation_time >= scn.timeout) {
      ++scn.timeouts;
      ++scn.active;
      scn.activation_time = t;
      continue;
    }
    break;
  }
  if (scn.done()) return scn.last_dir;
  Vec2 to = scn.waypoints[scn.active] - p;
  double n = to.norm();
  if (n < 1e-12) return scn.last_dir;
  scn.last_dir = Vec3(to.x() / n, to.y() / n, 0.0);
  return scn.last_dir;
}

double RunningCost(const Vec3& v_com, const Vec3& d_hat, double v_star,
                   const Vec3& w_diag) {
  Vec3 e = v_com - v_star * d_hat;
  return w_diag.x() * e.x() * e.x() + w_diag.y() * e.y() * e.y() +
         w_diag.z() * e.z() * e.z();
}

std::vector<FullState> SampleInitialStates(int n, uint64_t seed,
                                           const Terrain& terrain,
                                           const RobotModel& model,
                                           double margin) {
  if (n < 1) throw Error(ErrorCategory::kConfig, "need n >= 1 initial states");
  std::vector<FullState> states;
  states.reserve(n);
  double half_x = std::max(0.0, 0.5 * terrain.extent_x() - margin);
  double half_y = std::max(0.0, 0.5 * terrain.extent_y() - margin);
  for (int i = 0; i < n; ++i) {
    FullState settled;
    bool ok = false;
    for (int attempt = 0; attempt < 5 && !ok; ++attempt) {
      Rng rng = MakeRng(DeriveSeed(seed, "x0", i, attempt));
      std::uniform_real_distribution<double> ux(-half_x, half_x);
      std::uniform_real_distribution<double> uy(-half_y, half_y);
      std::uniform_real_distribution<double> uyaw(0.0, 2.0 * M_PI);
      std::uniform_int_distribution<int> uface(0, kNumFaces - 1);
      std::uniform_real_distribution<double> upert(-0.1, 0.1);
      Vec2 offset(ux(rng), uy(rng));
      int face = uface(rng);
      double yaw = uyaw(rng);
      FullState dropped = MakeDroppedState(model, terrain, face, offset, yaw);
      ControlCommand hold;
      for (int c = 0; c < kNumCables; ++c) {
        double r = model.neutral_rest_length * (1.0 + upert(rng));
        r = std::clamp(r, model.rest_length_min, model.rest_length_max);
        dropped.rest_lengths[c] = r;
        hold.target_rest_lengths[c] = r;
      }
      try {
        settled = Simulate(dropped, hold, model, terrain, 2.0);
      } catch (const Error&) {
        continue;  // blowup: resample
      }
      if (KineticEnergy(settled, model) < 0.5) ok = true;
    }
    if (!ok) {
      throw Error(ErrorCategory::kNumeric,
                  "initial state " + std::to_string(i) +
                      " failed to settle after 5 attempts");
    }
    settled.sim_time = 0.0;
    states.push_back(settled);
  }
  return states;
}

}  // namespace t6gps

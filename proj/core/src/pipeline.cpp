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

#include "t6gps/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "t6gps/checkpoint.hpp"
#include "t6gps/error.hpp"
#include "t6gps/parallel.hpp"
#include "t6gps/rng.hpp"

namespace t6gps {
namespace {

namespace fs = std::filesystem;

double NoiseForIteration(const RunConfig& config, int iteration) {
  if (config.iterations <= 1) return config.noise_initial;
  double frac = static_cast<double>(iteration) / (config.iterations - 1);
  return config.noise_initial +
         frac * (config.noise_final - config.noise_initial);
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCategory::kIo, "cannot create directory: " + dir);
}

std::string IterDir(const std::string& out_dir, int iteration) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "iter_%03d", iteration);
  return (fs::path(out_dir) / buf).string();
}

struct SampleStats {
  double mean_cost = 0.0;
  double mean_forward = 0.0;
  double stuck_fraction = 0.0;
  std::vector<int> histogram;
  int total_steps = 0;
};

SampleStats ComputeSampleStats(const std::vector<Trajectory>& trajs,
                               double hist_lo, double hist_hi, int bins) {
  SampleStats stats;
  stats.histogram.assign(bins, 0);
  double cost = 0.0, fwd = 0.0;
  int stuck = 0, steps = 0;
  for (const Trajectory& traj : trajs) {
    for (const TrajectoryStep& step : traj.steps) {
      Vec3 v = step.state.com_velocity();
      double forward = v.dot(step.target_dir);
      cost += step.cost;
      fwd += forward;
      if (v.norm() < 0.05) ++stuck;
      int bin = static_cast<int>((forward - hist_lo) / (hist_hi - hist_lo) *
                                 bins);
      stats.histogram[std::clamp(bin, 0, bins - 1)]++;
      ++steps;
    }
  }
  if (steps > 0) {
    stats.mean_cost = cost / steps;
    stats.mean_forward = fwd / steps;
    stats.stuck_fraction = static_cast<double>(stuck) / steps;
  }
  stats.total_steps = steps;
  return stats;
}

void WriteCensusCsv(const std::vector<ClassCensusRow>& census,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write census: " + path);
  out << "class,segments,steps,t_xi,max_modes,mean_modes\n";
  for (const ClassCensusRow& row : census) {
    out << row.key.ToString() << ',' << row.segment_count << ','
        << row.step_count << ',' << row.t_xi << ',' << row.max_modes_seen
        << ',' << row.mean_modes << '\n';
  }
}

void WriteOptimizerCsv(const IterationReport& report,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write report: " + path);
  out << "subtrajectories,skips,fallback_models,mean_predicted_improvement\n";
  out << report.subtraj_count << ',' << report.skip_count << ','
      << report.fallback_count << ',' << report.mean_predicted_improvement
      << '\n';
}

void LogTrajectories(const RunConfig& config,
                     const std::vector<Trajectory>& trajs,
                     const std::string& iter_dir) {
  if (!config.log_trajectories || iter_dir.empty()) return;
  for (size_t k = 0; k < trajs.size(); ++k) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "trajectory_%03zu.csv", k);
    WriteTrajectoryCsv(trajs[k], (fs::path(iter_dir) / buf).string());
  }
}

// C-step shared by both pipelines once models/segments/bindings exist.
struct CStepOutput {
  std::vector<SubTrajectoryResult> results;
  int subtraj_count = 0;
  int skip_count = 0;
  int fallback_count = 0;
  double mean_improvement = 0.0;
  MatX observations;  // collected pairs
  MatX actions;
};

CStepOutput RunCStep(const RunConfig& config, RunContext& ctx,
                     const std::vector<Trajectory>& trajs,
                     const LocalizationResult& loc, double kl_weight) {
  TrajoptOptions topt;
  topt.t_tilde = config.subtraj_length;
  topt.choice = ParseReductionChoice(config.reduction);
  topt.v_star = config.target_speed;
  topt.w_diag = Vec3(1.0, 1.0, config.cost_weight_vertical);
  topt.kl_weight = kl_weight;
  topt.u_lo = ctx.model.rest_length_min;
  topt.u_hi = ctx.model.rest_length_max;

  struct Job {
    int traj_id;
    SubTrajectory sub;
  };
  std::vector<Job> jobs;
  for (size_t ti = 0; ti < trajs.size(); ++ti) {
    std::vector<int> starts;
    for (const Segment& seg : loc.segmentation[ti].segments) {
      starts.push_back(seg.start);
    }
    for (const SubTrajectory& sub :
         SplitSubtrajectories(trajs[ti].length(), starts, topt.t_tilde,
                              static_cast<int>(ti))) {
      jobs.push_back({static_cast<int>(ti), sub});
    }
  }

  CStepOutput out;
  out.results.resize(jobs.size());
  int workers = config.workers > 0 ? config.workers : DefaultWorkerCount();
  ParallelFor(static_cast<int>(jobs.size()), workers, [&](int i) {
    const Job& job = jobs[i];
    out.results[i] = OptimizeSubtrajectory(
        trajs[job.traj_id], job.sub, loc.bindings[job.traj_id],
        loc.segmentation[job.traj_id].segments, loc.models, topt, ctx.table,
        ctx.model);
  });

  out.subtraj_count = static_cast<int>(jobs.size());
  double improvement = 0.0;
  int improved = 0;
  std::vector<std::pair<VecX, VecX>> pairs;
  for (size_t ti = 0; ti < trajs.size(); ++ti) {
    std::vector<SubTrajectoryResult> per_traj;
    for (size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].traj_id != static_cast<int>(ti)) continue;
      const SubTrajectoryResult& r = out.results[i];
      if (!r.success) {
        ++out.skip_count;
        continue;
      }
      out.fallback_count += r.fallback_models;
      improvement += r.predicted_cost_before - r.predicted_cost_after;
      ++improved;
      per_traj.push_back(r);
    }
    auto tp = CollectTrainingPairs(trajs[ti], per_traj);
    pairs.insert(pairs.end(), tp.begin(), tp.end());
  }
  if (improved > 0) out.mean_improvement = improvement / improved;

  out.observations.resize(pairs.size(), kObservationDim);
  out.actions.resize(pairs.size(), kNumCables);
  for (size_t i = 0; i < pairs.size(); ++i) {
    out.observations.row(i) = pairs[i].first.transpose();
    out.actions.row(i) = pairs[i].second.transpose();
  }
  return out;
}

void SStep(const RunConfig& config, TrainingState& state,
           const CStepOutput& cstep, IterationReport& report) {
  if (cstep.observations.rows() == 0) {
    report.train_initial_loss = report.train_final_loss = 0.0;
    return;
  }
  if (config.data_retention == "latest") {
    state.data = TrainingSet{};
  } else {
    state.data.weights.setOnes();  // demote previous iterations
  }
  state.data.Append(cstep.observations, cstep.actions, config.recency_weight);

  TrainOptions topt;
  topt.epochs = config.train_epochs;
  topt.learning_rate = config.train_lr;
  topt.momentum = config.train_momentum;
  topt.workers = config.workers > 0 ? config.workers : DefaultWorkerCount();
  TrainReport tr = TrainPolicy(state.params, state.data, topt);
  report.train_initial_loss = tr.initial_loss;
  report.train_final_loss = tr.final_loss;
  report.training_pairs = static_cast<int>(cstep.observations.rows());
}

void FinishReport(const RunConfig& config, TrainingState& state,
                  const CStepOutput& cstep, IterationReport& report) {
  report.subtraj_count = cstep.subtraj_count;
  report.skip_count = cstep.skip_count;
  report.fallback_count = cstep.fallback_count;
  report.mean_predicted_improvement = cstep.mean_improvement;
  // Skip-driven KL backoff for the next iteration.
  if (cstep.subtraj_count > 0 &&
      static_cast<double>(cstep.skip_count) / cstep.subtraj_count >
          config.kl_skip_threshold) {
    state.kl_weight *= 0.5;
  }
}

}  // namespace

RunContext RunContext::Make(const RunConfig& config) {
  RunContext ctx;
  ctx.model = BuildRobot(config.physics);
  ctx.table = SymmetryTable::Build(ctx.model);
  uint64_t tseed = config.terrain_seed != 0
                       ? config.terrain_seed
                       : DeriveSeed(config.seed, "terrain");
  ctx.terrain = GenerateTerrain(tseed, config.terrain_mean_slope,
                                config.terrain_std_slope,
                                config.terrain_max_variation,
                                config.terrain_extent, config.terrain_cell);
  return ctx;
}

IterationReport RunT6gpsIteration(const RunConfig& config, RunContext& ctx,
                                  TrainingState& state,
                                  const std::string& out_dir) {
  auto t_start = std::chrono::steady_clock::now();
  IterationReport report;
  report.iteration = state.iteration;
  report.kl_weight_used = state.kl_weight;
  report.noise_scale_used = NoiseForIteration(config, state.iteration);

  int n = config.samples_per_iteration;
  int workers = config.workers > 0 ? config.workers : DefaultWorkerCount();

  std::vector<FullState> x0s = SampleInitialStates(
      n, DeriveSeed(config.seed, "x0pool", state.iteration), ctx.terrain,
      ctx.model);
  std::vector<Trajectory> trajs(n);
  ParallelFor(n, workers, [&](int k) {
    ScenarioState scn = MakeScenario(
        DeriveSeed(config.seed, "scenario", state.iteration, k),
        x0s[k].com().head<2>(), ctx.terrain, config.waypoint_min_dist,
        config.waypoint_max_dist);
    scn.radius = config.waypoint_radius;
    scn.timeout = config.waypoint_timeout;
    scn.target_speed = config.target_speed;
    scn.cost_weights = Vec3(1.0, 1.0, config.cost_weight_vertical);
    RolloutOptions ropt;
    ropt.horizon = config.horizon;
    ropt.noise_scale = report.noise_scale_used;
    ropt.seed = DeriveSeed(config.seed, "rollout", state.iteration, k);
    trajs[k] = Rollout(state.params, x0s[k], scn, ropt, ctx.model, ctx.table,
                       ctx.terrain);
  });

  LocalizationOptions lopt = config.MakeLocalizationOptions();
  lopt.seed = DeriveSeed(config.seed, "ransac", state.iteration);
  lopt.workers = workers;
  LocalizationResult loc = Localize(trajs, lopt, ctx.table, ctx.model);

  CStepOutput cstep = RunCStep(config, ctx, trajs, loc, state.kl_weight);
  FinishReport(config, state, cstep, report);
  SStep(config, state, cstep, report);

  SampleStats stats = ComputeSampleStats(trajs, report.speed_hist_lo,
                                         report.speed_hist_hi, 24);
  report.mean_sample_cost = stats.mean_cost;
  report.mean_forward_speed = stats.mean_forward;
  report.stuck_fraction = stats.stuck_fraction;
  report.speed_histogram = stats.histogram;
  report.total_steps = stats.total_steps;
  for (const auto& segres : loc.segmentation) {
    report.segment_count += static_cast<int>(segres.segments.size());
  }
  report.discarded_steps = loc.discarded_steps;
  report.class_count = static_cast<int>(loc.models.classes.size());
  report.census = loc.census;

  if (!out_dir.empty()) {
    std::string iter_dir = IterDir(out_dir, state.iteration);
    EnsureDir(iter_dir);
    LogTrajectories(config, trajs, iter_dir);
    WriteCensusCsv(loc.census, (fs::path(iter_dir) / "class_census.csv").string());
    WriteOptimizerCsv(report, (fs::path(iter_dir) / "optimizer.csv").string());
    SavePolicyCheckpoint(state.params,
                         (fs::path(iter_dir) / "checkpoint.json").string());
  }

  ++state.iteration;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

IterationReport RunBaselineIteration(const RunConfig& config, RunContext& ctx,
                                     TrainingState& state,
                                     const std::string& out_dir) {
  if (config.terrain_mean_slope > 0.0 || config.terrain_max_variation > 0.0) {
    throw Error(ErrorCategory::kConfig,
                "baseline-gps requires flat terrain targets");
  }
  auto t_start = std::chrono::steady_clock::now();
  IterationReport report;
  report.iteration = state.iteration;
  report.kl_weight_used = state.kl_weight;
  report.noise_scale_used = NoiseForIteration(config, state.iteration);

  int workers = config.workers > 0 ? config.workers : DefaultWorkerCount();
  int J = config.baseline_directions;
  int N = config.samples_per_iteration;
  int T = config.horizon;
  ReductionChoice choice = ParseReductionChoice(config.reduction);

  // Fixed start: settled on the canonical Delta face, fixed orientation.
  FullState x0 =
      SettleNeutral(ctx.model, ctx.terrain,
                    ctx.table.canonical_face(FaceType::kDelta));

  std::vector<Trajectory> all_trajs;
  all_trajs.reserve(J * N);
  CStepOutput merged;
  std::vector<MatX> obs_blocks;
  std::vector<MatX> act_blocks;

  for (int j = 0; j < J; ++j) {
    double angle = 2.0 * M_PI * j / J;
    Vec2 dir(std::cos(angle), std::sin(angle));

    std::vector<Trajectory> trajs(N);
    ParallelFor(N, workers, [&](int k) {
      ScenarioState scn;
      scn.waypoints.fill(x0.com().head<2>() + 1000.0 * dir);
      scn.radius = config.waypoint_radius;
      scn.timeout = 1e9;  // fixed commanded direction, no waypoint logic
      scn.target_speed = config.target_speed;
      scn.cost_weights = Vec3(1.0, 1.0, config.cost_weight_vertical);
      RolloutOptions ropt;
      ropt.horizon = T;
      ropt.noise_scale = report.noise_scale_used;
      ropt.seed = DeriveSeed(config.seed, "baseline", state.iteration,
                             static_cast<uint64_t>(j) * 100003 + k);
      ropt.identity_frame = true;
      trajs[k] = Rollout(state.params, x0, scn, ropt, ctx.model, ctx.table,
                         ctx.terrain);
    });

    // One single-mode LTV model per time step over the N samples.
    SurrogateModelSet models;
    SegmentClassKey key;
    key.face_type = FaceType::kDelta;
    key.partial = SegmentPartial::kComplete;
    ClassSeries series;
    series.t_xi = T;
    series.cells.resize(T);
    series.segment_count = N;
    ReductionFrame identity;
    identity.map_index = ctx.table.identity_index();
    identity.heading_rotation = 0.0;
    identity.reference_face = trajs[0].start_face;
    for (int t = 0; t < T; ++t) {
      std::vector<ReducedPoint> points(N);
      for (int k = 0; k < N; ++k) {
        points[k].x = ReduceState(trajs[k].steps[t].state, identity, choice,
                                  ctx.table, ctx.model);
        points[k].u = Eigen::Map<const VecX>(
            trajs[k].steps[t].control.target_rest_lengths.data(), kNumCables);
        points[k].x_next = ReduceState(trajs[k].state_at(t + 1), identity,
                                       choice, ctx.table, ctx.model);
      }
      // min_fit above N forces the plain least-squares path.
      series.cells[t] = FitMultimodal(points, N + 1, 1, 0, 1);
    }
    models.classes.emplace(key, std::move(series));

    // Whole samples as single optimization windows.
    TrajoptOptions topt;
    topt.t_tilde = std::max(2, T);
    topt.choice = choice;
    topt.v_star = config.target_speed;
    topt.w_diag = Vec3(1.0, 1.0, config.cost_weight_vertical);
    topt.kl_weight = state.kl_weight;
    topt.u_lo = ctx.model.rest_length_min;
    topt.u_hi = ctx.model.rest_length_max;

    std::vector<SubTrajectoryResult> results(N);
    ParallelFor(N, workers, [&](int k) {
      std::vector<Segment> segments(1);
      segments[0].trajectory_id = k;
      segments[0].start = 0;
      segments[0].end = T;
      segments[0].bottom_face = trajs[k].start_face;
      segments[0].frame = identity;
      std::vector<StepBinding> bindings(T);
      for (int t = 0; t < T; ++t) {
        bindings[t].key = key;
        bindings[t].txi_index = t;
        bindings[t].segment_index = 0;
      }
      SubTrajectory sub{k, 0, T};
      results[k] = OptimizeSubtrajectory(trajs[k], sub, bindings, segments,
                                         models, topt, ctx.table, ctx.model);
    });

    for (int k = 0; k < N; ++k) {
      merged.subtraj_count += 1;
      if (!results[k].success) {
        merged.skip_count += 1;
        continue;
      }
      merged.fallback_count += results[k].fallback_models;
      merged.mean_improvement += results[k].predicted_cost_before -
                                 results[k].predicted_cost_after;
      auto tp = CollectTrainingPairs(trajs[k], {results[k]});
      MatX y(tp.size(), kObservationDim);
      MatX u(tp.size(), kNumCables);
      for (size_t i = 0; i < tp.size(); ++i) {
        y.row(i) = tp[i].first.transpose();
        u.row(i) = tp[i].second.transpose();
      }
      obs_blocks.push_back(std::move(y));
      act_blocks.push_back(std::move(u));
    }
    for (Trajectory& t : trajs) all_trajs.push_back(std::move(t));
  }
  int success = merged.subtraj_count - merged.skip_count;
  if (success > 0) merged.mean_improvement /= success;

  int total_rows = 0;
  for (const MatX& y : obs_blocks) total_rows += static_cast<int>(y.rows());
  merged.observations.resize(total_rows, kObservationDim);
  merged.actions.resize(total_rows, kNumCables);
  int at = 0;
  for (size_t i = 0; i < obs_blocks.size(); ++i) {
    merged.observations.middleRows(at, obs_blocks[i].rows()) = obs_blocks[i];
    merged.actions.middleRows(at, obs_blocks[i].rows()) = act_blocks[i];
    at += static_cast<int>(obs_blocks[i].rows());
  }

  FinishReport(config, state, merged, report);
  SStep(config, state, merged, report);

  SampleStats stats = ComputeSampleStats(all_trajs, report.speed_hist_lo,
                                         report.speed_hist_hi, 24);
  report.mean_sample_cost = stats.mean_cost;
  report.mean_forward_speed = stats.mean_forward;
  report.stuck_fraction = stats.stuck_fraction;
  report.speed_histogram = stats.histogram;
  report.total_steps = stats.total_steps;

  if (!out_dir.empty()) {
    std::string iter_dir = IterDir(out_dir, state.iteration);
    EnsureDir(iter_dir);
    LogTrajectories(config, all_trajs, iter_dir);
    WriteOptimizerCsv(report, (fs::path(iter_dir) / "optimizer.csv").string());
    SavePolicyCheckpoint(state.params,
                         (fs::path(iter_dir) / "checkpoint.json").string());
  }

  ++state.iteration;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

std::vector<IterationReport> RunTraining(const RunConfig& config,
                                         const std::string& out_dir) {
  if (config.mode == RunMode::kEvaluate) {
    throw Error(ErrorCategory::kConfig, "RunTraining needs a training mode");
  }
  RunContext ctx = RunContext::Make(config);
  if (!out_dir.empty()) {
    EnsureDir(out_dir);
    std::ofstream cfg(fs::path(out_dir) / "config.txt");
    cfg << SerializeRunConfig(config);
    ctx.terrain.Save((fs::path(out_dir) / "terrain.txt").string());
  }

  TrainingState state;
  state.params = InitPolicy(DeriveSeed(config.seed, "policy-init"), ctx.model);
  state.kl_weight = config.kl_weight;

  std::vector<IterationReport> reports;
  for (int i = 0; i < config.iterations; ++i) {
    IterationReport report =
        config.mode == RunMode::kT6gps
            ? RunT6gpsIteration(config, ctx, state, out_dir)
            : RunBaselineIteration(config, ctx, state, out_dir);
    reports.push_back(report);
    if (!out_dir.empty()) {
      WriteIterationReportCsv(reports,
                              (fs::path(out_dir) / "summary.csv").string());
    }
    // Optional plateau stop: relative improvement < 2% over 2 iterations.
    if (config.plateau_stop && reports.size() >= 3) {
      double prev2 = reports[reports.size() - 3].mean_sample_cost;
      double now = reports.back().mean_sample_cost;
      if (prev2 > 0.0 && (prev2 - now) / prev2 < 0.02) break;
    }
  }
  if (!out_dir.empty()) {
    SavePolicyCheckpoint(state.params,
                         (fs::path(out_dir) / "policy_final.json").string());
  }
  return reports;
}

EvalReport Evaluate(const RunConfig& config, const PolicyParams& params,
                    const std::string& out_dir) {
  RunContext ctx = RunContext::Make(config);
  if (!out_dir.empty()) EnsureDir(out_dir);

  EvalReport report;
  double cost = 0.0, fwd = 0.0, stuck = 0.0;
  int steps = 0;
  for (int e = 0; e < config.episodes; ++e) {
    std::vector<FullState> x0 = SampleInitialStates(
        1, DeriveSeed(config.seed, "eval-x0", e), ctx.terrain, ctx.model);
    ScenarioState scn =
        MakeScenario(DeriveSeed(config.seed, "eval-scenario", e),
                     x0[0].com().head<2>(), ctx.terrain,
                     config.waypoint_min_dist, config.waypoint_max_dist);
    scn.radius = config.waypoint_radius;
    scn.timeout = config.waypoint_timeout;
    scn.target_speed = config.target_speed;
    scn.cost_weights = Vec3(1.0, 1.0, config.cost_weight_vertical);
    RolloutOptions ropt;
    ropt.horizon = config.eval_horizon;
    ropt.noise_scale = 0.0;
    ropt.seed = DeriveSeed(config.seed, "eval-rollout", e);
    Trajectory traj = Rollout(params, x0[0], scn, ropt, ctx.model, ctx.table,
                              ctx.terrain);

    EvalEpisode ep;
    int ep_stuck = 0;
    for (const TrajectoryStep& step : traj.steps) {
      Vec3 v = step.state.com_velocity();
      ep.mean_cost += step.cost;
      ep.mean_forward_speed += v.dot(step.target_dir);
      if (v.norm() < 0.05) ++ep_stuck;
      if (step.arrival) ++ep.arrivals;
    }
    int n = traj.length();
    if (n > 0) {
      ep.mean_cost /= n;
      ep.mean_forward_speed /= n;
      ep.stuck_fraction = static_cast<double>(ep_stuck) / n;
    }
    cost += ep.mean_cost;
    fwd += ep.mean_forward_speed;
    stuck += ep.stuck_fraction;
    steps += n;
    report.total_arrivals += ep.arrivals;
    report.episodes.push_back(ep);

    if (!out_dir.empty()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "eval_episode_%03d_track.csv", e);
      std::ofstream track(fs::path(out_dir) / buf);
      track << "time,com_x,com_y,com_z,waypoint,arrival\n";
      track.precision(10);
      for (const TrajectoryStep& step : traj.steps) {
        Vec3 com = step.state.com();
        track << step.state.sim_time << ',' << com.x() << ',' << com.y()
              << ',' << com.z() << ',' << step.waypoint_index << ','
              << (step.arrival ? 1 : 0) << '\n';
      }
      std::snprintf(buf, sizeof(buf), "eval_episode_%03d_footprints.csv", e);
      std::ofstream feet(fs::path(out_dir) / buf);
      feet << "time,face,node_a,ax,ay,az,node_b,bx,by,bz,node_c,cx,cy,cz\n";
      feet.precision(10);
      for (const TrajectoryStep& step : traj.steps) {
        const auto& nodes = ctx.model.faces[step.bottom_face].nodes;
        feet << step.state.sim_time << ',' << step.bottom_face;
        for (int nidx : nodes) {
          const Vec3& p = step.state.node_pos[nidx];
          feet << ',' << nidx << ',' << p.x() << ',' << p.y() << ',' << p.z();
        }
        feet << '\n';
      }
    }
  }
  int ne = std::max<size_t>(1, report.episodes.size());
  report.mean_cost = cost / ne;
  report.mean_forward_speed = fwd / ne;
  report.stuck_fraction = stuck / ne;
  if (!out_dir.empty()) {
    std::ofstream sum(fs::path(out_dir) / "eval_summary.csv");
    sum << "episode,mean_cost,mean_forward_speed,stuck_fraction,arrivals\n";
    for (size_t e = 0; e < report.episodes.size(); ++e) {
      const EvalEpisode& ep = report.episodes[e];
      sum << e << ',' << ep.mean_cost << ',' << ep.mean_forward_speed << ','
          << ep.stuck_fraction << ',' << ep.arrivals << '\n';
    }
  }
  return report;
}

void WriteIterationReportCsv(const std::vector<IterationReport>& reports,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write summary: " + path);
  out << "iteration,mean_sample_cost,mean_forward_speed,stuck_fraction,"
      << "total_steps,segments,discarded_steps,classes,subtrajectories,"
      << "skips,fallbacks,mean_predicted_improvement,training_pairs,"
      << "train_initial_loss,train_final_loss,kl_weight,noise_scale,"
      << "wall_time_s\n";
  for (const IterationReport& r : reports) {
    out << r.iteration << ',' << r.mean_sample_cost << ','
        << r.mean_forward_speed << ',' << r.stuck_fraction << ','
        << r.total_steps << ',' << r.segment_count << ','
        << r.discarded_steps << ',' << r.class_count << ','
        << r.subtraj_count << ',' << r.skip_count << ',' << r.fallback_count
        << ',' << r.mean_predicted_improvement << ',' << r.training_pairs
        << ',' << r.train_initial_loss << ',' << r.train_final_loss << ','
        << r.kl_weight_used << ',' << r.noise_scale_used << ','
        << r.wall_time_s << '\n';
  }
}

}  // namespace t6gps

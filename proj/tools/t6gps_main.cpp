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

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "t6gps/checkpoint.hpp"
#include "t6gps/config.hpp"
#include "t6gps/error.hpp"
#include "t6gps/pipeline.hpp"
#include "t6gps/terrain.hpp"

namespace {

int RunTrain(const std::string& config_path, const std::string& mode,
             const std::string& out, uint64_t seed, int workers) {
  t6gps::RunConfig config = t6gps::LoadRunConfig(config_path);
  if (!mode.empty()) config.mode = t6gps::ParseRunMode(mode);
  if (seed != 0) config.seed = seed;
  if (workers > 0) config.workers = workers;
  if (config.mode == t6gps::RunMode::kEvaluate) {
    throw t6gps::Error(t6gps::ErrorCategory::kConfig,
                       "train requires mode t6gps or baseline-gps");
  }
  std::printf("samples budget: %llu steps\n",
              static_cast<unsigned long long>(t6gps::SampleBudget(config)));
  auto reports = t6gps::RunTraining(config, out);
  for (const auto& r : reports) {
    std::printf(
        "iter %d  cost %.4f  fwd %.3f m/s  stuck %.2f  pairs %d  "
        "skips %d/%d  %.1fs\n",
        r.iteration, r.mean_sample_cost, r.mean_forward_speed,
        r.stuck_fraction, r.training_pairs, r.skip_count, r.subtraj_count,
        r.wall_time_s);
  }
  return 0;
}

int RunEvaluate(const std::string& checkpoint, int episodes,
                uint64_t terrain_seed, const std::string& config_path,
                const std::string& out) {
  t6gps::RunConfig config;
  if (!config_path.empty()) config = t6gps::LoadRunConfig(config_path);
  config.mode = t6gps::RunMode::kEvaluate;
  if (episodes > 0) config.episodes = episodes;
  if (terrain_seed != 0) config.terrain_seed = terrain_seed;
  t6gps::PolicyParams params = t6gps::LoadPolicyCheckpoint(checkpoint);
  t6gps::EvalReport report = t6gps::Evaluate(config, params, out);
  std::printf("episodes %zu  mean cost %.4f  fwd %.3f m/s  stuck %.2f  "
              "arrivals %d\n",
              report.episodes.size(), report.mean_cost,
              report.mean_forward_speed, report.stuck_fraction,
              report.total_arrivals);
  return 0;
}

int RunTerrain(uint64_t seed, bool stats_only, const std::string& out,
               double mean_slope, double std_slope, double max_var) {
  t6gps::Terrain terrain =
      t6gps::GenerateTerrain(seed, mean_slope, std_slope, max_var);
  t6gps::FacetStats stats = terrain.ComputeFacetStats();
  std::printf("mean slope %.2f deg  std %.2f deg  height variation %.3f m%s\n",
              stats.mean_slope_deg, stats.std_slope_deg,
              stats.max_height_variation,
              terrain.generation_converged ? "" : "  (warning: not converged)");
  if (!stats_only) {
    std::string path = out.empty() ? "terrain.txt" : out;
    terrain.Save(path);
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"6-bar tensegrity guided policy search pipeline"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "run training iterations");
  std::string train_config;
  std::string train_mode;
  std::string train_out = "run";
  uint64_t train_seed = 0;
  int train_workers = 0;
  train->add_option("--config", train_config, "run configuration file")
      ->required();
  train->add_option("--mode", train_mode, "t6gps | baseline-gps");
  train->add_option("--out", train_out, "output run directory");
  train->add_option("--seed", train_seed, "override config seed");
  train->add_option("--workers", train_workers, "worker threads");

  auto* eval = app.add_subcommand("evaluate", "evaluate a policy checkpoint");
  std::string eval_checkpoint;
  std::string eval_config;
  std::string eval_out = "eval";
  int eval_episodes = 0;
  uint64_t eval_terrain_seed = 0;
  eval->add_option("--checkpoint", eval_checkpoint, "policy checkpoint")
      ->required();
  eval->add_option("--episodes", eval_episodes, "number of episodes");
  eval->add_option("--terrain-seed", eval_terrain_seed, "held-out terrain");
  eval->add_option("--config", eval_config, "base run configuration");
  eval->add_option("--out", eval_out, "output directory");

  auto* terrain = app.add_subcommand("terrain", "generate or inspect terrain");
  uint64_t terrain_seed = 1;
  bool stats_only = false;
  std::string terrain_out;
  double mean_slope = 38.0, std_slope = 16.0, max_var = 1.55;
  terrain->add_option("--seed", terrain_seed, "terrain seed");
  terrain->add_flag("--stats-only", stats_only, "print statistics only");
  terrain->add_option("--out", terrain_out, "terrain file path");
  terrain->add_option("--mean-slope", mean_slope, "target mean facet slope");
  terrain->add_option("--std-slope", std_slope, "target slope std dev");
  terrain->add_option("--max-variation", max_var, "target height range");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      return RunTrain(train_config, train_mode, train_out, train_seed,
                      train_workers);
    }
    if (eval->parsed()) {
      return RunEvaluate(eval_checkpoint, eval_episodes, eval_terrain_seed,
                         eval_config, eval_out);
    }
    if (terrain->parsed()) {
      return RunTerrain(terrain_seed, stats_only, terrain_out, mean_slope,
                        std_slope, max_var);
    }
  } catch (const t6gps::Error& e) {
    std::cerr << "error: category=" << t6gps::ToString(e.category())
              << " message=" << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: category=internal message=" << e.what() << "\n";
    return static_cast<int>(t6gps::ErrorCategory::kInternal);
  }
  return 1;
}

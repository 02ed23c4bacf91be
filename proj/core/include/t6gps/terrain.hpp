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

#ifndef T6GPS_TERRAIN_HPP_
#define T6GPS_TERRAIN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "t6gps/types.hpp"

namespace t6gps {

struct FacetStats {
  double mean_slope_deg = 0.0;
  double std_slope_deg = 0.0;
  double max_height_variation = 0.0;  // max - min over grid nodes, m
};

// Regular-grid heightfield centered on the origin. Each cell is split
// into two triangular facets, giving a continuous piecewise-linear
// surface.
class Terrain {
 public:
  Terrain() = default;
  Terrain(int nx, int ny, double cell_size);

  static Terrain Flat(double extent = 30.0, double cell_size = 0.25);

  double height(double x, double y) const;
  Vec3 normal(double x, double y) const;  // unit, z > 0

  FacetStats ComputeFacetStats() const;

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double cell_size() const { return cell_size_; }
  double extent_x() const { return (nx_ - 1) * cell_size_; }
  double extent_y() const { return (ny_ - 1) * cell_size_; }
  double min_x() const { return -0.5 * extent_x(); }
  double min_y() const { return -0.5 * extent_y(); }

  double& at(int ix, int iy) { return heights_[iy * nx_ + ix]; }
  double at(int ix, int iy) const { return heights_[iy * nx_ + ix]; }
  const std::vector<double>& heights() const { return heights_; }

  // Generation metadata, kept for the terrain file header.
  uint64_t seed = 0;
  double target_mean_slope_deg = 0.0;
  double target_std_slope_deg = 0.0;
  double target_max_variation = 0.0;
  bool generation_converged = true;

  void Save(const std::string& path) const;
  static Terrain Load(const std::string& path);

 private:
  int nx_ = 0;
  int ny_ = 0;
  double cell_size_ = 0.25;
  std::vector<double> heights_;
};

// Multi-octave value-noise heightfield, iteratively rescaled until the
// measured facet statistics reach the targets (mean slope and std within
// 2 degrees, height variation within 0.1 m). Feature length scales are
// on the order of the vehicle size. A zero height-variation target
// produces flat terrain. If the rescaling loop fails to converge within
// 50 rounds the nearest-achieved terrain is returned with
// generation_converged = false.
Terrain GenerateTerrain(uint64_t seed, double target_mean_slope_deg,
                        double target_std_slope_deg,
                        double target_max_variation, double extent = 30.0,
                        double cell_size = 0.25);

}  // namespace t6gps

#endif  // T6GPS_TERRAIN_HPP_

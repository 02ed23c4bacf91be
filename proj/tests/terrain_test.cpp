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

#include "t6gps/terrain.hpp"

#include <cmath>
#include <cstdio>

#include <gtest/gtest.h>

#include "t6gps/rng.hpp"

namespace t6gps {
namespace {

TEST(Terrain, FlatStats) {
  Terrain flat = Terrain::Flat();
  FacetStats stats = flat.ComputeFacetStats();
  EXPECT_EQ(stats.mean_slope_deg, 0.0);
  EXPECT_EQ(stats.std_slope_deg, 0.0);
  EXPECT_EQ(stats.max_height_variation, 0.0);
}

TEST(Terrain, UniformRampStats) {
  Terrain ramp(41, 41, 0.25);
  double slope = std::tan(10.0 * M_PI / 180.0);
  for (int iy = 0; iy < ramp.ny(); ++iy) {
    for (int ix = 0; ix < ramp.nx(); ++ix) {
      ramp.at(ix, iy) = slope * (ramp.min_x() + ix * ramp.cell_size());
    }
  }
  FacetStats stats = ramp.ComputeFacetStats();
  EXPECT_NEAR(stats.mean_slope_deg, 10.0, 1e-9);
  EXPECT_NEAR(stats.std_slope_deg, 0.0, 1e-9);
}

TEST(Terrain, ZeroAmplitudeTargetIsFlat) {
  Terrain t = GenerateTerrain(5, 38.0, 16.0, 0.0);
  FacetStats stats = t.ComputeFacetStats();
  EXPECT_EQ(stats.mean_slope_deg, 0.0);
  EXPECT_EQ(stats.max_height_variation, 0.0);
}

TEST(Terrain, DefaultTargetsWithinTolerance) {
  Terrain t = GenerateTerrain(42, 38.0, 16.0, 1.55);
  FacetStats stats = t.ComputeFacetStats();
  EXPECT_TRUE(t.generation_converged);
  EXPECT_NEAR(stats.mean_slope_deg, 38.0, 2.0);
  EXPECT_NEAR(stats.std_slope_deg, 16.0, 2.0);
  EXPECT_NEAR(stats.max_height_variation, 1.55, 0.1);
}

TEST(Terrain, MildTargetsWithinTolerance) {
  Terrain t = GenerateTerrain(9, 20.0, 10.0, 0.8);
  FacetStats stats = t.ComputeFacetStats();
  EXPECT_NEAR(stats.mean_slope_deg, 20.0, 2.0);
  EXPECT_NEAR(stats.std_slope_deg, 10.0, 2.0);
  EXPECT_NEAR(stats.max_height_variation, 0.8, 0.1);
}

TEST(Terrain, DeterministicForSeed) {
  Terrain a = GenerateTerrain(123, 38.0, 16.0, 1.55);
  Terrain b = GenerateTerrain(123, 38.0, 16.0, 1.55);
  ASSERT_EQ(a.heights().size(), b.heights().size());
  for (size_t i = 0; i < a.heights().size(); ++i) {
    EXPECT_EQ(a.heights()[i], b.heights()[i]);
  }
}

TEST(Terrain, InterpolationContinuousAcrossEdges) {
  Terrain t = GenerateTerrain(3, 25.0, 12.0, 1.0);
  Rng rng = MakeRng(8);
  std::uniform_int_distribution<int> cell(1, t.nx() - 3);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int ix = cell(rng);
    int iy = cell(rng);
    // A point on the vertical edge between two cells.
    double x = t.min_x() + ix * t.cell_size();
    double y = t.min_y() + (iy + frac(rng)) * t.cell_size();
    double left = t.height(x - 1e-12, y);
    double right = t.height(x + 1e-12, y);
    EXPECT_NEAR(left, right, 1e-9);
    // And on the cell diagonal within one cell.
    double fx = frac(rng);
    double dx = t.min_x() + (ix + fx) * t.cell_size();
    double dy = t.min_y() + (iy + 1.0 - fx) * t.cell_size();
    EXPECT_NEAR(t.height(dx - 1e-12, dy - 1e-12),
                t.height(dx + 1e-12, dy + 1e-12), 1e-8);
  }
}

TEST(Terrain, SaveLoadRoundTrip) {
  Terrain t = GenerateTerrain(77, 30.0, 14.0, 1.2, 12.0, 0.5);
  std::string path = ::testing::TempDir() + "/terrain_roundtrip.txt";
  t.Save(path);
  Terrain back = Terrain::Load(path);
  EXPECT_EQ(back.nx(), t.nx());
  EXPECT_EQ(back.ny(), t.ny());
  EXPECT_EQ(back.cell_size(), t.cell_size());
  EXPECT_EQ(back.seed, t.seed);
  for (size_t i = 0; i < t.heights().size(); ++i) {
    EXPECT_EQ(back.heights()[i], t.heights()[i]);
  }
  std::remove(path.c_str());
}

TEST(Terrain, NormalsPointUp) {
  Terrain t = GenerateTerrain(4, 38.0, 16.0, 1.55);
  Rng rng = MakeRng(6);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vec3 n = t.normal(u(rng), u(rng));
    EXPECT_GT(n.z(), 0.0);
    EXPECT_NEAR(n.norm(), 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace t6gps

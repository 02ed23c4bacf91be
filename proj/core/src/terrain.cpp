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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "t6gps/error.hpp"
#include "t6gps/rng.hpp"

namespace t6gps {
namespace {

constexpr double kRadToDeg = 180.0 / M_PI;
constexpr double kDegToRad = M_PI / 180.0;

// Deterministic lattice value in [-1, 1].
double LatticeValue(uint64_t seed, int octave, int64_t ix, int64_t iy) {
  uint64_t h = seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(octave + 1));
  h ^= static_cast<uint64_t>(ix) * 0xc2b2ae3d27d4eb4fULL;
  SplitMix64(h);
  h ^= static_cast<uint64_t>(iy) * 0x165667b19e3779f9ULL;
  uint64_t v = SplitMix64(h);
  return 2.0 * (static_cast<double>(v >> 11) * 0x1.0p-53) - 1.0;
}

double Quintic(double t) { return t * t * t * (t * (6.0 * t - 15.0) + 10.0); }

// Smooth value noise with unit lattice spacing.
double ValueNoise(uint64_t seed, int octave, double x, double y) {
  double fx = std::floor(x);
  double fy = std::floor(y);
  int64_t ix = static_cast<int64_t>(fx);
  int64_t iy = static_cast<int64_t>(fy);
  double tx = Quintic(x - fx);
  double ty = Quintic(y - fy);
  double v00 = LatticeValue(seed, octave, ix, iy);
  double v10 = LatticeValue(seed, octave, ix + 1, iy);
  double v01 = LatticeValue(seed, octave, ix, iy + 1);
  double v11 = LatticeValue(seed, octave, ix + 1, iy + 1);
  double a = v00 + tx * (v10 - v00);
  double b = v01 + tx * (v11 - v01);
  return a + ty * (b - a);
}

struct NoiseShape {
  double amplitude = 0.4;    // m
  double frequency = 0.6;    // 1/m on the base octave
  double patchiness = 0.5;   // spatial amplitude modulation in [0, 0.95]
};

void FillHeights(Terrain& t, uint64_t seed, const NoiseShape& shape) {
  constexpr int kOctaves = 3;
  constexpr double kRoughness = 0.5;
  double wsum = 0.0;
  for (int o = 0; o < kOctaves; ++o) wsum += std::pow(kRoughness, o);
  for (int iy = 0; iy < t.ny(); ++iy) {
    for (int ix = 0; ix < t.nx(); ++ix) {
      double x = t.min_x() + ix * t.cell_size();
      double y = t.min_y() + iy * t.cell_size();
      double v = 0.0;
      for (int o = 0; o < kOctaves; ++o) {
        double f = shape.frequency * std::pow(2.0, o);
        v += std::pow(kRoughness, o) * ValueNoise(seed, o, x * f, y * f);
      }
      v /= wsum;
      // Low-frequency amplitude modulation fattens the slope
      // distribution tails relative to a single Gaussian-like field.
      double mod = ValueNoise(seed, 17, x * shape.frequency * 0.35,
                              y * shape.frequency * 0.35);
      double amp = shape.amplitude * (1.0 + shape.patchiness * mod);
      t.at(ix, iy) = amp * v;
    }
  }
}

}  // namespace

Terrain::Terrain(int nx, int ny, double cell_size)
    : nx_(nx), ny_(ny), cell_size_(cell_size),
      heights_(static_cast<size_t>(nx) * ny, 0.0) {
  if (nx < 2 || ny < 2 || !(cell_size > 0.0)) {
    throw Error(ErrorCategory::kConfig, "terrain grid must be >=2x2");
  }
}

Terrain Terrain::Flat(double extent, double cell_size) {
  int n = std::max(2, static_cast<int>(std::round(extent / cell_size)) + 1);
  return Terrain(n, n, cell_size);
}

double Terrain::height(double x, double y) const {
  double gx = (x - min_x()) / cell_size_;
  double gy = (y - min_y()) / cell_size_;
  gx = std::clamp(gx, 0.0, static_cast<double>(nx_ - 1));
  gy = std::clamp(gy, 0.0, static_cast<double>(ny_ - 1));
  int ix = std::min(static_cast<int>(gx), nx_ - 2);
  int iy = std::min(static_cast<int>(gy), ny_ - 2);
  double tx = gx - ix;
  double ty = gy - iy;
  double h00 = at(ix, iy);
  double h10 = at(ix + 1, iy);
  double h01 = at(ix, iy + 1);
  double h11 = at(ix + 1, iy + 1);
  if (tx + ty <= 1.0) {
    return h00 + tx * (h10 - h00) + ty * (h01 - h00);
  }
  return h11 + (1.0 - tx) * (h01 - h11) + (1.0 - ty) * (h10 - h11);
}

Vec3 Terrain::normal(double x, double y) const {
  double gx = (x - min_x()) / cell_size_;
  double gy = (y - min_y()) / cell_size_;
  gx = std::clamp(gx, 0.0, static_cast<double>(nx_ - 1));
  gy = std::clamp(gy, 0.0, static_cast<double>(ny_ - 1));
  int ix = std::min(static_cast<int>(gx), nx_ - 2);
  int iy = std::min(static_cast<int>(gy), ny_ - 2);
  double tx = gx - ix;
  double ty = gy - iy;
  double h00 = at(ix, iy);
  double h10 = at(ix + 1, iy);
  double h01 = at(ix, iy + 1);
  double h11 = at(ix + 1, iy + 1);
  double c = cell_size_;
  Vec3 n;
  if (tx + ty <= 1.0) {
    // plane through p00, p10, p01
    n = Vec3(-(h10 - h00) / c, -(h01 - h00) / c, 1.0);
  } else {
    n = Vec3(-(h11 - h01) / c, -(h11 - h10) / c, 1.0);
  }
  return n.normalized();
}

FacetStats Terrain::ComputeFacetStats() const {
  FacetStats stats;
  std::vector<double> slopes;
  slopes.reserve(2 * static_cast<size_t>(nx_ - 1) * (ny_ - 1));
  double c = cell_size_;
  for (int iy = 0; iy + 1 < ny_; ++iy) {
    for (int ix = 0; ix + 1 < nx_; ++ix) {
      double h00 = at(ix, iy);
      double h10 = at(ix + 1, iy);
      double h01 = at(ix, iy + 1);
      double h11 = at(ix + 1, iy + 1);
      Vec3 n1(-(h10 - h00) / c, -(h01 - h00) / c, 1.0);
      Vec3 n2(-(h11 - h01) / c, -(h11 - h10) / c, 1.0);
      slopes.push_back(std::acos(1.0 / n1.norm()) * kRadToDeg);
      slopes.push_back(std::acos(1.0 / n2.norm()) * kRadToDeg);
    }
  }
  if (!slopes.empty()) {
    double sum = 0.0;
    for (double s : slopes) sum += s;
    stats.mean_slope_deg = sum / slopes.size();
    double var = 0.0;
    for (double s : slopes) {
      double d = s - stats.mean_slope_deg;
      var += d * d;
    }
    stats.std_slope_deg = std::sqrt(var / slopes.size());
  }
  auto [mn, mx] = std::minmax_element(heights_.begin(), heights_.end());
  stats.max_height_variation = heights_.empty() ? 0.0 : *mx - *mn;
  return stats;
}

Terrain GenerateTerrain(uint64_t seed, double target_mean_slope_deg,
                        double target_std_slope_deg,
                        double target_max_variation, double extent,
                        double cell_size) {
  Terrain terrain = Terrain::Flat(extent, cell_size);
  terrain.seed = seed;
  terrain.target_mean_slope_deg = target_mean_slope_deg;
  terrain.target_std_slope_deg = target_std_slope_deg;
  terrain.target_max_variation = target_max_variation;
  if (target_max_variation <= 0.0 || target_mean_slope_deg <= 0.0) {
    return terrain;  // flat
  }

  NoiseShape shape;
  shape.amplitude = 0.4 * target_max_variation;
  shape.frequency = 0.6;
  shape.patchiness = 0.5;

  constexpr int kMaxRounds = 50;
  double best_err = 1e300;
  Terrain best = terrain;
  bool converged = false;
  for (int round = 0; round < kMaxRounds; ++round) {
    FillHeights(terrain, seed, shape);
    FacetStats s = terrain.ComputeFacetStats();
    double err = std::abs(s.mean_slope_deg - target_mean_slope_deg) / 2.0 +
                 std::abs(s.std_slope_deg - target_std_slope_deg) / 2.0 +
                 std::abs(s.max_height_variation - target_max_variation) / 0.1;
    if (err < best_err) {
      best_err = err;
      best = terrain;
    }
    if (std::abs(s.mean_slope_deg - target_mean_slope_deg) < 1.0 &&
        std::abs(s.std_slope_deg - target_std_slope_deg) < 1.0 &&
        std::abs(s.max_height_variation - target_max_variation) < 0.05) {
      converged = true;
      best = terrain;
      break;
    }
    // Amplitude controls the height range; frequency controls slope at
    // fixed amplitude; patchiness controls the spread/mean slope ratio.
    double amp_ratio = target_max_variation /
                       std::max(1e-6, s.max_height_variation);
    amp_ratio = std::clamp(amp_ratio, 0.5, 2.0);
    double tan_ratio = std::tan(target_mean_slope_deg * kDegToRad) /
                       std::max(1e-6, std::tan(s.mean_slope_deg * kDegToRad));
    double freq_ratio = std::clamp(tan_ratio / amp_ratio, 0.5, 2.0);
    double spread_target = target_std_slope_deg / target_mean_slope_deg;
    double spread_measured =
        s.std_slope_deg / std::max(1e-6, s.mean_slope_deg);
    double patch_ratio =
        std::clamp(spread_target / std::max(1e-6, spread_measured), 0.7, 1.4);
    shape.amplitude *= amp_ratio;
    shape.frequency *= freq_ratio;
    shape.patchiness =
        std::clamp(shape.patchiness * patch_ratio, 0.0, 0.95);
  }
  best.generation_converged = converged;
  return best;
}

void Terrain::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCategory::kIo, "cannot open terrain file for write: " + path);
  }
  out.precision(17);
  out << "t6gps-terrain 1\n";
  out << "extent " << extent_x() << " " << extent_y() << "\n";
  out << "cell " << cell_size_ << "\n";
  out << "seed " << seed << "\n";
  out << "targets " << target_mean_slope_deg << " " << target_std_slope_deg
      << " " << target_max_variation << "\n";
  out << "grid " << nx_ << " " << ny_ << "\n";
  for (int iy = 0; iy < ny_; ++iy) {
    for (int ix = 0; ix < nx_; ++ix) {
      out << at(ix, iy) << (ix + 1 == nx_ ? '\n' : ' ');
    }
  }
  if (!out) throw Error(ErrorCategory::kIo, "terrain write failed: " + path);
}

Terrain Terrain::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open terrain file: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "t6gps-terrain" || version != 1) {
    throw Error(ErrorCategory::kIo, "not a t6gps terrain file: " + path);
  }
  std::string key;
  double ex = 0.0, ey = 0.0, cell = 0.0;
  uint64_t seed = 0;
  double tm = 0.0, ts = 0.0, tv = 0.0;
  int nx = 0, ny = 0;
  in >> key >> ex >> ey;
  in >> key >> cell;
  in >> key >> seed;
  in >> key >> tm >> ts >> tv;
  in >> key >> nx >> ny;
  if (!in || key != "grid") {
    throw Error(ErrorCategory::kIo, "malformed terrain header: " + path);
  }
  Terrain t(nx, ny, cell);
  t.seed = seed;
  t.target_mean_slope_deg = tm;
  t.target_std_slope_deg = ts;
  t.target_max_variation = tv;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (!(in >> t.at(ix, iy))) {
        throw Error(ErrorCategory::kIo, "terrain grid truncated: " + path);
      }
    }
  }
  return t;
}

}  // namespace t6gps

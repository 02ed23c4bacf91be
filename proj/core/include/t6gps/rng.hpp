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

#ifndef T6GPS_RNG_HPP_
#define T6GPS_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace t6gps {

// splitmix64 step; used to derive independent stream seeds from one
// master seed so that results do not depend on scheduling order.
inline uint64_t SplitMix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed for a named substream, e.g.
// DeriveSeed(master, "rollout", iteration, sample_index).
inline uint64_t DeriveSeed(uint64_t master, std::string_view tag,
                           uint64_t a = 0, uint64_t b = 0, uint64_t c = 0) {
  uint64_t h = master ^ 0x51'7c'c1'b7'27'22'0a'95ULL;
  for (char ch : tag) {
    h ^= static_cast<uint64_t>(static_cast<unsigned char>(ch));
    SplitMix64(h);
  }
  h ^= a * 0x9e3779b97f4a7c15ULL;
  SplitMix64(h);
  h ^= b * 0xc2b2ae3d27d4eb4fULL;
  SplitMix64(h);
  h ^= c * 0x165667b19e3779f9ULL;
  uint64_t s = h;
  return SplitMix64(s);
}

using Rng = std::mt19937_64;

inline Rng MakeRng(uint64_t seed) { return Rng(seed); }

}  // namespace t6gps

#endif  // T6GPS_RNG_HPP_

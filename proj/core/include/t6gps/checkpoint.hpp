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

#ifndef T6GPS_CHECKPOINT_HPP_
#define T6GPS_CHECKPOINT_HPP_

#include <string>

#include "t6gps/policy.hpp"

namespace t6gps {

// Versioned JSON checkpoint: layer shapes, weights, normalization
// statistics, output bounds. Loading rejects version or shape
// mismatches.
void SavePolicyCheckpoint(const PolicyParams& params, const std::string& path);
PolicyParams LoadPolicyCheckpoint(const std::string& path);

}  // namespace t6gps

#endif  // T6GPS_CHECKPOINT_HPP_

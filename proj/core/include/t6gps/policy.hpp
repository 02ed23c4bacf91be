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

#ifndef T6GPS_POLICY_HPP_
#define T6GPS_POLICY_HPP_

#include <cstdint>
#include <vector>

#include "t6gps/robot_model.hpp"
#include "t6gps/state.hpp"
#include "t6gps/types.hpp"

namespace t6gps {

inline constexpr int kPolicyHidden = 256;
inline constexpr int kPolicyLayers = 3;

// Fully connected 47 -> 256 -> 256 -> 256 -> 24 network. Hidden layers
// use softplus; the output is squashed through a sigmoid scaled to the
// rest-length bounds, so commands are always in range.
struct PolicyParams {
  MatX w1, w2, w3, w4;
  VecX b1, b2, b3, b4;
  VecX input_mean;  // feature standardization, stored with the params
  VecX input_std;
  double out_lo = 0.0;
  double out_hi = 0.0;

  bool finite() const;
};

// Accumulated supervised pairs with per-pair weights (recency weighting).
struct TrainingSet {
  MatX observations;  // n x kObservationDim
  MatX actions;       // n x kNumCables
  VecX weights;       // n

  int size() const { return static_cast<int>(observations.rows()); }
  void Append(const MatX& y, const MatX& u, double weight);
};

// Small random weights; the output bias is set so a fresh policy
// commands approximately neutral rest lengths.
PolicyParams InitPolicy(uint64_t seed, const RobotModel& model);

ControlCommand PolicyForward(const PolicyParams& params, const VecX& y);
MatX PolicyForwardBatch(const PolicyParams& params, const MatX& y);

struct PolicyGradients {
  MatX w1, w2, w3, w4;
  VecX b1, b2, b3, b4;
};

// Weighted MSE over the set and its gradient; chunked across workers
// with a fixed reduction order.
double PolicyLossAndGradient(const PolicyParams& params, const TrainingSet& d,
                             PolicyGradients* grads, int workers = 1);

struct TrainOptions {
  int epochs = 300;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int workers = 1;
};

struct TrainReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> loss_history;
};

// Full-batch momentum descent on the standardized features, warm-started
// from `params` (statistics are refreshed from d first). Steps that
// raise the loss are rejected with a halved learning rate, so the
// returned parameters never lose to the starting point.
TrainReport TrainPolicy(PolicyParams& params, const TrainingSet& d,
                        const TrainOptions& options);

}  // namespace t6gps

#endif  // T6GPS_POLICY_HPP_

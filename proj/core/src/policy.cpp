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

#include "t6gps/policy.hpp"

#include <algorithm>
#include <cmath>

#include "t6gps/error.hpp"
#include "t6gps/parallel.hpp"
#include "t6gps/rng.hpp"

namespace t6gps {
namespace {

double Softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0.0) {
    double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

MatX SoftplusArr(const MatX& x) { return x.unaryExpr(&Softplus); }
MatX SigmoidArr(const MatX& x) { return x.unaryExpr(&Sigmoid); }

struct ForwardCache {
  MatX z0;  // standardized input, n x in
  MatX a1, h1, a2, h2, a3, h3, a4, s4;  // pre/post activations
};

// All activations for a standardized batch; out = lo + (hi-lo)*sigmoid.
MatX ForwardPass(const PolicyParams& p, const MatX& z0, ForwardCache* cache) {
  MatX a1 = (z0 * p.w1.transpose()).rowwise() + p.b1.transpose();
  MatX h1 = SoftplusArr(a1);
  MatX a2 = (h1 * p.w2.transpose()).rowwise() + p.b2.transpose();
  MatX h2 = SoftplusArr(a2);
  MatX a3 = (h2 * p.w3.transpose()).rowwise() + p.b3.transpose();
  MatX h3 = SoftplusArr(a3);
  MatX a4 = (h3 * p.w4.transpose()).rowwise() + p.b4.transpose();
  MatX s4 = SigmoidArr(a4);
  if (cache) {
    cache->z0 = z0;
    cache->a1 = std::move(a1);
    cache->h1 = h1;
    cache->a2 = std::move(a2);
    cache->h2 = h2;
    cache->a3 = std::move(a3);
    cache->h3 = h3;
    cache->a4 = std::move(a4);
    cache->s4 = s4;
  }
  return (s4.array() * (p.out_hi - p.out_lo) + p.out_lo).matrix();
}

MatX Standardize(const PolicyParams& p, const MatX& y) {
  MatX z = y.rowwise() - p.input_mean.transpose();
  z.array().rowwise() /= p.input_std.transpose().array();
  return z;
}

}  // namespace

bool PolicyParams::finite() const {
  return w1.allFinite() && w2.allFinite() && w3.allFinite() &&
         w4.allFinite() && b1.allFinite() && b2.allFinite() &&
         b3.allFinite() && b4.allFinite();
}

void TrainingSet::Append(const MatX& y, const MatX& u, double weight) {
  if (y.rows() != u.rows()) {
    throw Error(ErrorCategory::kInternal, "pair count mismatch");
  }
  int old = size();
  int add = static_cast<int>(y.rows());
  observations.conservativeResize(old + add, y.cols());
  actions.conservativeResize(old + add, u.cols());
  weights.conservativeResize(old + add);
  observations.bottomRows(add) = y;
  actions.bottomRows(add) = u;
  weights.tail(add).setConstant(weight);
}

PolicyParams InitPolicy(uint64_t seed, const RobotModel& model) {
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto init = [&](int rows, int cols, double scale) {
    MatX m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = scale * gauss(rng);
    }
    return m;
  };
  PolicyParams p;
  p.w1 = init(kPolicyHidden, kObservationDim,
              std::sqrt(1.0 / kObservationDim));
  p.w2 = init(kPolicyHidden, kPolicyHidden, std::sqrt(1.0 / kPolicyHidden));
  p.w3 = init(kPolicyHidden, kPolicyHidden, std::sqrt(1.0 / kPolicyHidden));
  p.w4 = init(kNumCables, kPolicyHidden, 0.01);
  p.b1 = VecX::Zero(kPolicyHidden);
  p.b2 = VecX::Zero(kPolicyHidden);
  p.b3 = VecX::Zero(kPolicyHidden);
  p.out_lo = model.rest_length_min;
  p.out_hi = model.rest_length_max;
  // Bias the squashed output at the neutral rest length.
  double frac = (model.neutral_rest_length - p.out_lo) / (p.out_hi - p.out_lo);
  frac = std::clamp(frac, 1e-3, 1.0 - 1e-3);
  p.b4 = VecX::Constant(kNumCables, std::log(frac / (1.0 - frac)));
  p.input_mean = VecX::Zero(kObservationDim);
  p.input_std = VecX::Ones(kObservationDim);
  return p;
}

ControlCommand PolicyForward(const PolicyParams& params, const VecX& y) {
  if (y.size() != kObservationDim) {
    throw Error(ErrorCategory::kConfig, "observation dimension mismatch");
  }
  MatX out = ForwardPass(params, Standardize(params, y.transpose()), nullptr);
  ControlCommand cmd;
  for (int c = 0; c < kNumCables; ++c) cmd.target_rest_lengths[c] = out(0, c);
  return cmd;
}

MatX PolicyForwardBatch(const PolicyParams& params, const MatX& y) {
  return ForwardPass(params, Standardize(params, y), nullptr);
}

namespace {

// Loss and gradient for a contiguous row range.
double ChunkLossAndGrad(const PolicyParams& p, const MatX& z0, const MatX& u,
                        const VecX& w, PolicyGradients* g) {
  ForwardCache cache;
  MatX out = ForwardPass(p, z0, &cache);
  MatX err = out - u;
  double loss = (err.array().square().rowwise().sum() * w.array()).sum();
  if (!g) return loss;

  // dL/dout = 2 w_i err; chain through the output squash.
  MatX dout = 2.0 * (err.array().colwise() * w.array()).matrix();
  MatX da4 = (dout.array() * (p.out_hi - p.out_lo) * cache.s4.array() *
              (1.0 - cache.s4.array()))
                 .matrix();
  g->w4 = da4.transpose() * cache.h3;
  g->b4 = da4.colwise().sum();
  MatX dh3 = da4 * p.w4;
  MatX da3 = (dh3.array() * SigmoidArr(cache.a3).array()).matrix();
  g->w3 = da3.transpose() * cache.h2;
  g->b3 = da3.colwise().sum();
  MatX dh2 = da3 * p.w3;
  MatX da2 = (dh2.array() * SigmoidArr(cache.a2).array()).matrix();
  g->w2 = da2.transpose() * cache.h1;
  g->b2 = da2.colwise().sum();
  MatX dh1 = da2 * p.w2;
  MatX da1 = (dh1.array() * SigmoidArr(cache.a1).array()).matrix();
  g->w1 = da1.transpose() * cache.z0;
  g->b1 = da1.colwise().sum();
  return loss;
}

void ZeroLike(const PolicyParams& p, PolicyGradients* g) {
  g->w1 = MatX::Zero(p.w1.rows(), p.w1.cols());
  g->w2 = MatX::Zero(p.w2.rows(), p.w2.cols());
  g->w3 = MatX::Zero(p.w3.rows(), p.w3.cols());
  g->w4 = MatX::Zero(p.w4.rows(), p.w4.cols());
  g->b1 = VecX::Zero(p.b1.size());
  g->b2 = VecX::Zero(p.b2.size());
  g->b3 = VecX::Zero(p.b3.size());
  g->b4 = VecX::Zero(p.b4.size());
}

}  // namespace

double PolicyLossAndGradient(const PolicyParams& params, const TrainingSet& d,
                             PolicyGradients* grads, int workers) {
  int n = d.size();
  if (n == 0) throw Error(ErrorCategory::kConfig, "empty training set");
  MatX z0 = Standardize(params, d.observations);
  double wsum = d.weights.sum();
  double norm = 1.0 / (wsum * kNumCables);

  int chunks = std::max(1, std::min(workers, (n + 255) / 256));
  std::vector<double> losses(chunks, 0.0);
  std::vector<PolicyGradients> partial(grads ? chunks : 0);
  int rows_per = (n + chunks - 1) / chunks;
  ParallelFor(chunks, workers, [&](int ci) {
    int r0 = ci * rows_per;
    int r1 = std::min(n, r0 + rows_per);
    if (r0 >= r1) return;
    losses[ci] = ChunkLossAndGrad(
        params, z0.middleRows(r0, r1 - r0), d.actions.middleRows(r0, r1 - r0),
        d.weights.segment(r0, r1 - r0), grads ? &partial[ci] : nullptr);
  });
  double loss = 0.0;
  for (double l : losses) loss += l;
  loss *= norm;
  if (grads) {
    ZeroLike(params, grads);
    for (int ci = 0; ci < chunks; ++ci) {
      if (partial[ci].w1.size() == 0) continue;
      grads->w1 += partial[ci].w1;
      grads->w2 += partial[ci].w2;
      grads->w3 += partial[ci].w3;
      grads->w4 += partial[ci].w4;
      grads->b1 += partial[ci].b1;
      grads->b2 += partial[ci].b2;
      grads->b3 += partial[ci].b3;
      grads->b4 += partial[ci].b4;
    }
    grads->w1 *= norm;
    grads->w2 *= norm;
    grads->w3 *= norm;
    grads->w4 *= norm;
    grads->b1 *= norm;
    grads->b2 *= norm;
    grads->b3 *= norm;
    grads->b4 *= norm;
  }
  return loss;
}

TrainReport TrainPolicy(PolicyParams& params, const TrainingSet& d,
                        const TrainOptions& options) {
  if (d.size() == 0) {
    throw Error(ErrorCategory::kConfig, "cannot train on an empty set");
  }
  // Refresh standardization statistics from the current set.
  VecX mean = d.observations.colwise().mean();
  VecX var = (d.observations.rowwise() - mean.transpose())
                 .array()
                 .square()
                 .colwise()
                 .mean();
  params.input_mean = mean;
  params.input_std = var.array().sqrt().max(1e-6);

  TrainReport report;
  PolicyGradients grads;
  PolicyGradients vel;
  ZeroLike(params, &vel);
  double lr = options.learning_rate;
  double loss = PolicyLossAndGradient(params, d, &grads, options.workers);
  report.initial_loss = loss;
  report.loss_history.push_back(loss);

  PolicyParams best = params;
  double best_loss = loss;

  auto apply = [&](double sign) {
    params.w1 += sign * vel.w1;
    params.w2 += sign * vel.w2;
    params.w3 += sign * vel.w3;
    params.w4 += sign * vel.w4;
    params.b1 += sign * vel.b1;
    params.b2 += sign * vel.b2;
    params.b3 += sign * vel.b3;
    params.b4 += sign * vel.b4;
  };

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    vel.w1 = options.momentum * vel.w1 - lr * grads.w1;
    vel.w2 = options.momentum * vel.w2 - lr * grads.w2;
    vel.w3 = options.momentum * vel.w3 - lr * grads.w3;
    vel.w4 = options.momentum * vel.w4 - lr * grads.w4;
    vel.b1 = options.momentum * vel.b1 - lr * grads.b1;
    vel.b2 = options.momentum * vel.b2 - lr * grads.b2;
    vel.b3 = options.momentum * vel.b3 - lr * grads.b3;
    vel.b4 = options.momentum * vel.b4 - lr * grads.b4;
    apply(+1.0);
    PolicyGradients new_grads;
    double new_loss = PolicyLossAndGradient(params, d, &new_grads, options.workers);
    if (new_loss > loss * 1.0001 + 1e-300) {
      // Reject the step: halve the rate and restart the momentum.
      apply(-1.0);
      ZeroLike(params, &vel);
      lr *= 0.5;
      report.loss_history.push_back(loss);
      continue;
    }
    loss = new_loss;
    grads = std::move(new_grads);
    lr *= 1.02;  // gentle growth while descending
    report.loss_history.push_back(loss);
    if (loss < best_loss) {
      best_loss = loss;
      best = params;
    }
  }
  if (best_loss < loss) params = best;
  report.final_loss = std::min(best_loss, loss);
  return report;
}

}  // namespace t6gps

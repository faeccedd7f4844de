// Copyright 2026 The ttfs-engine Authors. All Rights Reserved.
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

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "ttfs/graph.hpp"

namespace ttfs {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Eigen::ArrayXd> m, v;  // aligned with the parameter slots
  std::int64_t step = 0;

  void init(const std::vector<ParamSlot>& params);
};

/// One Adam update with decoupled weight decay. Decay touches only slots
/// flagged for it (conv/dense kernels); nonnegative slots (delays) are
/// projected to >= 0 afterwards. Non-trainable slots are untouched.
void adam_step(std::vector<ParamSlot>& params,
               const std::vector<Eigen::ArrayXd>& grads, AdamState& state,
               double lr, double weight_decay, const AdamConfig& cfg = {});

/// lr0 * 0.5 * (1 + cos(pi * epoch / total)). Throws on epoch outside
/// [0, total).
double cosine_lr(int epoch, int total_epochs, double lr0);

/// Scales grads in place so their global L2 norm is at most max_norm
/// (trainable slots only). No-op when max_norm <= 0. Returns the pre-clip
/// norm.
double clip_global_norm(const std::vector<ParamSlot>& params,
                        std::vector<Eigen::ArrayXd>& grads, double max_norm);

}  // namespace ttfs

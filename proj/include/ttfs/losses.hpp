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

#include <utility>
#include <vector>

#include "ttfs/graph.hpp"
#include "ttfs/time_tensor.hpp"

namespace ttfs {

struct LossBreakdown {
  double ce = 0.0;
  double weight_penalty = 0.0;
  double overlap = 0.0;
  double total = 0.0;
  double lambda1 = 1.0;
  double lambda2 = 1e-6;
  int dead_overlap_branches = 0;
};

/// Softmax cross-entropy over negated spike times for one output vector.
/// Sentinels are clamped to the horizon so dead output neurons stay in the
/// softmax but receive no timing gradient.
double loss_ce(const Eigen::ArrayXd& out_times, int label);

/// Earliest output spike wins; ties go to the lowest class index.
int predicted_class(Eigen::Map<const Eigen::ArrayXd> out_times);

/// Hinge penalty over temporal-layer weight rows: sum of max(0, 1 - sum_j w)
/// per output neuron (one row per conv filter / dense unit). Encoder
/// parameters are excluded.
double loss_weight(const Graph& g);

/// Squared gap of finite-entry means per (conv branch, skip branch) pair. A
/// branch with no finite entries contributes 0 and bumps *dead_branches.
double loss_overlap(
    const std::vector<std::pair<const TimeTensor*, const TimeTensor*>>& pairs,
    int* dead_branches = nullptr);

LossBreakdown total_loss(double ce, double weight_penalty, double overlap,
                         double lambda1, double lambda2);

/// Evaluates all three terms on the workspace's forward results (batch-mean
/// cross-entropy). With seed_grads, fills ws.grads at the output node and
/// every tapped branch node and adds the hinge subgradient directly into
/// ws.param_grads, ready for Graph::backward; zero_grads must run first.
LossBreakdown apply_losses(Graph& g, Workspace& ws,
                           const std::vector<int>& labels, double lambda1,
                           double lambda2, bool seed_grads);

}  // namespace ttfs

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

#include "ttfs/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace ttfs {

void AdamState::init(const std::vector<ParamSlot>& params) {
  m.resize(params.size());
  v.resize(params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    m[i] = Eigen::ArrayXd::Zero(params[i].count());
    v[i] = Eigen::ArrayXd::Zero(params[i].count());
  }
  step = 0;
}

void adam_step(std::vector<ParamSlot>& params,
               const std::vector<Eigen::ArrayXd>& grads, AdamState& state,
               double lr, double weight_decay, const AdamConfig& cfg) {
  if (state.m.size() != params.size())
    throw std::logic_error("optimizer state not initialized for this model");
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    ParamSlot& p = params[i];
    if (!p.trainable) continue;
    const Eigen::ArrayXd& g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g.square();
    p.value -= lr * (state.m[i] / bc1) /
               ((state.v[i] / bc2).sqrt() + cfg.eps);
    if (p.decay && weight_decay != 0.0) p.value -= lr * weight_decay * p.value;
    if (p.nonneg) p.value = p.value.max(0.0);
  }
}

double cosine_lr(int epoch, int total_epochs, double lr0) {
  if (epoch < 0 || epoch >= total_epochs)
    throw std::out_of_range("epoch outside the schedule");
  return lr0 * 0.5 *
         (1.0 + std::cos(M_PI * static_cast<double>(epoch) /
                         static_cast<double>(total_epochs)));
}

double clip_global_norm(const std::vector<ParamSlot>& params,
                        std::vector<Eigen::ArrayXd>& grads, double max_norm) {
  double sq = 0.0;
  for (size_t i = 0; i < params.size(); ++i)
    if (params[i].trainable) sq += grads[i].square().sum();
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (size_t i = 0; i < params.size(); ++i)
      if (params[i].trainable) grads[i] *= scale;
  }
  return norm;
}

}  // namespace ttfs

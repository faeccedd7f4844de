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

#include "ttfs/temporal.hpp"

#include <algorithm>
#include <cmath>

namespace ttfs {

double z_of_time(double t) {
  if (std::isnan(t) || t < 0.0) {
    throw std::domain_error("z_of_time: time must be >= 0");
  }
  if (t >= kSpikeHorizon) return kZMax;
  return std::exp(t);
}

double time_of_z(double z) {
  if (std::isnan(z) || z < 1.0) {
    throw std::domain_error("time_of_z: z must be >= 1");
  }
  if (z >= kZMax) return kNoSpike;
  return std::log(z);
}

SpikeSolve solve_spike_time(std::span<const SynapseInput> inputs) {
  SpikeSolve out;
  out.z_out = kZMax;
  out.denom = 0.0;
  out.causal_mask.assign(inputs.size(), 0);

  // Sorted order over inputs below the sentinel; ties keep input order.
  std::vector<std::uint32_t> order;
  order.reserve(inputs.size());
  for (std::uint32_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].z < kZMax) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return inputs[a].z < inputs[b].z;
                   });

  double sum_w = 0.0;
  double sum_wz = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const SynapseInput& in = inputs[order[k]];
    sum_w += in.w;
    sum_wz += in.w * in.z;
    const double denom = sum_w - 1.0;
    if (denom <= kDenomEps) continue;
    const double z_next =
        (k + 1 < order.size()) ? inputs[order[k + 1]].z : kZMax;
    // Candidate acceptance without the division: z_cand = sum_wz / denom
    // lies in [z_k, z_next) iff sum_wz >= z_k * denom and < z_next * denom.
    if (sum_wz >= in.z * denom && sum_wz < z_next * denom) {
      out.z_out = sum_wz / denom;
      out.denom = denom;
      for (std::size_t j = 0; j <= k; ++j) out.causal_mask[order[j]] = 1;
      return out;
    }
  }
  return out;
}

void spike_time_grad(const SpikeSolve& solve,
                     std::span<const SynapseInput> inputs, double upstream,
                     std::span<double> dz, std::span<double> dw) {
  if (solve.causal_mask.size() != inputs.size() ||
      dz.size() != inputs.size() || dw.size() != inputs.size()) {
    throw std::logic_error("spike_time_grad: mismatched lengths");
  }
  std::fill(dz.begin(), dz.end(), 0.0);
  std::fill(dw.begin(), dw.end(), 0.0);
  if (!solve.fired()) return;
  const double scale = upstream / solve.denom;
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    if (!solve.causal_mask[j]) continue;
    dz[j] = inputs[j].w * scale;
    dw[j] = (inputs[j].z - solve.z_out) * scale;
  }
}

double membrane_oracle(std::span<const TimedSynapse> inputs, double dt,
                       double t_max) {
  if (dt <= 0.0) throw std::domain_error("membrane_oracle: dt must be > 0");
  const long n_steps = static_cast<long>(t_max / dt);
  for (long s = 0; s <= n_steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    double v = 0.0;
    for (const TimedSynapse& in : inputs) {
      if (t >= in.t) v += in.w * (1.0 - std::exp(-(t - in.t)));
    }
    if (v >= 1.0) return t;
  }
  return kNoSpike;
}

}  // namespace ttfs

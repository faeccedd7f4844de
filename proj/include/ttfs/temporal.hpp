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
#include <span>
#include <vector>

#include "ttfs/common.hpp"

namespace ttfs {

/// One synapse seen by a non-leaky integrate-and-fire neuron, in the
/// z-domain (z = exp(t), so z >= 1 for t >= 0).
struct SynapseInput {
  double z = 1.0;
  double w = 0.0;
};

/// Same synapse in the time domain; used by the integration oracle.
struct TimedSynapse {
  double t = 0.0;
  double w = 0.0;
};

/// Result of solving the threshold equation for one neuron.
///
/// A non-firing neuron carries z_out == kZMax, denom == 0 and an all-false
/// causal mask. A firing neuron satisfies z_out < kZMax, denom > 0, and the
/// causal mask marks exactly the inputs that arrive strictly before the
/// output spike (boundary ties go to the non-causal side).
struct SpikeSolve {
  double z_out = 0.0;
  double denom = 0.0;
  std::vector<std::uint8_t> causal_mask;

  bool fired() const { return denom > 0.0; }
};

/// exp(t) clamped to the z sentinel. t must be >= 0 (or +inf).
double z_of_time(double t);

/// ln(z) with the sentinel mapped back to +inf. z must be >= 1.
double time_of_z(double z);

/// Solves for the first threshold crossing of a non-leaky IF neuron whose
/// membrane integrates exponentially decaying synaptic currents.
///
/// Inputs are scanned in ascending z order (stable on ties). The first
/// prefix whose weight sum exceeds 1 + kDenomEps and whose closed-form
/// candidate lands inside [z_k, z_{k+1}) is the causal set. Inputs at or
/// beyond the sentinel never enter the causal prefix, and a candidate at or
/// beyond the sentinel is a non-spike: the crossing would happen after the
/// horizon.
SpikeSolve solve_spike_time(std::span<const SynapseInput> inputs);

/// Analytic gradients of z_out with respect to each input z and w, scaled
/// by `upstream`. Non-causal inputs and non-firing solves get zeros.
/// `solve` must come from solve_spike_time on the same inputs.
void spike_time_grad(const SpikeSolve& solve,
                     std::span<const SynapseInput> inputs, double upstream,
                     std::span<double> dz, std::span<double> dw);

/// Test oracle: march the membrane potential on a uniform time grid and
/// return the first grid point where it reaches threshold, or +inf if it
/// never does before t_max. Independent of the closed-form path.
double membrane_oracle(std::span<const TimedSynapse> inputs, double dt,
                       double t_max = 20.0);

}  // namespace ttfs

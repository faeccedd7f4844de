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

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "ttfs/graph.hpp"
#include "ttfs/losses.hpp"
#include "ttfs/rng.hpp"

namespace ttfs {

namespace {

struct Probe {
  double loss = 0.0;
  std::uint64_t fingerprint = 0;
};

Probe probe_loss(Graph& g, const TimeTensor& input,
                 const std::vector<int>& labels, double lambda1,
                 double lambda2, Workspace& ws, int workers) {
  g.forward(input, /*training=*/true, /*record_tape=*/true, ws, workers);
  Probe p;
  p.loss = apply_losses(g, ws, labels, lambda1, lambda2,
                        /*seed_grads=*/false)
               .total;
  p.fingerprint = g.selection_fingerprint(ws);
  return p;
}

}  // namespace

GradCheckReport finite_diff_check(Graph& g, const TimeTensor& input,
                                  const std::vector<int>& labels,
                                  double lambda1, double lambda2, double eps,
                                  int n_params, std::uint64_t seed,
                                  int workers) {
  if (eps <= 0.0) throw ConfigError("finite-difference step must be positive");
  if (n_params <= 0) throw ConfigError("need at least one probed parameter");

  // Batch-norm running stats are updated by every training-mode forward but
  // never read by it; freeze them so the check leaves the model untouched.
  std::vector<std::pair<size_t, Eigen::ArrayXd>> frozen;
  for (size_t s = 0; s < g.params().size(); ++s)
    if (!g.params()[s].trainable) frozen.emplace_back(s, g.params()[s].value);

  // Analytic gradients at the unperturbed point.
  Workspace ws;
  g.forward(input, true, true, ws, workers);
  g.zero_grads(ws);
  apply_losses(g, ws, labels, lambda1, lambda2, /*seed_grads=*/true);
  g.backward(ws, workers);
  const std::uint64_t fp0 = g.selection_fingerprint(ws);
  std::vector<Eigen::ArrayXd> analytic = ws.param_grads;

  // Candidate coordinates over every trainable slot, visited in a seeded
  // random order; boundary-crossing probes fall through to the next one.
  std::vector<std::pair<int, Eigen::Index>> coords;
  for (size_t s = 0; s < g.params().size(); ++s)
    if (g.params()[s].trainable)
      for (Eigen::Index i = 0; i < g.params()[s].count(); ++i)
        coords.emplace_back(static_cast<int>(s), i);
  Rng rng(seed);
  rng.shuffle(coords);

  GradCheckReport rep;
  double rel_sum = 0.0;
  for (const auto& [slot_id, idx] : coords) {
    if (rep.evaluated >= n_params) break;
    ParamSlot& slot = g.params()[static_cast<size_t>(slot_id)];
    const double v0 = slot.value[idx];
    if (slot.nonneg && v0 - eps < 0.0) {
      ++rep.skipped_boundary;
      continue;
    }
    slot.value[idx] = v0 + eps;
    const Probe hi = probe_loss(g, input, labels, lambda1, lambda2, ws,
                                workers);
    slot.value[idx] = v0 - eps;
    const Probe lo = probe_loss(g, input, labels, lambda1, lambda2, ws,
                                workers);
    slot.value[idx] = v0;
    if (hi.fingerprint != fp0 || lo.fingerprint != fp0) {
      ++rep.skipped_boundary;
      continue;
    }
    const double fd = (hi.loss - lo.loss) / (2.0 * eps);
    const double an = analytic[static_cast<size_t>(slot_id)][idx];
    if (std::abs(fd) < 1e-10 && std::abs(an) < 1e-10) ++rep.zero_pairs;
    const double rel =
        std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
    rep.max_rel_err = std::max(rep.max_rel_err, rel);
    rel_sum += rel;
    ++rep.evaluated;
  }
  if (rep.evaluated > 0) rep.mean_rel_err = rel_sum / rep.evaluated;

  for (auto& [s, v] : frozen) g.params()[s].value = std::move(v);
  return rep;
}

}  // namespace ttfs

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

#include "ttfs/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace ttfs {

namespace {

// Clamped times and softmax over their negation, numerically stable.
void softmax_neg_times(const Eigen::ArrayXd& out_times, Eigen::ArrayXd& x,
                       Eigen::ArrayXd& p) {
  x = out_times.min(kSpikeHorizon);
  const double mn = x.minCoeff();
  p = (mn - x).exp();
  p /= p.sum();
}

}  // namespace

double loss_ce(const Eigen::ArrayXd& out_times, int label) {
  if (label < 0 || label >= out_times.size())
    throw std::out_of_range("class label out of range");
  Eigen::ArrayXd x, p;
  softmax_neg_times(out_times, x, p);
  const double mn = x.minCoeff();
  // -ln softmax(-x)_y = x_y - mn + ln sum exp(mn - x).
  return x[label] - mn + std::log((mn - x).exp().sum());
}

int predicted_class(Eigen::Map<const Eigen::ArrayXd> out_times) {
  int best = 0;
  for (Eigen::Index i = 1; i < out_times.size(); ++i)
    if (out_times[i] < out_times[best]) best = static_cast<int>(i);
  return best;
}

double loss_weight(const Graph& g) {
  double total = 0.0;
  for (int id : g.temporal_nodes()) {
    const NodeSpec& n = g.nodes()[static_cast<size_t>(id)];
    const ParamSlot& slot = g.params()[static_cast<size_t>(n.weight_slot)];
    const int window = slot.dims[1];
    for (int f = 0; f < slot.dims[0]; ++f) {
      const double s =
          slot.value.segment(static_cast<Eigen::Index>(f) * window, window)
              .sum();
      if (s < 1.0) total += 1.0 - s;
    }
  }
  return total;
}

double loss_overlap(
    const std::vector<std::pair<const TimeTensor*, const TimeTensor*>>& pairs,
    int* dead_branches) {
  double total = 0.0;
  for (const auto& [conv, skip] : pairs) {
    double sums[2] = {0.0, 0.0};
    Eigen::Index counts[2] = {0, 0};
    const TimeTensor* t[2] = {conv, skip};
    for (int k = 0; k < 2; ++k) {
      for (Eigen::Index i = 0; i < t[k]->v.size(); ++i) {
        const double v = t[k]->v[i];
        if (std::isfinite(v)) {
          sums[k] += v;
          ++counts[k];
        }
      }
    }
    if (counts[0] == 0 || counts[1] == 0) {
      if (dead_branches) ++*dead_branches;
      continue;
    }
    const double gap = sums[0] / static_cast<double>(counts[0]) -
                       sums[1] / static_cast<double>(counts[1]);
    total += gap * gap;
  }
  return total;
}

LossBreakdown total_loss(double ce, double weight_penalty, double overlap,
                         double lambda1, double lambda2) {
  LossBreakdown b;
  b.ce = ce;
  b.weight_penalty = weight_penalty;
  b.overlap = overlap;
  b.lambda1 = lambda1;
  b.lambda2 = lambda2;
  b.total = ce + lambda1 * weight_penalty + lambda2 * overlap;
  return b;
}

LossBreakdown apply_losses(Graph& g, Workspace& ws,
                           const std::vector<int>& labels, double lambda1,
                           double lambda2, bool seed_grads) {
  const int out_id = g.output_node();
  const TimeTensor& out = ws.acts[static_cast<size_t>(out_id)];
  const int batch = out.batch();
  if (static_cast<int>(labels.size()) != batch)
    throw ConfigError("label count does not match the batch");

  // Batch-mean cross-entropy with gradient into the output node.
  double ce = 0.0;
  Eigen::ArrayXd x, p;
  for (int b = 0; b < batch; ++b) {
    const Eigen::ArrayXd o = out.sample(b);
    const int y = labels[static_cast<size_t>(b)];
    if (y < 0 || y >= o.size())
      throw std::out_of_range("class label out of range");
    softmax_neg_times(o, x, p);
    const double mn = x.minCoeff();
    ce += x[y] - mn + std::log((mn - x).exp().sum());
    if (seed_grads) {
      // Logits are negated times, so dL/dx_i = [i == y] - p_i; dx/dt is 1
      // only for finite times below the horizon (clamped sentinels get no
      // timing gradient).
      Eigen::ArrayXd dx = -p;
      dx[y] += 1.0;
      auto gs = ws.grads[static_cast<size_t>(out_id)].sample(b);
      for (Eigen::Index i = 0; i < o.size(); ++i)
        if (o[i] < kSpikeHorizon)
          gs[i] += dx[i] / static_cast<double>(batch);
    }
  }
  ce /= static_cast<double>(batch);

  const double wp = loss_weight(g);
  if (seed_grads && lambda1 != 0.0) {
    for (int id : g.temporal_nodes()) {
      const NodeSpec& n = g.nodes()[static_cast<size_t>(id)];
      const ParamSlot& slot = g.params()[static_cast<size_t>(n.weight_slot)];
      Eigen::ArrayXd& grad =
          ws.param_grads[static_cast<size_t>(n.weight_slot)];
      const int window = slot.dims[1];
      for (int f = 0; f < slot.dims[0]; ++f) {
        const Eigen::Index off = static_cast<Eigen::Index>(f) * window;
        if (slot.value.segment(off, window).sum() < 1.0)
          grad.segment(off, window) -= lambda1;
      }
    }
  }

  int dead = 0;
  double ov = 0.0;
  for (const OverlapTap& tap : g.overlap_taps()) {
    const TimeTensor& conv = ws.acts[static_cast<size_t>(tap.conv_node)];
    const TimeTensor& skip = ws.acts[static_cast<size_t>(tap.skip_node)];
    ov += loss_overlap({{&conv, &skip}}, &dead);
    if (!seed_grads || lambda2 == 0.0) continue;
    double sums[2] = {0.0, 0.0};
    Eigen::Index counts[2] = {0, 0};
    const TimeTensor* t[2] = {&conv, &skip};
    for (int k = 0; k < 2; ++k)
      for (Eigen::Index i = 0; i < t[k]->v.size(); ++i)
        if (std::isfinite(t[k]->v[i])) {
          sums[k] += t[k]->v[i];
          ++counts[k];
        }
    if (counts[0] == 0 || counts[1] == 0) continue;
    const double gap = sums[0] / static_cast<double>(counts[0]) -
                       sums[1] / static_cast<double>(counts[1]);
    const int node[2] = {tap.conv_node, tap.skip_node};
    const double coef[2] = {
        lambda2 * 2.0 * gap / static_cast<double>(counts[0]),
        -lambda2 * 2.0 * gap / static_cast<double>(counts[1])};
    for (int k = 0; k < 2; ++k) {
      Eigen::ArrayXd& gv = ws.grads[static_cast<size_t>(node[k])].v;
      for (Eigen::Index i = 0; i < t[k]->v.size(); ++i)
        if (std::isfinite(t[k]->v[i])) gv[i] += coef[k];
    }
  }

  LossBreakdown b = total_loss(ce, wp, ov, lambda1, lambda2);
  b.dead_overlap_branches = dead;
  return b;
}

}  // namespace ttfs

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
#include <iosfwd>
#include <string>
#include <vector>

#include "ttfs/dataset.hpp"
#include "ttfs/graph.hpp"
#include "ttfs/optimizer.hpp"

namespace ttfs {

struct TrainConfig {
  int epochs = 100;
  int batch_size = 128;
  double lr0 = 6e-4;
  double weight_decay = 1e-3;
  double lambda1 = 1.0;
  double lambda2 = 1e-6;
  std::uint64_t seed = 1;
  double grad_clip = 5.0;  // global L2 cap; 0 disables
  int lr_horizon = 0;      // cosine horizon in epochs; 0 = epochs. A horizon
                           // beyond epochs stops the run partway down the
                           // schedule (staged runs resume with a new one).
  int workers = 0;         // 0 = all hardware threads

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double lr = 0.0;
  double loss_total = 0.0, loss_ce = 0.0, loss_weight = 0.0,
         loss_overlap = 0.0;
  double train_acc = 0.0;  // percent
  double test_acc = 0.0;   // percent
  double latency = 0.0;    // mean earliest output spike on the test set
};

struct EvalStats {
  double accuracy = 0.0;  // percent
  double latency = 0.0;
  double no_spike_fraction = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> history;
};

/// Accuracy / latency of a model on a dataset (eval-mode forward). Samples
/// whose output layer stays silent are excluded from the latency mean and
/// reported as a fraction.
EvalStats evaluate(Graph& g, const Dataset& ds, int batch_size, int workers);

/// Full training loop: seeded shuffling, cosine schedule, Adam with
/// decoupled decay, delay projection, per-epoch test evaluation. Writes one
/// history CSV row per epoch when history_csv is non-empty; identical seeds
/// produce identical histories. opt_state, when given, is left holding the
/// final optimizer state (for checkpointing).
TrainResult train_model(Graph& g, const Dataset& train, const Dataset& test,
                        const TrainConfig& cfg,
                        const std::string& history_csv = "",
                        std::ostream* log = nullptr,
                        AdamState* opt_state = nullptr);

std::string history_csv_header();
std::string history_csv_row(const EpochStats& s);

}  // namespace ttfs

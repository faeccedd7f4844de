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

#include <string>
#include <vector>

#include "ttfs/dataset.hpp"
#include "ttfs/graph.hpp"

namespace ttfs {

/// Per-operation energy constants (45nm CMOS): multiply-accumulate vs
/// accumulate-only.
inline constexpr double kEMacPj = 4.6;
inline constexpr double kEAcPj = 0.9;

struct RunReport {
  double accuracy = 0.0;          // percent
  double latency = 0.0;           // mean earliest output spike, time units
  double no_spike_fraction = 0.0; // samples whose output layer stays silent
  std::vector<std::string> layer_names;  // "enc" + temporal layers, in order
  std::vector<double> spike_rate;        // percent; encoder pinned to 100
  std::vector<double> flops;
  double e_ann_pj = 0.0;
  double e_snn_pj = 0.0;
  double energy_ratio = 0.0;

  std::string to_json() const;
};

struct EnergyEstimate {
  double e_ann_pj = 0.0;
  double e_snn_pj = 0.0;
  double ratio = 0.0;
};

/// Pure event-driven energy model over aligned per-layer FLOPs and firing
/// rates (rates in [0,1]): E_ANN = sum(f)*4.6pJ, E_SNN = sum(f*r)*0.9pJ.
EnergyEstimate estimate_energy(const std::vector<double>& flops,
                               const std::vector<double>& rates);

/// Per-layer multiply work: 2*k^2*C_in*C_out*H_out*W_out for convs,
/// 2*F_in*F_out for the head; pooling/split/shuffle/delay cost 0 and are
/// omitted. Order: encoder first, then each temporal layer.
std::vector<double> count_flops(const Graph& g);
std::vector<std::string> flops_layer_names(const Graph& g);

/// Accuracy, latency, early-exit spike rates, and the energy estimate for a
/// model over a dataset. The encoder is real-valued and runs in full in
/// both regimes, so it enters E_ANN and E_SNN alike at MAC cost; temporal
/// layers enter E_SNN at accumulate cost scaled by their measured rate. A
/// neuron counts as fired iff its spike time is strictly below the sample's
/// earliest output spike (early exit); silent-output samples exit at the
/// horizonless limit, so every finite spike counts there.
RunReport evaluate_report(Graph& g, const Dataset& ds, int batch_size,
                          int workers);

/// Spike-timing histograms over [0, horizon] for every temporal layer and
/// every skip-block branch (conv / skip / merged), written as one CSV:
/// layer,branch,bin_left,bin_right,count,sentinels — `sentinels` repeats the
/// branch's total silent-neuron count on each of its rows.
void export_timing_histograms(Graph& g, const Dataset& ds, int bins,
                              const std::string& csv_path, int batch_size,
                              int workers);

struct BranchGap {
  std::string block;
  double conv_mean = 0.0;
  double skip_mean = 0.0;
  double gap = 0.0;  // |conv_mean - skip_mean|
};

/// Mean finite spike time per branch of every skip block, over the dataset.
std::vector<BranchGap> branch_mean_gaps(Graph& g, const Dataset& ds,
                                        int batch_size, int workers);

}  // namespace ttfs

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

#include "ttfs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ttfs/losses.hpp"

namespace ttfs {

EnergyEstimate estimate_energy(const std::vector<double>& flops,
                               const std::vector<double>& rates) {
  if (flops.size() != rates.size())
    throw ConfigError("energy estimate: flops/rates length mismatch");
  EnergyEstimate e;
  for (size_t i = 0; i < flops.size(); ++i) {
    if (rates[i] < 0.0 || rates[i] > 1.0)
      throw ConfigError("energy estimate: rate outside [0,1]");
    e.e_ann_pj += flops[i] * kEMacPj;
    e.e_snn_pj += flops[i] * rates[i] * kEAcPj;
  }
  e.ratio = e.e_ann_pj > 0.0 ? e.e_snn_pj / e.e_ann_pj : 0.0;
  return e;
}

std::vector<double> count_flops(const Graph& g) {
  std::vector<double> flops;
  const NodeSpec& enc = g.nodes()[static_cast<size_t>(g.encoder_node())];
  flops.push_back(2.0 * enc.conv.window() * enc.conv.out_c *
                  enc.conv.out_locs());
  for (int id : g.temporal_nodes()) {
    const NodeSpec& n = g.nodes()[static_cast<size_t>(id)];
    flops.push_back(2.0 * n.conv.window() * n.conv.out_c * n.conv.out_locs());
  }
  return flops;
}

std::vector<std::string> flops_layer_names(const Graph& g) {
  std::vector<std::string> names{"enc"};
  for (int id : g.temporal_nodes())
    names.push_back(g.nodes()[static_cast<size_t>(id)].name);
  return names;
}

RunReport evaluate_report(Graph& g, const Dataset& ds, int batch_size,
                          int workers) {
  RunReport r;
  r.layer_names = flops_layer_names(g);
  r.flops = count_flops(g);
  const auto& tl = g.temporal_nodes();
  std::vector<double> fired(tl.size(), 0.0);

  Workspace ws;
  TimeTensor batch;
  int correct = 0, silent = 0;
  double latency_sum = 0.0;
  for (int begin = 0; begin < ds.n(); begin += batch_size) {
    const int end = std::min(ds.n(), begin + batch_size);
    const int bsz = end - begin;
    std::vector<int> dims = ds.images.dims;
    dims[0] = bsz;
    batch.reshape(dims);
    std::vector<int> labels(static_cast<size_t>(bsz));
    for (int i = 0; i < bsz; ++i) {
      batch.sample(i) = ds.images.sample(begin + i);
      labels[static_cast<size_t>(i)] =
          ds.labels[static_cast<size_t>(begin + i)];
    }
    g.forward(batch, /*training=*/false, /*record_tape=*/false, ws, workers);
    const TimeTensor& out = ws.acts[static_cast<size_t>(g.output_node())];
    for (int b = 0; b < bsz; ++b) {
      const auto o = out.sample(b);
      if (predicted_class(o) == labels[static_cast<size_t>(b)]) ++correct;
      const double t_exit = o.minCoeff();
      if (std::isfinite(t_exit))
        latency_sum += t_exit;
      else
        ++silent;
      for (size_t li = 0; li < tl.size(); ++li) {
        const auto layer = ws.acts[static_cast<size_t>(tl[li])].sample(b);
        fired[li] += static_cast<double>((layer < t_exit).count()) /
                     static_cast<double>(layer.size());
      }
    }
  }

  const int n = ds.n();
  r.accuracy = n > 0 ? 100.0 * correct / n : 0.0;
  r.no_spike_fraction = n > 0 ? static_cast<double>(silent) / n : 0.0;
  r.latency = (n - silent) > 0 ? latency_sum / (n - silent) : kNoSpike;

  r.spike_rate.assign(r.flops.size(), 0.0);
  r.spike_rate[0] = 100.0;  // encoder: real-valued, always fully active
  std::vector<double> rates01(r.flops.size(), 1.0);
  for (size_t li = 0; li < tl.size(); ++li) {
    const double rate = n > 0 ? fired[li] / n : 0.0;
    r.spike_rate[li + 1] = 100.0 * rate;
    rates01[li + 1] = rate;
  }

  // Encoder runs at full MAC cost in both regimes; temporal layers pay
  // accumulate cost per actually-fired neuron.
  r.e_ann_pj = 0.0;
  r.e_snn_pj = r.flops[0] * kEMacPj;
  for (size_t i = 0; i < r.flops.size(); ++i) r.e_ann_pj += r.flops[i] * kEMacPj;
  for (size_t i = 1; i < r.flops.size(); ++i)
    r.e_snn_pj += r.flops[i] * rates01[i] * kEAcPj;
  r.energy_ratio = r.e_ann_pj > 0.0 ? r.e_snn_pj / r.e_ann_pj : 0.0;
  return r;
}

std::string RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["accuracy"] = accuracy;
  j["latency"] = std::isfinite(latency) ? latency : -1.0;
  j["no_spike_fraction"] = no_spike_fraction;
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (size_t i = 0; i < layer_names.size(); ++i) {
    nlohmann::ordered_json l;
    l["name"] = layer_names[i];
    l["flops"] = flops[i];
    l["spike_rate"] = spike_rate[i];
    layers.push_back(l);
  }
  j["layers"] = layers;
  j["e_ann_pj"] = e_ann_pj;
  j["e_snn_pj"] = e_snn_pj;
  j["energy_ratio"] = energy_ratio;
  return j.dump();
}

namespace {

struct Hist {
  std::vector<std::int64_t> counts;
  std::int64_t sentinels = 0;
  double sum = 0.0;
  std::int64_t finite = 0;

  void add(double t, int bins, double hi) {
    if (!std::isfinite(t)) {
      ++sentinels;
      return;
    }
    ++finite;
    sum += t;
    int b = static_cast<int>(t / hi * bins);
    b = std::clamp(b, 0, bins - 1);
    ++counts[static_cast<size_t>(b)];
  }
};

}  // namespace

void export_timing_histograms(Graph& g, const Dataset& ds, int bins,
                              const std::string& csv_path, int batch_size,
                              int workers) {
  if (bins <= 0) throw ConfigError("histogram bins must be positive");
  const double hi = kSpikeHorizon;
  const auto& tl = g.temporal_nodes();
  const auto& taps = g.overlap_taps();

  std::vector<std::pair<std::string, int>> series;  // (label, node id)
  for (int id : tl)
    series.push_back({g.nodes()[static_cast<size_t>(id)].name + ",all", id});
  for (const auto& tap : taps) {
    series.push_back({tap.block + ",conv", tap.conv_node});
    series.push_back({tap.block + ",skip", tap.skip_node});
    series.push_back({tap.block + ",merged", tap.merge_node});
  }
  std::vector<Hist> hists(series.size());
  for (auto& h : hists) h.counts.assign(static_cast<size_t>(bins), 0);

  Workspace ws;
  TimeTensor batch;
  for (int begin = 0; begin < ds.n(); begin += batch_size) {
    const int end = std::min(ds.n(), begin + batch_size);
    const int bsz = end - begin;
    std::vector<int> dims = ds.images.dims;
    dims[0] = bsz;
    batch.reshape(dims);
    for (int i = 0; i < bsz; ++i) batch.sample(i) = ds.images.sample(begin + i);
    g.forward(batch, false, false, ws, workers);
    for (size_t si = 0; si < series.size(); ++si) {
      const TimeTensor& t = ws.acts[static_cast<size_t>(series[si].second)];
      for (Eigen::Index i = 0; i < t.v.size(); ++i)
        hists[si].add(t.v[i], bins, hi);
    }
  }

  std::ofstream f(csv_path, std::ios::trunc);
  if (!f) throw IoError("cannot write " + csv_path);
  f << "layer,branch,bin_left,bin_right,count,sentinels\n";
  f.precision(10);
  for (size_t si = 0; si < series.size(); ++si) {
    for (int b = 0; b < bins; ++b) {
      f << series[si].first << ',' << (hi * b / bins) << ','
        << (hi * (b + 1) / bins) << ',' << hists[si].counts[static_cast<size_t>(b)]
        << ',' << hists[si].sentinels << '\n';
    }
  }
  if (!f) throw IoError("write failed on " + csv_path);
}

std::vector<BranchGap> branch_mean_gaps(Graph& g, const Dataset& ds,
                                        int batch_size, int workers) {
  const auto& taps = g.overlap_taps();
  std::vector<double> conv_sum(taps.size(), 0.0), skip_sum(taps.size(), 0.0);
  std::vector<std::int64_t> conv_n(taps.size(), 0), skip_n(taps.size(), 0);

  Workspace ws;
  TimeTensor batch;
  for (int begin = 0; begin < ds.n(); begin += batch_size) {
    const int end = std::min(ds.n(), begin + batch_size);
    const int bsz = end - begin;
    std::vector<int> dims = ds.images.dims;
    dims[0] = bsz;
    batch.reshape(dims);
    for (int i = 0; i < bsz; ++i) batch.sample(i) = ds.images.sample(begin + i);
    g.forward(batch, false, false, ws, workers);
    for (size_t ti = 0; ti < taps.size(); ++ti) {
      const TimeTensor& c = ws.acts[static_cast<size_t>(taps[ti].conv_node)];
      const TimeTensor& s = ws.acts[static_cast<size_t>(taps[ti].skip_node)];
      for (Eigen::Index i = 0; i < c.v.size(); ++i)
        if (std::isfinite(c.v[i])) {
          conv_sum[ti] += c.v[i];
          ++conv_n[ti];
        }
      for (Eigen::Index i = 0; i < s.v.size(); ++i)
        if (std::isfinite(s.v[i])) {
          skip_sum[ti] += s.v[i];
          ++skip_n[ti];
        }
    }
  }

  std::vector<BranchGap> gaps;
  for (size_t ti = 0; ti < taps.size(); ++ti) {
    BranchGap bg;
    bg.block = taps[ti].block;
    bg.conv_mean = conv_n[ti] > 0 ? conv_sum[ti] / conv_n[ti] : kNoSpike;
    bg.skip_mean = skip_n[ti] > 0 ? skip_sum[ti] / skip_n[ti] : kNoSpike;
    bg.gap = (conv_n[ti] > 0 && skip_n[ti] > 0)
                 ? std::abs(bg.conv_mean - bg.skip_mean)
                 : kNoSpike;
    gaps.push_back(bg);
  }
  return gaps;
}

}  // namespace ttfs

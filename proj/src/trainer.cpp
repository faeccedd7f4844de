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

#include "ttfs/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ttfs/losses.hpp"
#include "ttfs/rng.hpp"
#include "ttfs/threading.hpp"

namespace ttfs {

namespace {

void gather_batch(const Dataset& ds, const std::vector<int>& order, int begin,
                  int end, TimeTensor& images, std::vector<int>& labels) {
  const int bsz = end - begin;
  std::vector<int> dims = ds.images.dims;
  dims[0] = bsz;
  images.reshape(dims);
  labels.resize(static_cast<size_t>(bsz));
  for (int i = 0; i < bsz; ++i) {
    const int src = order[static_cast<size_t>(begin + i)];
    images.sample(i) = ds.images.sample(src);
    labels[static_cast<size_t>(i)] = ds.labels[static_cast<size_t>(src)];
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (lr0 <= 0.0) throw ConfigError("lr0 must be positive");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
  if (lambda1 < 0.0 || lambda2 < 0.0)
    throw ConfigError("loss weights must be >= 0");
  if (grad_clip < 0.0) throw ConfigError("grad_clip must be >= 0");
  if (lr_horizon < 0) throw ConfigError("lr_horizon must be >= 0");
  if (lr_horizon > 0 && lr_horizon < epochs)
    throw ConfigError("lr_horizon must cover the epoch count");
}

EvalStats evaluate(Graph& g, const Dataset& ds, int batch_size, int workers) {
  EvalStats st;
  if (ds.n() == 0) return st;
  Workspace ws;
  TimeTensor batch;
  std::vector<int> order(static_cast<size_t>(ds.n()));
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> labels;
  int correct = 0, silent = 0;
  double latency_sum = 0.0;
  for (int begin = 0; begin < ds.n(); begin += batch_size) {
    const int end = std::min(ds.n(), begin + batch_size);
    gather_batch(ds, order, begin, end, batch, labels);
    g.forward(batch, /*training=*/false, /*record_tape=*/false, ws, workers);
    const TimeTensor& out = ws.acts[static_cast<size_t>(g.output_node())];
    for (int b = 0; b < end - begin; ++b) {
      const auto o = out.sample(b);
      if (predicted_class(o) == labels[static_cast<size_t>(b)]) ++correct;
      const double t_exit = o.minCoeff();
      if (std::isfinite(t_exit))
        latency_sum += t_exit;
      else
        ++silent;
    }
  }
  st.accuracy = 100.0 * correct / static_cast<double>(ds.n());
  st.no_spike_fraction = static_cast<double>(silent) / ds.n();
  const int spiking = ds.n() - silent;
  st.latency = spiking > 0 ? latency_sum / spiking : kNoSpike;
  return st;
}

std::string history_csv_header() {
  return "epoch,lr,loss_total,loss_ce,loss_weight,loss_overlap,train_acc,"
         "test_acc,latency";
}

std::string history_csv_row(const EpochStats& s) {
  std::ostringstream os;
  os.precision(10);
  os << s.epoch << ',' << s.lr << ',' << s.loss_total << ',' << s.loss_ce
     << ',' << s.loss_weight << ',' << s.loss_overlap << ',' << s.train_acc
     << ',' << s.test_acc << ',' << s.latency;
  return os.str();
}

TrainResult train_model(Graph& g, const Dataset& train, const Dataset& test,
                        const TrainConfig& cfg, const std::string& history_csv,
                        std::ostream* log, AdamState* opt_state) {
  cfg.validate();
  if (train.n() == 0) throw ConfigError("empty training set");
  const int workers = cfg.workers > 0 ? cfg.workers : hardware_workers();

  AdamState local_state;
  AdamState& opt = opt_state ? *opt_state : local_state;
  if (opt.m.size() != g.params().size()) opt.init(g.params());

  std::ofstream csv;
  if (!history_csv.empty()) {
    csv.open(history_csv, std::ios::trunc);
    if (!csv) throw IoError("cannot write " + history_csv);
    csv << history_csv_header() << '\n';
  }

  Rng shuffle_rng(cfg.seed ^ 0x5DEECE66DULL);
  std::vector<int> order(static_cast<size_t>(train.n()));
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  Workspace ws;
  TimeTensor batch;
  std::vector<int> labels;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cosine_lr(
        epoch, cfg.lr_horizon > 0 ? cfg.lr_horizon : cfg.epochs, cfg.lr0);
    shuffle_rng.shuffle(order);

    double sum_total = 0.0, sum_ce = 0.0, sum_wp = 0.0, sum_ov = 0.0;
    int train_correct = 0;
    for (int begin = 0; begin < train.n(); begin += cfg.batch_size) {
      const int end = std::min(train.n(), begin + cfg.batch_size);
      const int bsz = end - begin;
      gather_batch(train, order, begin, end, batch, labels);

      g.forward(batch, /*training=*/true, /*record_tape=*/true, ws, workers);
      g.zero_grads(ws);
      const LossBreakdown lb =
          apply_losses(g, ws, labels, cfg.lambda1, cfg.lambda2, true);
      g.backward(ws, workers);
      clip_global_norm(g.params(), ws.param_grads, cfg.grad_clip);
      adam_step(g.params(), ws.param_grads, opt, lr, cfg.weight_decay);

      sum_total += lb.total * bsz;
      sum_ce += lb.ce * bsz;
      sum_wp += lb.weight_penalty * bsz;
      sum_ov += lb.overlap * bsz;
      const TimeTensor& out = ws.acts[static_cast<size_t>(g.output_node())];
      for (int b = 0; b < bsz; ++b)
        if (predicted_class(out.sample(b)) == labels[static_cast<size_t>(b)])
          ++train_correct;
    }

    const EvalStats ev = evaluate(g, test, cfg.batch_size, workers);
    EpochStats s;
    s.epoch = epoch;
    s.lr = lr;
    s.loss_total = sum_total / train.n();
    s.loss_ce = sum_ce / train.n();
    s.loss_weight = sum_wp / train.n();
    s.loss_overlap = sum_ov / train.n();
    s.train_acc = 100.0 * train_correct / static_cast<double>(train.n());
    s.test_acc = ev.accuracy;
    s.latency = ev.latency;
    result.history.push_back(s);
    if (csv.is_open()) csv << history_csv_row(s) << '\n' << std::flush;
    if (log)
      (*log) << "epoch " << epoch << " lr " << lr << " loss " << s.loss_total
             << " train_acc " << s.train_acc << " test_acc " << s.test_acc
             << " latency " << s.latency << std::endl;
  }
  return result;
}

}  // namespace ttfs

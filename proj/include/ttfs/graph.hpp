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
#include <string>
#include <vector>

#include "ttfs/layers.hpp"
#include "ttfs/model_config.hpp"
#include "ttfs/time_tensor.hpp"

namespace ttfs {

enum class NodeKind {
  kInput,
  kEncoder,
  kTemporalConv,
  kTemporalDense,
  kMinPool,
  kSplitLo,
  kSplitHi,
  kConcat,
  kShuffle,
  kAdd,
  kTile,
  kDelay,
};

struct NodeSpec {
  NodeKind kind = NodeKind::kInput;
  std::string name;
  std::vector<int> inputs;    // producer node ids
  int out_c = 0, out_h = 0, out_w = 0;

  ConvGeom conv;              // encoder / temporal conv / dense
  PoolGeom pool{};            // min pool
  int shuffle_groups = 2;
  int tile_factor = 1;
  DelayGranularity delay_gran = DelayGranularity::kChannel;

  int weight_slot = -1;       // temporal conv/dense
  int theta_slot = -1;        // delay
  int enc_w = -1, enc_b = -1, enc_gamma = -1, enc_beta = -1;
  int enc_rmean = -1, enc_rvar = -1;

  Eigen::Index out_count() const {
    return static_cast<Eigen::Index>(out_c) * out_h * out_w;
  }
};

struct ParamSlot {
  std::string name;
  std::vector<int> dims;
  bool trainable = true;
  bool decay = false;    // decoupled weight decay applies
  bool nonneg = false;   // projected to >= 0 after optimizer steps
  Eigen::ArrayXd value;

  Eigen::Index count() const { return value.size(); }
};

/// One concat-skip block's branch tensors, for the overlap loss and the
/// timing histograms: conv_node = transformed half, skip_node = pass-through
/// half (post-delay when the architecture has one), merge_node = shuffled
/// output.
struct OverlapTap {
  std::string block;
  int conv_node = -1;
  int skip_node = -1;
  int merge_node = -1;
  int theta_slot = -1;  // -1 when the block has no delay
};

struct NodeTape {
  TemporalTape temporal;
  EncoderTape encoder;
  PoolTape pool;
};

struct Workspace {
  std::vector<TimeTensor> acts;
  std::vector<TimeTensor> grads;
  std::vector<NodeTape> tapes;
  std::vector<Eigen::ArrayXd> param_grads;
  bool has_tape = false;
  int batch = 0;
};

/// Static layer DAG in topological order with a parameter store. Built from
/// a ModelConfig; executes batches forward and backward over a per-call
/// workspace so one graph can serve training and evaluation concurrently.
class Graph {
 public:
  static Graph build(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  std::vector<ParamSlot>& params() { return params_; }
  const std::vector<ParamSlot>& params() const { return params_; }
  int param_index(const std::string& name) const;
  int output_node() const { return output_node_; }
  const std::vector<OverlapTap>& overlap_taps() const { return taps_; }

  /// Temporal conv/dense node ids in depth order (the layers that carry
  /// spike rates, the weight penalty, and the FLOPs model).
  const std::vector<int>& temporal_nodes() const { return temporal_nodes_; }
  int encoder_node() const { return encoder_node_; }

  std::int64_t trainable_count() const;

  /// Runs the batch through every node. record_tape enables backward.
  /// override_node >= 0 replaces that node's computed activation with
  /// *override_value before running its consumers (used by the time-shift
  /// probes); the override node must precede all temporal layers' inputs.
  void forward(const TimeTensor& input, bool training, bool record_tape,
               Workspace& ws, int workers, int override_node = -1,
               const TimeTensor* override_value = nullptr);

  /// Consumes gradient seeds already accumulated in ws.grads (output node
  /// and any tapped branch nodes) and fills ws.param_grads.
  void backward(Workspace& ws, int workers);

  /// Sizes and zeroes ws.grads / ws.param_grads for the workspace's batch.
  void zero_grads(Workspace& ws) const;

  /// Order/selection fingerprint of a recorded forward: hashes every sort
  /// permutation, causal count, pool argmin, and encoder ReLU sign, so a
  /// finite-difference probe can detect when a perturbation crossed a
  /// non-smooth boundary.
  std::uint64_t selection_fingerprint(const Workspace& ws) const;

 private:
  ModelConfig config_;
  std::vector<NodeSpec> nodes_;
  std::vector<ParamSlot> params_;
  std::vector<OverlapTap> taps_;
  std::vector<int> temporal_nodes_;
  int encoder_node_ = -1;
  int output_node_ = -1;

  EncoderParams encoder_view() const;
  void encoder_writeback(const EncoderParams& p);
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  int evaluated = 0;
  int skipped_boundary = 0;
  int zero_pairs = 0;
};

/// Central-difference probe of d(total loss)/d(param) against the analytic
/// backward pass. Parameters whose +/-eps evaluations land on different
/// sides of a discrete selection boundary are discarded and resampled.
GradCheckReport finite_diff_check(Graph& g, const TimeTensor& input,
                                  const std::vector<int>& labels,
                                  double lambda1, double lambda2, double eps,
                                  int n_params, std::uint64_t seed,
                                  int workers);

}  // namespace ttfs

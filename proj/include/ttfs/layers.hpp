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
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ttfs/common.hpp"
#include "ttfs/model_config.hpp"
#include "ttfs/time_tensor.hpp"

namespace ttfs {

// ---------------------------------------------------------------------------
// Convolution geometry
// ---------------------------------------------------------------------------

/// Precomputed gather table for a conv layer: for every output location the
/// flat input offsets of its receptive-field window, -1 where the window
/// hangs over the zero/no-input padding ring.
struct ConvGeom {
  int in_c = 0, in_h = 0, in_w = 0;
  int out_c = 0, out_h = 0, out_w = 0;
  int kernel = 1, stride = 1, pad = 0;
  std::vector<std::int32_t> col_index;  // [out_locs * window]

  int window() const { return kernel * kernel * in_c; }
  int out_locs() const { return out_h * out_w; }

  static ConvGeom make(int in_c, int in_h, int in_w, int out_c, int kernel,
                       int stride, int pad);
};

// ---------------------------------------------------------------------------
// Temporal convolution / dense (shared kernel)
// ---------------------------------------------------------------------------

/// Forward pass bookkeeping for the spike-time scan, laid out per sample so
/// parallel workers never share cache lines.
struct TemporalTape {
  std::vector<std::uint16_t> perm;      // [B * locs * window] sorted window pos
  std::vector<std::uint16_t> n_valid;   // [B * locs]
  std::vector<std::uint16_t> k_causal;  // [B * locs * out_c]; 0 = silent
  std::vector<double> denom;            // [B * locs * out_c]
  void resize(int batch, int locs, int window, int out_c);
};

/// weight is row-major [out_c][window] with window position order
/// (in_channel, ky, kx). Output spike times in `out`; no-spike = +inf.
void temporal_conv_forward(const ConvGeom& g, const TimeTensor& in,
                           const Eigen::ArrayXd& weight, TimeTensor& out,
                           TemporalTape* tape, int workers);

/// Accumulates into din and dweight (both must be pre-sized; din zeroed by
/// caller). dweight uses slot-indexed partial buffers internally and reduces
/// them in slot order, so results are independent of the worker count.
void temporal_conv_backward(const ConvGeom& g, const TimeTensor& in,
                            const Eigen::ArrayXd& weight,
                            const TimeTensor& out, const TimeTensor& upstream,
                            const TemporalTape& tape, TimeTensor& din,
                            Eigen::ArrayXd& dweight, int workers);

/// Standalone ops over plain tensors (thin wrappers over the shared kernel).
TimeTensor temporal_conv2d(const TimeTensor& in, const Eigen::ArrayXd& weight,
                           int out_c, int kernel, int stride, int pad);
TimeTensor temporal_dense(const TimeTensor& in, const Eigen::ArrayXd& weight,
                          int out_features);

// ---------------------------------------------------------------------------
// Input encoder: real-valued conv + batch norm + ReLU, output read as times
// ---------------------------------------------------------------------------

struct EncoderParams {
  Eigen::ArrayXd w;             // [out_c][window]
  Eigen::ArrayXd b;             // [out_c]
  Eigen::ArrayXd gamma, beta;   // [out_c]
  Eigen::ArrayXd running_mean;  // [out_c]
  Eigen::ArrayXd running_var;   // [out_c]
};

struct EncoderTape {
  TimeTensor conv_out;       // pre-norm activations, needed for backward
  Eigen::ArrayXd mu, var;    // batch stats used (training mode)
  bool training = false;
};

inline constexpr double kBnEps = 1e-5;
inline constexpr double kBnMomentum = 0.1;

/// Updates running stats in-place when training.
void encoder_forward(const ConvGeom& g, const TimeTensor& image,
                     EncoderParams& p, bool training, TimeTensor& out,
                     EncoderTape* tape, int workers);

/// Gradients for a training-mode forward. din is not produced (the encoder
/// is the first layer); dw/db/dgamma/dbeta accumulate.
void encoder_backward(const ConvGeom& g, const TimeTensor& image,
                      const EncoderParams& p, const TimeTensor& upstream,
                      const EncoderTape& tape, Eigen::ArrayXd& dw,
                      Eigen::ArrayXd& db, Eigen::ArrayXd& dgamma,
                      Eigen::ArrayXd& dbeta, int workers);

/// Standalone op.
TimeTensor encode_input(const TimeTensor& image, EncoderParams& p,
                        bool training, int kernel, int stride, int pad);

// ---------------------------------------------------------------------------
// Earliest-spike pooling
// ---------------------------------------------------------------------------

struct PoolTape {
  std::vector<std::int32_t> argmin;  // [B * out_elems] flat per-sample index
};

struct PoolGeom {
  int in_c, in_h, in_w, out_h, out_w, window, stride;
  bool ceil_mode;
  static PoolGeom make(int in_c, int in_h, int in_w, int window, int stride,
                       bool ceil_mode);
};

void min_pool_forward(const PoolGeom& g, const TimeTensor& in, TimeTensor& out,
                      PoolTape* tape, int workers);
void min_pool_backward(const PoolGeom& g, const TimeTensor& upstream,
                       const PoolTape& tape, TimeTensor& din, int workers);

/// Standalone op. Ties resolve to the first window element in row-major
/// order, so pooling is reproducible everywhere.
TimeTensor min_time_pool(const TimeTensor& in, int window, int stride,
                         bool ceil_mode = false);

// ---------------------------------------------------------------------------
// Structural ops
// ---------------------------------------------------------------------------

std::pair<TimeTensor, TimeTensor> channel_split(const TimeTensor& in);
TimeTensor concat_channels(const TimeTensor& a, const TimeTensor& b);
TimeTensor channel_shuffle(const TimeTensor& in, int groups);
TimeTensor add_skip(const TimeTensor& a, const TimeTensor& b);
TimeTensor tile_channels(const TimeTensor& in, int factor);

/// out = in + theta, broadcast per the granularity. theta must be
/// non-negative; violations are a contract error.
TimeTensor delay_apply(const TimeTensor& in, const Eigen::ArrayXd& theta,
                       DelayGranularity granularity);

/// Maps an element's (c, h, w) position to its delay parameter index.
int delay_param_index(DelayGranularity g, int channels, int height, int width,
                      int c, int h, int w);
int delay_param_count(DelayGranularity g, int channels, int height, int width);

}  // namespace ttfs

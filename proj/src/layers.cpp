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

#include "ttfs/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ttfs/temporal.hpp"
#include "ttfs/threading.hpp"

namespace ttfs {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ColMat = Eigen::MatrixXd;

// z = exp(min(t, horizon)) for one sample, vectorized.
void sample_to_z(const TimeTensor& in, int b, Eigen::ArrayXd& z) {
  const auto s = in.sample(b);
  z = (s < kSpikeHorizon).select(s, kSpikeHorizon).exp();
}

struct ZEntry {
  double z;
  std::uint16_t pos;
};

}  // namespace

// ---------------------------------------------------------------------------
// ConvGeom
// ---------------------------------------------------------------------------

ConvGeom ConvGeom::make(int in_c, int in_h, int in_w, int out_c, int kernel,
                        int stride, int pad) {
  if (in_c <= 0 || in_h <= 0 || in_w <= 0 || out_c <= 0)
    throw ConfigError("conv: non-positive tensor dimension");
  if (kernel <= 0 || stride <= 0 || pad < 0)
    throw ConfigError("conv: bad kernel/stride/pad");
  ConvGeom g;
  g.in_c = in_c;
  g.in_h = in_h;
  g.in_w = in_w;
  g.out_c = out_c;
  g.kernel = kernel;
  g.stride = stride;
  g.pad = pad;
  g.out_h = (in_h + 2 * pad - kernel) / stride + 1;
  g.out_w = (in_w + 2 * pad - kernel) / stride + 1;
  if (in_h + 2 * pad < kernel || in_w + 2 * pad < kernel || g.out_h <= 0 ||
      g.out_w <= 0)
    throw ConfigError("conv: kernel does not fit input");
  const int window = g.window();
  g.col_index.assign(static_cast<size_t>(g.out_locs()) * window, -1);
  for (int oy = 0; oy < g.out_h; ++oy) {
    for (int ox = 0; ox < g.out_w; ++ox) {
      std::int32_t* dst =
          g.col_index.data() + (static_cast<size_t>(oy) * g.out_w + ox) * window;
      int p = 0;
      for (int c = 0; c < in_c; ++c) {
        for (int ky = 0; ky < kernel; ++ky) {
          for (int kx = 0; kx < kernel; ++kx, ++p) {
            int iy = oy * stride - pad + ky;
            int ix = ox * stride - pad + kx;
            if (iy >= 0 && iy < in_h && ix >= 0 && ix < in_w)
              dst[p] = (c * in_h + iy) * in_w + ix;
          }
        }
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Temporal conv / dense kernel
// ---------------------------------------------------------------------------

void TemporalTape::resize(int batch, int locs, int window, int out_c) {
  perm.resize(static_cast<size_t>(batch) * locs * window);
  n_valid.resize(static_cast<size_t>(batch) * locs);
  k_causal.resize(static_cast<size_t>(batch) * locs * out_c);
  denom.resize(static_cast<size_t>(batch) * locs * out_c);
}

void temporal_conv_forward(const ConvGeom& g, const TimeTensor& in,
                           const Eigen::ArrayXd& weight, TimeTensor& out,
                           TemporalTape* tape, int workers) {
  const int window = g.window();
  const int locs = g.out_locs();
  const int batch = in.batch();
  if (in.sample_size() != g.in_c * g.in_h * g.in_w)
    throw ConfigError("temporal conv: input shape mismatch");
  if (weight.size() != static_cast<Eigen::Index>(g.out_c) * window)
    throw ConfigError("temporal conv: weight shape mismatch");
  out.reshape({batch, g.out_c, g.out_h, g.out_w});
  if (tape) tape->resize(batch, locs, window, g.out_c);

  // Transposed weights: contiguous per window position across filters.
  RowMat wt(window, g.out_c);
  for (int f = 0; f < g.out_c; ++f)
    for (int p = 0; p < window; ++p)
      wt(p, f) = weight[static_cast<Eigen::Index>(f) * window + p];

  parallel_slots(batch, workers, [&](int, int begin, int end) {
    Eigen::ArrayXd z;
    std::vector<ZEntry> entries(static_cast<size_t>(window));
    for (int b = begin; b < end; ++b) {
      sample_to_z(in, b, z);
      auto out_s = out.sample(b);
      for (int loc = 0; loc < locs; ++loc) {
        const std::int32_t* cidx =
            g.col_index.data() + static_cast<size_t>(loc) * window;
        int nv = 0;
        for (int p = 0; p < window; ++p) {
          std::int32_t src = cidx[p];
          if (src >= 0 && z[src] < kZMax) {
            entries[nv].z = z[src];
            entries[nv].pos = static_cast<std::uint16_t>(p);
            ++nv;
          }
        }
        std::sort(entries.begin(), entries.begin() + nv,
                  [](const ZEntry& a, const ZEntry& b) {
                    return a.z < b.z || (a.z == b.z && a.pos < b.pos);
                  });
        std::uint16_t* perm_loc = nullptr;
        if (tape) {
          perm_loc = tape->perm.data() +
                     (static_cast<size_t>(b) * locs + loc) * window;
          for (int i = 0; i < nv; ++i) perm_loc[i] = entries[i].pos;
          tape->n_valid[static_cast<size_t>(b) * locs + loc] =
              static_cast<std::uint16_t>(nv);
        }
        for (int f = 0; f < g.out_c; ++f) {
          double sum_w = 0.0, sum_wz = 0.0;
          double z_fire = 0.0, d_fire = 0.0;
          int k_fire = 0;
          for (int i = 0; i < nv; ++i) {
            const double zi = entries[i].z;
            const double w = wt(entries[i].pos, f);
            sum_w += w;
            sum_wz += w * zi;
            const double d = sum_w - 1.0;
            if (d > kDenomEps) {
              // Division-free candidate test: z_out in [z_i, z_next).
              const double z_next = (i + 1 < nv) ? entries[i + 1].z : kZMax;
              if (sum_wz >= zi * d && sum_wz < z_next * d) {
                z_fire = sum_wz / d;
                d_fire = d;
                k_fire = i + 1;
                break;
              }
            }
          }
          out_s[static_cast<Eigen::Index>(f) * locs + loc] =
              k_fire > 0 ? std::log(z_fire) : kNoSpike;
          if (tape) {
            const size_t ti =
                (static_cast<size_t>(b) * locs + loc) * g.out_c + f;
            tape->k_causal[ti] = static_cast<std::uint16_t>(k_fire);
            tape->denom[ti] = d_fire;
          }
        }
      }
    }
  });
}

void temporal_conv_backward(const ConvGeom& g, const TimeTensor& in,
                            const Eigen::ArrayXd& weight,
                            const TimeTensor& out, const TimeTensor& upstream,
                            const TemporalTape& tape, TimeTensor& din,
                            Eigen::ArrayXd& dweight, int workers) {
  const int window = g.window();
  const int locs = g.out_locs();
  const int batch = in.batch();
  if (dweight.size() != weight.size())
    throw std::logic_error("temporal conv backward: dweight size mismatch");

  RowMat wt(window, g.out_c);
  for (int f = 0; f < g.out_c; ++f)
    for (int p = 0; p < window; ++p)
      wt(p, f) = weight[static_cast<Eigen::Index>(f) * window + p];

  // Per-slot weight-gradient buffers, reduced in slot order below.
  std::vector<Eigen::ArrayXd> dw_slot(kReductionSlots);
  parallel_slots(batch, workers, [&](int slot, int begin, int end) {
    Eigen::ArrayXd& dw = dw_slot[slot];
    dw = Eigen::ArrayXd::Zero(weight.size());
    Eigen::ArrayXd z;
    for (int b = begin; b < end; ++b) {
      sample_to_z(in, b, z);
      auto out_s = out.sample(b);
      auto up_s = upstream.sample(b);
      auto din_s = din.sample(b);
      for (int loc = 0; loc < locs; ++loc) {
        const std::int32_t* cidx =
            g.col_index.data() + static_cast<size_t>(loc) * window;
        const std::uint16_t* perm_loc =
            tape.perm.data() + (static_cast<size_t>(b) * locs + loc) * window;
        for (int f = 0; f < g.out_c; ++f) {
          const size_t ti = (static_cast<size_t>(b) * locs + loc) * g.out_c + f;
          const int k = tape.k_causal[ti];
          if (k == 0) continue;
          const double u = up_s[static_cast<Eigen::Index>(f) * locs + loc];
          if (u == 0.0) continue;
          const double t_out = out_s[static_cast<Eigen::Index>(f) * locs + loc];
          const double z_out = std::exp(t_out);
          // dt_out = dz_out / z_out; chain through the causal prefix.
          const double s = u / (z_out * tape.denom[ti]);
          for (int i = 0; i < k; ++i) {
            const int p = perm_loc[i];
            const std::int32_t src = cidx[p];
            const double zj = z[src];
            // dz_j/dt_j = z_j, so the z factors cancel into a clean form.
            din_s[src] += wt(p, f) * zj * s;
            dw[static_cast<Eigen::Index>(f) * window + p] += (zj - z_out) * s;
          }
        }
      }
    }
  });
  for (int slot = 0; slot < kReductionSlots; ++slot)
    if (dw_slot[slot].size() > 0) dweight += dw_slot[slot];
}

TimeTensor temporal_conv2d(const TimeTensor& in, const Eigen::ArrayXd& weight,
                           int out_c, int kernel, int stride, int pad) {
  ConvGeom g = ConvGeom::make(in.channels(), in.height(), in.width(), out_c,
                              kernel, stride, pad);
  TimeTensor out;
  temporal_conv_forward(g, in, weight, out, nullptr, 1);
  return out;
}

TimeTensor temporal_dense(const TimeTensor& in, const Eigen::ArrayXd& weight,
                          int out_features) {
  TimeTensor flat = in;
  flat.dims = {in.batch(), static_cast<int>(in.sample_size()), 1, 1};
  ConvGeom g = ConvGeom::make(static_cast<int>(in.sample_size()), 1, 1,
                              out_features, 1, 1, 0);
  TimeTensor out;
  temporal_conv_forward(g, flat, weight, out, nullptr, 1);
  out.reshape({in.batch(), out_features});
  return out;
}

// ---------------------------------------------------------------------------
// Encoder
// ---------------------------------------------------------------------------

namespace {

// Gathers one sample's receptive-field windows into a (window x locs) matrix.
void im2col(const ConvGeom& g, Eigen::Map<const Eigen::ArrayXd> sample,
            ColMat& col) {
  const int window = g.window();
  const int locs = g.out_locs();
  col.resize(window, locs);
  for (int loc = 0; loc < locs; ++loc) {
    const std::int32_t* cidx =
        g.col_index.data() + static_cast<size_t>(loc) * window;
    for (int p = 0; p < window; ++p)
      col(p, loc) = cidx[p] >= 0 ? sample[cidx[p]] : 0.0;
  }
}

}  // namespace

void encoder_forward(const ConvGeom& g, const TimeTensor& image,
                     EncoderParams& p, bool training, TimeTensor& out,
                     EncoderTape* tape, int workers) {
  const int batch = image.batch();
  const int locs = g.out_locs();
  const int oc = g.out_c;
  if (image.sample_size() != g.in_c * g.in_h * g.in_w)
    throw ConfigError("encoder: input shape mismatch");
  out.reshape({batch, oc, g.out_h, g.out_w});
  TimeTensor local_conv;
  TimeTensor& conv_out = tape ? tape->conv_out : local_conv;
  conv_out.reshape({batch, oc, g.out_h, g.out_w});

  Eigen::Map<const RowMat> w(p.w.data(), oc, g.window());
  parallel_slots(batch, workers, [&](int, int begin, int end) {
    ColMat col;
    for (int b = begin; b < end; ++b) {
      im2col(g, image.sample(b), col);
      Eigen::Map<RowMat> dst(conv_out.sample(b).data(), oc, locs);
      dst.noalias() = w * col;
      dst.colwise() += p.b.matrix();
    }
  });

  Eigen::ArrayXd mu(oc), var(oc);
  if (training) {
    const double n = static_cast<double>(batch) * locs;
    for (int c = 0; c < oc; ++c) {
      double s = 0.0, s2 = 0.0;
      for (int b = 0; b < batch; ++b) {
        Eigen::Map<const Eigen::ArrayXd> row(
            conv_out.sample(b).data() + static_cast<Eigen::Index>(c) * locs,
            locs);
        s += row.sum();
        s2 += row.square().sum();
      }
      mu[c] = s / n;
      var[c] = std::max(s2 / n - mu[c] * mu[c], 0.0);
    }
    const double unbias = n > 1.0 ? n / (n - 1.0) : 1.0;
    p.running_mean = (1.0 - kBnMomentum) * p.running_mean + kBnMomentum * mu;
    p.running_var =
        (1.0 - kBnMomentum) * p.running_var + kBnMomentum * (var * unbias);
  } else {
    mu = p.running_mean;
    var = p.running_var;
  }
  if (tape) {
    tape->mu = mu;
    tape->var = var;
    tape->training = training;
  }

  Eigen::ArrayXd inv_std = (var + kBnEps).sqrt().inverse();
  parallel_slots(batch, workers, [&](int, int begin, int end) {
    for (int b = begin; b < end; ++b) {
      for (int c = 0; c < oc; ++c) {
        Eigen::Map<const Eigen::ArrayXd> x(
            conv_out.sample(b).data() + static_cast<Eigen::Index>(c) * locs,
            locs);
        Eigen::Map<Eigen::ArrayXd> y(
            out.sample(b).data() + static_cast<Eigen::Index>(c) * locs, locs);
        y = (p.gamma[c] * (x - mu[c]) * inv_std[c] + p.beta[c]).max(0.0);
      }
    }
  });
}

void encoder_backward(const ConvGeom& g, const TimeTensor& image,
                      const EncoderParams& p, const TimeTensor& upstream,
                      const EncoderTape& tape, Eigen::ArrayXd& dw,
                      Eigen::ArrayXd& db, Eigen::ArrayXd& dgamma,
                      Eigen::ArrayXd& dbeta, int workers) {
  if (!tape.training)
    throw std::logic_error("encoder backward requires a training-mode tape");
  const int batch = image.batch();
  const int locs = g.out_locs();
  const int oc = g.out_c;
  const double n = static_cast<double>(batch) * locs;
  const Eigen::ArrayXd inv_std = (tape.var + kBnEps).sqrt().inverse();

  // Pass 1: per-channel sums of dy and dy * xhat (dy = upstream gated by the
  // ReLU). Slot partials keep the reduction order fixed.
  std::vector<Eigen::ArrayXd> s1_slot(kReductionSlots), s2_slot(kReductionSlots);
  parallel_slots(batch, workers, [&](int slot, int begin, int end) {
    Eigen::ArrayXd& s1 = s1_slot[slot];
    Eigen::ArrayXd& s2 = s2_slot[slot];
    s1 = Eigen::ArrayXd::Zero(oc);
    s2 = Eigen::ArrayXd::Zero(oc);
    Eigen::ArrayXd dy, xhat;
    for (int b = begin; b < end; ++b) {
      for (int c = 0; c < oc; ++c) {
        Eigen::Map<const Eigen::ArrayXd> x(
            tape.conv_out.sample(b).data() +
                static_cast<Eigen::Index>(c) * locs,
            locs);
        Eigen::Map<const Eigen::ArrayXd> up(
            upstream.sample(b).data() + static_cast<Eigen::Index>(c) * locs,
            locs);
        xhat = (x - tape.mu[c]) * inv_std[c];
        const Eigen::ArrayXd y = p.gamma[c] * xhat + p.beta[c];
        dy = (y > 0.0).select(up, 0.0);
        s1[c] += dy.sum();
        s2[c] += (dy * xhat).sum();
      }
    }
  });
  Eigen::ArrayXd s1 = Eigen::ArrayXd::Zero(oc), s2 = Eigen::ArrayXd::Zero(oc);
  for (int slot = 0; slot < kReductionSlots; ++slot) {
    if (s1_slot[slot].size() > 0) {
      s1 += s1_slot[slot];
      s2 += s2_slot[slot];
    }
  }
  dgamma += s2;
  dbeta += s1;

  // Pass 2: dx per sample, then conv gradients via GEMM.
  std::vector<Eigen::ArrayXd> dw_slot(kReductionSlots), db_slot(kReductionSlots);
  parallel_slots(batch, workers, [&](int slot, int begin, int end) {
    Eigen::ArrayXd& dws = dw_slot[slot];
    Eigen::ArrayXd& dbs = db_slot[slot];
    dws = Eigen::ArrayXd::Zero(dw.size());
    dbs = Eigen::ArrayXd::Zero(oc);
    ColMat col;
    RowMat dx(oc, locs);
    Eigen::ArrayXd dy, xhat;
    for (int b = begin; b < end; ++b) {
      for (int c = 0; c < oc; ++c) {
        Eigen::Map<const Eigen::ArrayXd> x(
            tape.conv_out.sample(b).data() +
                static_cast<Eigen::Index>(c) * locs,
            locs);
        Eigen::Map<const Eigen::ArrayXd> up(
            upstream.sample(b).data() + static_cast<Eigen::Index>(c) * locs,
            locs);
        xhat = (x - tape.mu[c]) * inv_std[c];
        const Eigen::ArrayXd y = p.gamma[c] * xhat + p.beta[c];
        dy = (y > 0.0).select(up, 0.0);
        dx.row(c) = (p.gamma[c] * inv_std[c] *
                     (dy - s1[c] / n - xhat * (s2[c] / n)))
                        .matrix()
                        .transpose();
        // The conv bias feeds the batch statistics, so its gradient is the
        // sum of dx (identically zero up to rounding: a constant shift moves
        // the batch mean with it), not the post-norm sum of dy.
        dbs[c] += dx.row(c).sum();
      }
      im2col(g, image.sample(b), col);
      Eigen::Map<RowMat> dwm(dws.data(), oc, g.window());
      dwm.noalias() += dx * col.transpose();
    }
  });
  for (int slot = 0; slot < kReductionSlots; ++slot) {
    if (dw_slot[slot].size() > 0) {
      dw += dw_slot[slot];
      db += db_slot[slot];
    }
  }
}

TimeTensor encode_input(const TimeTensor& image, EncoderParams& p,
                        bool training, int kernel, int stride, int pad) {
  const int oc = static_cast<int>(p.b.size());
  ConvGeom g = ConvGeom::make(image.channels(), image.height(), image.width(),
                              oc, kernel, stride, pad);
  TimeTensor out;
  encoder_forward(g, image, p, training, out, nullptr, 1);
  return out;
}

// ---------------------------------------------------------------------------
// Earliest-spike pooling
// ---------------------------------------------------------------------------

PoolGeom PoolGeom::make(int in_c, int in_h, int in_w, int window, int stride,
                        bool ceil_mode) {
  if (window <= 0 || stride <= 0) throw ConfigError("pool: bad window/stride");
  if (in_h < window || in_w < window)
    throw ConfigError("pool: window larger than input");
  PoolGeom g;
  g.in_c = in_c;
  g.in_h = in_h;
  g.in_w = in_w;
  g.window = window;
  g.stride = stride;
  g.ceil_mode = ceil_mode;
  auto extent = [&](int in) {
    int span = in - window;
    return (ceil_mode ? (span + stride - 1) / stride : span / stride) + 1;
  };
  g.out_h = extent(in_h);
  g.out_w = extent(in_w);
  return g;
}

void min_pool_forward(const PoolGeom& g, const TimeTensor& in, TimeTensor& out,
                      PoolTape* tape, int workers) {
  const int batch = in.batch();
  const int out_elems = g.in_c * g.out_h * g.out_w;
  out.reshape({batch, g.in_c, g.out_h, g.out_w});
  if (tape) tape->argmin.resize(static_cast<size_t>(batch) * out_elems);

  parallel_slots(batch, workers, [&](int, int begin, int end) {
    for (int b = begin; b < end; ++b) {
      auto in_s = in.sample(b);
      auto out_s = out.sample(b);
      Eigen::Index o = 0;
      for (int c = 0; c < g.in_c; ++c) {
        const Eigen::Index base = static_cast<Eigen::Index>(c) * g.in_h * g.in_w;
        for (int oy = 0; oy < g.out_h; ++oy) {
          for (int ox = 0; ox < g.out_w; ++ox, ++o) {
            const int y0 = oy * g.stride;
            const int x0 = ox * g.stride;
            const int y1 = std::min(y0 + g.window, g.in_h);
            const int x1 = std::min(x0 + g.window, g.in_w);
            double best = kNoSpike;
            std::int32_t best_idx = base + y0 * g.in_w + x0;
            for (int y = y0; y < y1; ++y) {
              for (int x = x0; x < x1; ++x) {
                const Eigen::Index idx = base + y * g.in_w + x;
                const double v = in_s[idx];
                if (v < best) {
                  best = v;
                  best_idx = static_cast<std::int32_t>(idx);
                }
              }
            }
            out_s[o] = best;
            if (tape)
              tape->argmin[static_cast<size_t>(b) * out_elems + o] = best_idx;
          }
        }
      }
    }
  });
}

void min_pool_backward(const PoolGeom& g, const TimeTensor& upstream,
                       const PoolTape& tape, TimeTensor& din, int workers) {
  const int batch = upstream.batch();
  const int out_elems = g.in_c * g.out_h * g.out_w;
  parallel_slots(batch, workers, [&](int, int begin, int end) {
    for (int b = begin; b < end; ++b) {
      auto up_s = upstream.sample(b);
      auto din_s = din.sample(b);
      const std::int32_t* am =
          tape.argmin.data() + static_cast<size_t>(b) * out_elems;
      for (int o = 0; o < out_elems; ++o) {
        const double u = up_s[o];
        if (u != 0.0) din_s[am[o]] += u;
      }
    }
  });
}

TimeTensor min_time_pool(const TimeTensor& in, int window, int stride,
                         bool ceil_mode) {
  PoolGeom g = PoolGeom::make(in.channels(), in.height(), in.width(), window,
                              stride, ceil_mode);
  TimeTensor out;
  min_pool_forward(g, in, out, nullptr, 1);
  return out;
}

// ---------------------------------------------------------------------------
// Structural ops
// ---------------------------------------------------------------------------

std::pair<TimeTensor, TimeTensor> channel_split(const TimeTensor& in) {
  const int c = in.channels();
  if (c % 2 != 0) throw ConfigError("channel split requires an even count");
  const int half = c / 2;
  const Eigen::Index plane = static_cast<Eigen::Index>(in.height()) * in.width();
  TimeTensor a, b;
  a.reshape({in.batch(), half, in.height(), in.width()});
  b.reshape({in.batch(), half, in.height(), in.width()});
  for (int s = 0; s < in.batch(); ++s) {
    auto src = in.sample(s);
    a.sample(s) = src.segment(0, half * plane);
    b.sample(s) = src.segment(half * plane, half * plane);
  }
  return {std::move(a), std::move(b)};
}

TimeTensor concat_channels(const TimeTensor& a, const TimeTensor& b) {
  if (a.batch() != b.batch() || a.height() != b.height() ||
      a.width() != b.width())
    throw ConfigError("concat: spatial/batch mismatch");
  const Eigen::Index plane = static_cast<Eigen::Index>(a.height()) * a.width();
  TimeTensor out;
  out.reshape({a.batch(), a.channels() + b.channels(), a.height(), a.width()});
  for (int s = 0; s < a.batch(); ++s) {
    auto dst = out.sample(s);
    dst.segment(0, a.channels() * plane) = a.sample(s);
    dst.segment(a.channels() * plane, b.channels() * plane) = b.sample(s);
  }
  return out;
}

TimeTensor channel_shuffle(const TimeTensor& in, int groups) {
  const int c = in.channels();
  if (groups <= 0 || c % groups != 0)
    throw ConfigError("shuffle: channels not divisible by groups");
  const int per = c / groups;
  const Eigen::Index plane = static_cast<Eigen::Index>(in.height()) * in.width();
  TimeTensor out;
  out.reshape(in.dims);
  for (int s = 0; s < in.batch(); ++s) {
    auto src = in.sample(s);
    auto dst = out.sample(s);
    for (int g = 0; g < groups; ++g)
      for (int j = 0; j < per; ++j)
        dst.segment((static_cast<Eigen::Index>(j) * groups + g) * plane,
                    plane) =
            src.segment((static_cast<Eigen::Index>(g) * per + j) * plane,
                        plane);
  }
  return out;
}

TimeTensor add_skip(const TimeTensor& a, const TimeTensor& b) {
  if (!a.same_shape(b)) throw ConfigError("skip addition: shape mismatch");
  TimeTensor out;
  out.reshape(a.dims);
  out.v = a.v + b.v;  // inf + finite = inf keeps no-spike absorbing
  return out;
}

TimeTensor tile_channels(const TimeTensor& in, int factor) {
  if (factor <= 0) throw ConfigError("tile: bad factor");
  const Eigen::Index plane = static_cast<Eigen::Index>(in.height()) * in.width();
  const Eigen::Index block = static_cast<Eigen::Index>(in.channels()) * plane;
  TimeTensor out;
  out.reshape({in.batch(), in.channels() * factor, in.height(), in.width()});
  for (int s = 0; s < in.batch(); ++s) {
    auto dst = out.sample(s);
    for (int f = 0; f < factor; ++f) dst.segment(f * block, block) = in.sample(s);
  }
  return out;
}

int delay_param_count(DelayGranularity g, int channels, int height, int width) {
  switch (g) {
    case DelayGranularity::kLayer:
      return 1;
    case DelayGranularity::kChannel:
      return channels;
    case DelayGranularity::kPixel:
      return height * width;
  }
  return 1;
}

int delay_param_index(DelayGranularity g, int /*channels*/, int /*height*/,
                      int width, int c, int h, int w) {
  switch (g) {
    case DelayGranularity::kLayer:
      return 0;
    case DelayGranularity::kChannel:
      return c;
    case DelayGranularity::kPixel:
      return h * width + w;
  }
  return 0;
}

TimeTensor delay_apply(const TimeTensor& in, const Eigen::ArrayXd& theta,
                       DelayGranularity granularity) {
  if ((theta < 0.0).any())
    throw std::logic_error("delay parameters must stay non-negative");
  const int want =
      delay_param_count(granularity, in.channels(), in.height(), in.width());
  if (theta.size() != want)
    throw ConfigError("delay: parameter count mismatch");
  TimeTensor out;
  out.reshape(in.dims);
  const Eigen::Index plane = static_cast<Eigen::Index>(in.height()) * in.width();
  for (int s = 0; s < in.batch(); ++s) {
    auto src = in.sample(s);
    auto dst = out.sample(s);
    switch (granularity) {
      case DelayGranularity::kLayer:
        dst = src + theta[0];
        break;
      case DelayGranularity::kChannel:
        for (int c = 0; c < in.channels(); ++c)
          dst.segment(c * plane, plane) = src.segment(c * plane, plane) +
                                          theta[c];
        break;
      case DelayGranularity::kPixel:
        for (int c = 0; c < in.channels(); ++c)
          dst.segment(c * plane, plane) =
              src.segment(c * plane, plane) + theta;
        break;
    }
  }
  return out;
}

}  // namespace ttfs

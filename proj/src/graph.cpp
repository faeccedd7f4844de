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

#include "ttfs/graph.hpp"

#include <cmath>
#include <stdexcept>

#include "ttfs/rng.hpp"

namespace ttfs {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

// Expected initial weight sum per output row. Rows draw from
// U[0, 2*kInitRowSum/window]. Each temporal layer adds roughly
// ln(S/(S-1)) to the spike time at causal sum S, so small targets
// push deep layers past the spike horizon and the head goes silent
// before training starts; 2.5 keeps every depth/width used here
// firing at step 0 while staying close to the hinge threshold.
constexpr double kInitRowSum = 2.5;

inline void fnv_mix(std::uint64_t& h, std::uint64_t x) {
  h ^= x;
  h *= kFnvPrime;
}

}  // namespace

int Graph::param_index(const std::string& name) const {
  for (size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return static_cast<int>(i);
  return -1;
}

std::int64_t Graph::trainable_count() const {
  std::int64_t n = 0;
  for (const auto& p : params_)
    if (p.trainable) n += p.count();
  return n;
}

EncoderParams Graph::encoder_view() const {
  EncoderParams p;
  p.w = params_[static_cast<size_t>(nodes_[encoder_node_].enc_w)].value;
  p.b = params_[static_cast<size_t>(nodes_[encoder_node_].enc_b)].value;
  p.gamma = params_[static_cast<size_t>(nodes_[encoder_node_].enc_gamma)].value;
  p.beta = params_[static_cast<size_t>(nodes_[encoder_node_].enc_beta)].value;
  p.running_mean =
      params_[static_cast<size_t>(nodes_[encoder_node_].enc_rmean)].value;
  p.running_var =
      params_[static_cast<size_t>(nodes_[encoder_node_].enc_rvar)].value;
  return p;
}

void Graph::encoder_writeback(const EncoderParams& p) {
  params_[static_cast<size_t>(nodes_[encoder_node_].enc_rmean)].value =
      p.running_mean;
  params_[static_cast<size_t>(nodes_[encoder_node_].enc_rvar)].value =
      p.running_var;
}

// ---------------------------------------------------------------------------
// Build
// ---------------------------------------------------------------------------

Graph Graph::build(const ModelConfig& cfg, std::uint64_t seed) {
  if (cfg.in_channels < 1 || cfg.in_height < 1 || cfg.in_width < 1)
    throw ConfigError("model: input dimensions must be positive");
  if (cfg.classes < 2) throw ConfigError("model: needs at least two classes");
  if (cfg.width < 2) throw ConfigError("model: width must be at least 2");
  if (cfg.delay_init < 0.0)
    throw ConfigError("model: delay_init must be nonnegative");
  Graph g;
  g.config_ = cfg;
  Rng rng(seed);

  auto add_param = [&](const std::string& name, std::vector<int> dims,
                       bool trainable, bool decay, bool nonneg,
                       auto init) -> int {
    ParamSlot s;
    s.name = name;
    s.dims = std::move(dims);
    s.trainable = trainable;
    s.decay = decay;
    s.nonneg = nonneg;
    Eigen::Index n = 1;
    for (int d : s.dims) n *= d;
    s.value.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) s.value[i] = init();
    g.params_.push_back(std::move(s));
    return static_cast<int>(g.params_.size()) - 1;
  };
  auto constant = [](double v) {
    return [v] { return v; };
  };

  auto add_node = [&](NodeSpec spec) -> int {
    g.nodes_.push_back(std::move(spec));
    return static_cast<int>(g.nodes_.size()) - 1;
  };

  // Input node.
  {
    NodeSpec n;
    n.kind = NodeKind::kInput;
    n.name = "input";
    n.out_c = cfg.in_channels;
    n.out_h = cfg.in_height;
    n.out_w = cfg.in_width;
    add_node(std::move(n));
  }

  const int width = cfg.width;

  // Encoder: real conv + BN + ReLU read as spike times.
  {
    NodeSpec n;
    n.kind = NodeKind::kEncoder;
    n.name = "enc";
    n.inputs = {0};
    n.conv = ConvGeom::make(cfg.in_channels, cfg.in_height, cfg.in_width,
                            width, 3, 1, 1);
    n.out_c = n.conv.out_c;
    n.out_h = n.conv.out_h;
    n.out_w = n.conv.out_w;
    const int window = n.conv.window();
    const double s = 1.0 / std::sqrt(static_cast<double>(window));
    n.enc_w = add_param("enc.w", {width, window}, true, true, false,
                        [&] { return rng.uniform_f32(-s, s); });
    n.enc_b = add_param("enc.b", {width}, true, false, false, constant(0.0));
    n.enc_gamma =
        add_param("enc.bn.gamma", {width}, true, false, false, constant(1.0));
    n.enc_beta =
        add_param("enc.bn.beta", {width}, true, false, false, constant(0.0));
    n.enc_rmean = add_param("enc.bn.running_mean", {width}, false, false,
                            false, constant(0.0));
    n.enc_rvar = add_param("enc.bn.running_var", {width}, false, false, false,
                           constant(1.0));
    g.encoder_node_ = add_node(std::move(n));
  }

  auto prev = [&]() { return static_cast<int>(g.nodes_.size()) - 1; };
  auto dims_of = [&](int id) {
    const NodeSpec& s = g.nodes_[static_cast<size_t>(id)];
    return std::array<int, 3>{s.out_c, s.out_h, s.out_w};
  };

  auto add_pool = [&](const std::string& name, int src, bool ceil_mode) {
    auto [c, h, w] = dims_of(src);
    NodeSpec n;
    n.kind = NodeKind::kMinPool;
    n.name = name;
    n.inputs = {src};
    n.pool = PoolGeom::make(c, h, w, 2, 2, ceil_mode);
    n.out_c = c;
    n.out_h = n.pool.out_h;
    n.out_w = n.pool.out_w;
    return add_node(std::move(n));
  };

  auto add_tconv = [&](const std::string& name, int src, int out_c,
                       int stride) {
    auto [c, h, w] = dims_of(src);
    NodeSpec n;
    n.kind = NodeKind::kTemporalConv;
    n.name = name;
    n.inputs = {src};
    n.conv = ConvGeom::make(c, h, w, out_c, 3, stride, 1);
    n.out_c = n.conv.out_c;
    n.out_h = n.conv.out_h;
    n.out_w = n.conv.out_w;
    const int window = n.conv.window();
    const double hi = 2.0 * kInitRowSum / static_cast<double>(window);
    n.weight_slot = add_param(name + ".w", {out_c, window}, true, true, false,
                              [&] { return rng.uniform_f32(0.0, hi); });
    int id = add_node(std::move(n));
    g.temporal_nodes_.push_back(id);
    return id;
  };

  auto add_dense = [&](const std::string& name, int src, int classes) {
    auto [c, h, w] = dims_of(src);
    const int fan_in = c * h * w;
    NodeSpec n;
    n.kind = NodeKind::kTemporalDense;
    n.name = name;
    n.inputs = {src};
    n.conv = ConvGeom::make(fan_in, 1, 1, classes, 1, 1, 0);
    n.out_c = classes;
    n.out_h = 1;
    n.out_w = 1;
    const double hi = 2.0 * kInitRowSum / static_cast<double>(fan_in);
    n.weight_slot = add_param(name + ".w", {classes, fan_in}, true, true,
                              false, [&] { return rng.uniform_f32(0.0, hi); });
    int id = add_node(std::move(n));
    g.temporal_nodes_.push_back(id);
    return id;
  };

  auto add_split = [&](const std::string& base, int src) {
    auto [c, h, w] = dims_of(src);
    if (c % 2 != 0) throw ConfigError("split: odd channel count at " + base);
    NodeSpec lo;
    lo.kind = NodeKind::kSplitLo;
    lo.name = base + ".split_conv";
    lo.inputs = {src};
    lo.out_c = c / 2;
    lo.out_h = h;
    lo.out_w = w;
    int a = add_node(std::move(lo));
    NodeSpec hi;
    hi.kind = NodeKind::kSplitHi;
    hi.name = base + ".split_skip";
    hi.inputs = {src};
    hi.out_c = c / 2;
    hi.out_h = h;
    hi.out_w = w;
    int b = add_node(std::move(hi));
    return std::pair{a, b};
  };

  auto add_concat = [&](const std::string& name, int a, int b) {
    auto [ca, h, w] = dims_of(a);
    auto [cb, hb, wb] = dims_of(b);
    if (h != hb || w != wb)
      throw ConfigError("concat: spatial mismatch at " + name);
    NodeSpec n;
    n.kind = NodeKind::kConcat;
    n.name = name;
    n.inputs = {a, b};
    n.out_c = ca + cb;
    n.out_h = h;
    n.out_w = w;
    return add_node(std::move(n));
  };

  auto add_shuffle = [&](const std::string& name, int src) {
    auto [c, h, w] = dims_of(src);
    NodeSpec n;
    n.kind = NodeKind::kShuffle;
    n.name = name;
    n.inputs = {src};
    n.shuffle_groups = 2;
    n.out_c = c;
    n.out_h = h;
    n.out_w = w;
    return add_node(std::move(n));
  };

  auto add_add = [&](const std::string& name, int a, int b) {
    if (dims_of(a) != dims_of(b))
      throw ConfigError("skip addition: shape mismatch at " + name);
    NodeSpec n;
    n.kind = NodeKind::kAdd;
    n.name = name;
    n.inputs = {a, b};
    auto [c, h, w] = dims_of(a);
    n.out_c = c;
    n.out_h = h;
    n.out_w = w;
    return add_node(std::move(n));
  };

  auto add_tile = [&](const std::string& name, int src, int factor) {
    auto [c, h, w] = dims_of(src);
    NodeSpec n;
    n.kind = NodeKind::kTile;
    n.name = name;
    n.inputs = {src};
    n.tile_factor = factor;
    n.out_c = c * factor;
    n.out_h = h;
    n.out_w = w;
    return add_node(std::move(n));
  };

  auto add_delay = [&](const std::string& block, int src) {
    auto [c, h, w] = dims_of(src);
    NodeSpec n;
    n.kind = NodeKind::kDelay;
    n.name = block + ".delay";
    n.inputs = {src};
    n.delay_gran = cfg.delay_granularity;
    n.out_c = c;
    n.out_h = h;
    n.out_w = w;
    const int count = delay_param_count(cfg.delay_granularity, c, h, w);
    n.theta_slot = add_param(block + ".theta", {count}, true, false, true,
                             constant(cfg.delay_init));
    return add_node(std::move(n));
  };

  const int pool1 = add_pool("pool1", g.encoder_node_, false);
  const bool with_delay = cfg.arch == ArchKind::kConcatSkipDelay;

  switch (cfg.arch) {
    case ArchKind::kBaseline: {
      add_tconv("conv2", pool1, width, 2);
      add_tconv("conv3", prev(), width, 1);
      add_tconv("conv4", prev(), 2 * width, 2);
      add_tconv("conv5", prev(), 2 * width, 1);
      break;
    }
    case ArchKind::kAddSkip: {
      const int conv2 = add_tconv("conv2", pool1, width, 2);
      const int conv3 = add_tconv("conv3", conv2, width, 1);
      const int skip1 = add_pool("skip1.pool", pool1, true);
      const int a1 = add_add("skip1.add", conv3, skip1);
      const int conv4 = add_tconv("conv4", a1, 2 * width, 2);
      const int conv5 = add_tconv("conv5", conv4, 2 * width, 1);
      const int skip2 = add_pool("skip2.pool", a1, true);
      const int tiled = add_tile("skip2.tile", skip2, 2);
      add_add("skip2.add", conv5, tiled);
      break;
    }
    case ArchKind::kConcatSkip:
    case ArchKind::kConcatSkipDelay: {
      const int conv2 = add_tconv("conv2", pool1, width, 2);
      auto [a1, b1] = add_split("block1", conv2);
      const int conv3 = add_tconv("conv3", a1, width / 2, 1);
      const int skip1 = with_delay ? add_delay("block1", b1) : b1;
      const int cat1 = add_concat("block1.concat", conv3, skip1);
      const int shuf1 = add_shuffle("block1.shuffle", cat1);
      g.taps_.push_back({"block1", conv3, skip1, shuf1,
                         with_delay
                             ? g.nodes_[static_cast<size_t>(skip1)].theta_slot
                             : -1});
      const int conv4 = add_tconv("conv4", shuf1, 2 * width, 2);
      auto [a2, b2] = add_split("block2", conv4);
      const int conv5 = add_tconv("conv5", a2, width, 1);
      const int skip2 = with_delay ? add_delay("block2", b2) : b2;
      const int cat2 = add_concat("block2.concat", conv5, skip2);
      const int shuf2 = add_shuffle("block2.shuffle", cat2);
      g.taps_.push_back({"block2", conv5, skip2, shuf2,
                         with_delay
                             ? g.nodes_[static_cast<size_t>(skip2)].theta_slot
                             : -1});
      break;
    }
  }
  g.output_node_ = add_dense("fc", prev(), cfg.classes);
  return g;
}

// ---------------------------------------------------------------------------
// Forward
// ---------------------------------------------------------------------------

void Graph::forward(const TimeTensor& input, bool training, bool record_tape,
                    Workspace& ws, int workers, int override_node,
                    const TimeTensor* override_value) {
  const int n_nodes = static_cast<int>(nodes_.size());
  if (input.channels() != config_.in_channels ||
      input.height() != config_.in_height ||
      input.width() != config_.in_width)
    throw ConfigError("forward: input shape does not match the model config");
  ws.acts.resize(static_cast<size_t>(n_nodes));
  ws.tapes.resize(static_cast<size_t>(n_nodes));
  ws.has_tape = record_tape;
  ws.batch = input.batch();

  for (int id = 0; id < n_nodes; ++id) {
    const NodeSpec& n = nodes_[static_cast<size_t>(id)];
    TimeTensor& out = ws.acts[static_cast<size_t>(id)];
    NodeTape& tape = ws.tapes[static_cast<size_t>(id)];
    auto in0 = [&]() -> const TimeTensor& {
      return ws.acts[static_cast<size_t>(n.inputs[0])];
    };
    switch (n.kind) {
      case NodeKind::kInput:
        out.reshape(input.dims);
        out.v = input.v;
        break;
      case NodeKind::kEncoder: {
        EncoderParams p = encoder_view();
        encoder_forward(n.conv, in0(), p, training, out,
                        record_tape ? &tape.encoder : nullptr, workers);
        if (training) encoder_writeback(p);
        break;
      }
      case NodeKind::kTemporalConv:
      case NodeKind::kTemporalDense:
        temporal_conv_forward(
            n.conv, in0(), params_[static_cast<size_t>(n.weight_slot)].value,
            out, record_tape ? &tape.temporal : nullptr, workers);
        break;
      case NodeKind::kMinPool:
        min_pool_forward(n.pool, in0(), out,
                         record_tape ? &tape.pool : nullptr, workers);
        break;
      case NodeKind::kSplitLo:
      case NodeKind::kSplitHi: {
        const TimeTensor& src = in0();
        const Eigen::Index half = src.sample_size() / 2;
        const Eigen::Index off = n.kind == NodeKind::kSplitHi ? half : 0;
        out.reshape({ws.batch, n.out_c, n.out_h, n.out_w});
        for (int b = 0; b < ws.batch; ++b)
          out.sample(b) = src.sample(b).segment(off, half);
        break;
      }
      case NodeKind::kConcat: {
        const TimeTensor& a = ws.acts[static_cast<size_t>(n.inputs[0])];
        const TimeTensor& bb = ws.acts[static_cast<size_t>(n.inputs[1])];
        out.reshape({ws.batch, n.out_c, n.out_h, n.out_w});
        for (int b = 0; b < ws.batch; ++b) {
          out.sample(b).segment(0, a.sample_size()) = a.sample(b);
          out.sample(b).segment(a.sample_size(), bb.sample_size()) =
              bb.sample(b);
        }
        break;
      }
      case NodeKind::kShuffle: {
        const TimeTensor& src = in0();
        const int groups = n.shuffle_groups;
        const int per = n.out_c / groups;
        const Eigen::Index plane =
            static_cast<Eigen::Index>(n.out_h) * n.out_w;
        out.reshape({ws.batch, n.out_c, n.out_h, n.out_w});
        for (int b = 0; b < ws.batch; ++b) {
          auto s = src.sample(b);
          auto d = out.sample(b);
          for (int gi = 0; gi < groups; ++gi)
            for (int j = 0; j < per; ++j)
              d.segment((static_cast<Eigen::Index>(j) * groups + gi) * plane,
                        plane) =
                  s.segment((static_cast<Eigen::Index>(gi) * per + j) * plane,
                            plane);
        }
        break;
      }
      case NodeKind::kAdd: {
        const TimeTensor& a = ws.acts[static_cast<size_t>(n.inputs[0])];
        const TimeTensor& bb = ws.acts[static_cast<size_t>(n.inputs[1])];
        out.reshape({ws.batch, n.out_c, n.out_h, n.out_w});
        out.v = a.v + bb.v;
        break;
      }
      case NodeKind::kTile: {
        const TimeTensor& src = in0();
        const Eigen::Index block = src.sample_size();
        out.reshape({ws.batch, n.out_c, n.out_h, n.out_w});
        for (int b = 0; b < ws.batch; ++b)
          for (int f = 0; f < n.tile_factor; ++f)
            out.sample(b).segment(f * block, block) = src.sample(b);
        break;
      }
      case NodeKind::kDelay: {
        const Eigen::ArrayXd& theta =
            params_[static_cast<size_t>(n.theta_slot)].value;
        if ((theta < 0.0).any())
          throw std::logic_error("delay parameters must stay non-negative");
        const TimeTensor& src = in0();
        const Eigen::Index plane =
            static_cast<Eigen::Index>(n.out_h) * n.out_w;
        out.reshape({ws.batch, n.out_c, n.out_h, n.out_w});
        for (int b = 0; b < ws.batch; ++b) {
          auto s = src.sample(b);
          auto d = out.sample(b);
          switch (n.delay_gran) {
            case DelayGranularity::kLayer:
              d = s + theta[0];
              break;
            case DelayGranularity::kChannel:
              for (int c = 0; c < n.out_c; ++c)
                d.segment(c * plane, plane) =
                    s.segment(c * plane, plane) + theta[c];
              break;
            case DelayGranularity::kPixel:
              for (int c = 0; c < n.out_c; ++c)
                d.segment(c * plane, plane) =
                    s.segment(c * plane, plane) + theta;
              break;
          }
        }
        break;
      }
    }
    if (id == override_node && override_value != nullptr) {
      if (!out.same_shape(*override_value))
        throw std::logic_error("override tensor shape mismatch");
      out.v = override_value->v;
    }
  }
}

// ---------------------------------------------------------------------------
// Backward
// ---------------------------------------------------------------------------

void Graph::zero_grads(Workspace& ws) const {
  ws.grads.resize(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    ws.grads[i].reshape(ws.acts[i].dims);
    ws.grads[i].set_zero();
  }
  ws.param_grads.resize(params_.size());
  for (size_t i = 0; i < params_.size(); ++i) {
    if (ws.param_grads[i].size() != params_[i].count())
      ws.param_grads[i].resize(params_[i].count());
    ws.param_grads[i].setZero();
  }
}

void Graph::backward(Workspace& ws, int workers) {
  if (!ws.has_tape)
    throw std::logic_error("backward requires a taped forward pass");
  for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
    const NodeSpec& n = nodes_[static_cast<size_t>(id)];
    TimeTensor& g_out = ws.grads[static_cast<size_t>(id)];
    const TimeTensor& out = ws.acts[static_cast<size_t>(id)];
    NodeTape& tape = ws.tapes[static_cast<size_t>(id)];
    auto gin = [&](int k) -> TimeTensor& {
      return ws.grads[static_cast<size_t>(n.inputs[static_cast<size_t>(k)])];
    };
    auto ain = [&](int k) -> const TimeTensor& {
      return ws.acts[static_cast<size_t>(n.inputs[static_cast<size_t>(k)])];
    };
    switch (n.kind) {
      case NodeKind::kInput:
        break;
      case NodeKind::kEncoder: {
        EncoderParams p = encoder_view();
        encoder_backward(n.conv, ain(0), p, g_out, tape.encoder,
                         ws.param_grads[static_cast<size_t>(n.enc_w)],
                         ws.param_grads[static_cast<size_t>(n.enc_b)],
                         ws.param_grads[static_cast<size_t>(n.enc_gamma)],
                         ws.param_grads[static_cast<size_t>(n.enc_beta)],
                         workers);
        break;
      }
      case NodeKind::kTemporalConv:
      case NodeKind::kTemporalDense:
        temporal_conv_backward(
            n.conv, ain(0), params_[static_cast<size_t>(n.weight_slot)].value,
            out, g_out, tape.temporal, gin(0),
            ws.param_grads[static_cast<size_t>(n.weight_slot)], workers);
        break;
      case NodeKind::kMinPool:
        min_pool_backward(n.pool, g_out, tape.pool, gin(0), workers);
        break;
      case NodeKind::kSplitLo:
      case NodeKind::kSplitHi: {
        TimeTensor& dst = gin(0);
        const Eigen::Index half = out.sample_size();
        const Eigen::Index off = n.kind == NodeKind::kSplitHi ? half : 0;
        for (int b = 0; b < ws.batch; ++b)
          dst.sample(b).segment(off, half) += g_out.sample(b);
        break;
      }
      case NodeKind::kConcat: {
        TimeTensor& da = gin(0);
        TimeTensor& db = gin(1);
        const Eigen::Index na = da.sample_size();
        const Eigen::Index nb = db.sample_size();
        for (int b = 0; b < ws.batch; ++b) {
          da.sample(b) += g_out.sample(b).segment(0, na);
          db.sample(b) += g_out.sample(b).segment(na, nb);
        }
        break;
      }
      case NodeKind::kShuffle: {
        TimeTensor& dst = gin(0);
        const int groups = n.shuffle_groups;
        const int per = n.out_c / groups;
        const Eigen::Index plane =
            static_cast<Eigen::Index>(n.out_h) * n.out_w;
        for (int b = 0; b < ws.batch; ++b) {
          auto d = dst.sample(b);
          auto go = g_out.sample(b);
          for (int gi = 0; gi < groups; ++gi)
            for (int j = 0; j < per; ++j)
              d.segment((static_cast<Eigen::Index>(gi) * per + j) * plane,
                        plane) +=
                  go.segment(
                      (static_cast<Eigen::Index>(j) * groups + gi) * plane,
                      plane);
        }
        break;
      }
      case NodeKind::kAdd: {
        // Time addition: d/da = d/db = 1 where the sum is finite.
        TimeTensor& da = gin(0);
        TimeTensor& db = gin(1);
        for (int b = 0; b < ws.batch; ++b) {
          auto go = g_out.sample(b);
          auto o = out.sample(b);
          const auto masked = (o.isFinite()).select(go, 0.0);
          da.sample(b) += masked;
          db.sample(b) += masked;
        }
        break;
      }
      case NodeKind::kTile: {
        TimeTensor& dst = gin(0);
        const Eigen::Index block = dst.sample_size();
        for (int b = 0; b < ws.batch; ++b)
          for (int f = 0; f < n.tile_factor; ++f)
            dst.sample(b) += g_out.sample(b).segment(f * block, block);
        break;
      }
      case NodeKind::kDelay: {
        TimeTensor& dst = gin(0);
        Eigen::ArrayXd& dtheta =
            ws.param_grads[static_cast<size_t>(n.theta_slot)];
        const Eigen::Index plane =
            static_cast<Eigen::Index>(n.out_h) * n.out_w;
        for (int b = 0; b < ws.batch; ++b) {
          auto go = g_out.sample(b);
          auto o = out.sample(b);
          const Eigen::ArrayXd masked = (o.isFinite()).select(go, 0.0);
          dst.sample(b) += masked;
          switch (n.delay_gran) {
            case DelayGranularity::kLayer:
              dtheta[0] += masked.sum();
              break;
            case DelayGranularity::kChannel:
              for (int c = 0; c < n.out_c; ++c)
                dtheta[c] += masked.segment(c * plane, plane).sum();
              break;
            case DelayGranularity::kPixel:
              for (int c = 0; c < n.out_c; ++c)
                dtheta += masked.segment(c * plane, plane);
              break;
          }
        }
        break;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Selection fingerprint
// ---------------------------------------------------------------------------

std::uint64_t Graph::selection_fingerprint(const Workspace& ws) const {
  std::uint64_t h = kFnvOffset;
  for (size_t id = 0; id < nodes_.size(); ++id) {
    const NodeSpec& n = nodes_[id];
    const NodeTape& tape = ws.tapes[id];
    switch (n.kind) {
      case NodeKind::kTemporalConv:
      case NodeKind::kTemporalDense: {
        const int locs = n.conv.out_locs();
        const int window = n.conv.window();
        for (int b = 0; b < ws.batch; ++b) {
          for (int loc = 0; loc < locs; ++loc) {
            const size_t li = static_cast<size_t>(b) * locs + loc;
            const int nv = tape.temporal.n_valid[li];
            fnv_mix(h, static_cast<std::uint64_t>(nv));
            const std::uint16_t* perm =
                tape.temporal.perm.data() + li * window;
            for (int i = 0; i < nv; ++i)
              fnv_mix(h, static_cast<std::uint64_t>(perm[i]));
            for (int f = 0; f < n.out_c; ++f)
              fnv_mix(h, tape.temporal.k_causal[li * n.out_c + f]);
          }
        }
        break;
      }
      case NodeKind::kMinPool:
        for (std::int32_t a : tape.pool.argmin)
          fnv_mix(h, static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)));
        break;
      case NodeKind::kEncoder: {
        // ReLU gate signs: y > 0 with y rebuilt from the taped stats.
        const Eigen::Index locs = n.conv.out_locs();
        const Eigen::ArrayXd inv_std =
            (tape.encoder.var + kBnEps).sqrt().inverse();
        const Eigen::ArrayXd& gamma =
            params_[static_cast<size_t>(n.enc_gamma)].value;
        const Eigen::ArrayXd& beta =
            params_[static_cast<size_t>(n.enc_beta)].value;
        for (int b = 0; b < ws.batch; ++b) {
          for (int c = 0; c < n.out_c; ++c) {
            Eigen::Map<const Eigen::ArrayXd> x(
                tape.encoder.conv_out.sample(b).data() + c * locs, locs);
            std::uint64_t bits = 0;
            for (Eigen::Index i = 0; i < locs; ++i) {
              const double y =
                  gamma[c] * (x[i] - tape.encoder.mu[c]) * inv_std[c] +
                  beta[c];
              bits = (bits << 1) | (y > 0.0 ? 1u : 0u);
              if ((i & 63) == 63) {
                fnv_mix(h, bits);
                bits = 0;
              }
            }
            fnv_mix(h, bits);
          }
        }
        break;
      }
      default:
        break;
    }
  }
  return h;
}

}  // namespace ttfs

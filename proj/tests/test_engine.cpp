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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ttfs/checkpoint.hpp"
#include "ttfs/graph.hpp"
#include "ttfs/losses.hpp"
#include "ttfs/rng.hpp"

using namespace ttfs;

namespace {

TimeTensor random_image(int batch, int c, int h, int w, std::uint64_t seed) {
  TimeTensor t({batch, c, h, w});
  Rng rng(seed);
  for (Eigen::Index i = 0; i < t.v.size(); ++i) t.v[i] = rng.uniform();
  return t;
}

const ArchKind kAllArchs[] = {ArchKind::kBaseline, ArchKind::kAddSkip,
                              ArchKind::kConcatSkip,
                              ArchKind::kConcatSkipDelay};

}  // namespace

TEST_CASE("fresh networks fire at every scale used here") {
  struct Probe {
    ArchKind arch;
    int hw, width, classes;
  };
  const Probe probes[] = {
      {ArchKind::kBaseline, 64, 32, 9},
      {ArchKind::kBaseline, 28, 32, 10},
      {ArchKind::kAddSkip, 28, 8, 10},
      {ArchKind::kConcatSkip, 24, 8, 4},
      {ArchKind::kConcatSkipDelay, 64, 32, 9},
  };
  for (const Probe& p : probes) {
    CAPTURE(to_string(p.arch));
    CAPTURE(p.hw);
    ModelConfig mc = make_architecture(p.arch, 1, p.hw, p.hw, p.classes,
                                       DelayGranularity::kChannel, 0.5,
                                       p.width);
    Graph g = Graph::build(mc, 7);
    TimeTensor in = random_image(4, 1, p.hw, p.hw, 11);
    Workspace ws;
    g.forward(in, false, false, ws, 1);
    const TimeTensor& out = ws.acts[static_cast<size_t>(g.output_node())];
    Eigen::Index finite = 0;
    for (Eigen::Index i = 0; i < out.v.size(); ++i)
      if (std::isfinite(out.v[i])) ++finite;
    CHECK(finite == out.v.size());
  }
}

TEST_CASE("silencing every kernel silences the output") {
  ModelConfig mc = make_architecture(ArchKind::kBaseline, 1, 24, 24, 4,
                                     DelayGranularity::kChannel, 0.5, 8);
  Graph g = Graph::build(mc, 3);
  for (int id : g.temporal_nodes()) {
    ParamSlot& s = g.params()[static_cast<size_t>(
        g.nodes()[static_cast<size_t>(id)].weight_slot)];
    s.value.setConstant(1e-4);  // row sums far below the firing threshold
  }
  TimeTensor in = random_image(3, 1, 24, 24, 5);
  Workspace ws;
  g.forward(in, false, false, ws, 1);
  const TimeTensor& out = ws.acts[static_cast<size_t>(g.output_node())];
  for (Eigen::Index i = 0; i < out.v.size(); ++i)
    CHECK(out.v[i] == kNoSpike);
  // Cross-entropy still evaluates (sentinels clamp to the horizon) and the
  // timing gradient stays zero: nothing fires, nothing moves.
  std::vector<int> labels = {0, 1, 2};
  g.zero_grads(ws);
  LossBreakdown lb = apply_losses(g, ws, labels, 1.0, 1e-6, true);
  CHECK(lb.ce == doctest::Approx(std::log(4.0)));
  const TimeTensor& gout = ws.grads[static_cast<size_t>(g.output_node())];
  for (Eigen::Index i = 0; i < gout.v.size(); ++i) CHECK(gout.v[i] == 0.0);
}

TEST_CASE("config rejects odd widths on split architectures") {
  // Channel split needs an even count at the split point.
  ModelConfig mc = make_architecture(ArchKind::kConcatSkip, 1, 24, 24, 4,
                                     DelayGranularity::kChannel, 0.5, 8);
  mc.width = 7;
  CHECK_THROWS_AS(Graph::build(mc, 1), ConfigError);
}

TEST_CASE("config rejects nonpositive dimensions") {
  ModelConfig mc = make_architecture(ArchKind::kBaseline, 1, 24, 24, 4);
  mc.in_height = 0;
  CHECK_THROWS_AS(Graph::build(mc, 1), ConfigError);
  mc = make_architecture(ArchKind::kBaseline, 1, 24, 24, 4);
  mc.classes = 1;
  CHECK_THROWS_AS(Graph::build(mc, 1), ConfigError);
  mc = make_architecture(ArchKind::kBaseline, 1, 24, 24, 4);
  mc.width = 0;
  CHECK_THROWS_AS(Graph::build(mc, 1), ConfigError);
}

TEST_CASE("input spikes shifted by delta shift every surviving output") {
  // Injecting times directly past the encoder isolates the temporal part,
  // which commutes with a global time shift. Outputs pushed past the
  // horizon by the shift are exempt (they saturate to the sentinel).
  for (ArchKind arch : {ArchKind::kBaseline, ArchKind::kConcatSkipDelay}) {
    CAPTURE(to_string(arch));
    ModelConfig mc = make_architecture(arch, 1, 24, 24, 4,
                                       DelayGranularity::kChannel, 0.5, 8);
    Graph g = Graph::build(mc, 21);
    const int enc = g.encoder_node();
    const NodeSpec& en = g.nodes()[static_cast<size_t>(enc)];

    const int batch = 2;
    TimeTensor base({batch, en.out_c, en.out_h, en.out_w});
    Rng rng(77);
    for (Eigen::Index i = 0; i < base.v.size(); ++i)
      base.v[i] = rng.uniform(0.0, 1.5);
    TimeTensor dummy = random_image(batch, 1, 24, 24, 1);

    for (double delta : {0.1, 1.0}) {
      CAPTURE(delta);
      TimeTensor shifted = base;
      shifted.v += delta;

      Workspace wa, wb;
      g.forward(dummy, false, false, wa, 1, enc, &base);
      g.forward(dummy, false, false, wb, 1, enc, &shifted);
      const TimeTensor& oa = wa.acts[static_cast<size_t>(g.output_node())];
      const TimeTensor& ob = wb.acts[static_cast<size_t>(g.output_node())];
      REQUIRE(oa.v.size() == ob.v.size());
      int compared = 0;
      for (Eigen::Index i = 0; i < oa.v.size(); ++i) {
        if (!std::isfinite(oa.v[i])) {
          CHECK(!std::isfinite(ob.v[i]));
          continue;
        }
        if (oa.v[i] + delta >= kSpikeHorizon) continue;
        CHECK(ob.v[i] == doctest::Approx(oa.v[i] + delta).epsilon(1e-9));
        ++compared;
      }
      CHECK(compared > 0);
    }
  }
}

TEST_CASE("forward and backward are worker-count independent") {
  ModelConfig mc = make_architecture(ArchKind::kConcatSkipDelay, 1, 24, 24, 4,
                                     DelayGranularity::kChannel, 0.5, 8);
  Graph g = Graph::build(mc, 9);
  TimeTensor in = random_image(6, 1, 24, 24, 13);
  std::vector<int> labels = {0, 1, 2, 3, 0, 1};

  auto run = [&](int workers) {
    Workspace ws;
    g.forward(in, true, true, ws, workers);
    g.zero_grads(ws);
    apply_losses(g, ws, labels, 1.0, 1e-6, true);
    g.backward(ws, workers);
    return ws;
  };
  Workspace w1 = run(1);
  Workspace w4 = run(4);

  const TimeTensor& o1 = w1.acts[static_cast<size_t>(g.output_node())];
  const TimeTensor& o4 = w4.acts[static_cast<size_t>(g.output_node())];
  for (Eigen::Index i = 0; i < o1.v.size(); ++i) {
    const bool same_bits =
        (o1.v[i] == o4.v[i]) ||
        (std::isnan(o1.v[i]) && std::isnan(o4.v[i]));
    CHECK(same_bits);
  }
  REQUIRE(w1.param_grads.size() == w4.param_grads.size());
  for (size_t s = 0; s < w1.param_grads.size(); ++s)
    for (Eigen::Index i = 0; i < w1.param_grads[s].size(); ++i)
      CHECK(w1.param_grads[s][i] == w4.param_grads[s][i]);
}

TEST_CASE("samples in a batch do not interact") {
  ModelConfig mc = make_architecture(ArchKind::kAddSkip, 1, 24, 24, 4,
                                     DelayGranularity::kChannel, 0.5, 8);
  Graph g = Graph::build(mc, 15);
  TimeTensor both = random_image(2, 1, 24, 24, 19);
  TimeTensor one({1, 1, 24, 24});
  Workspace wb, w0, w1;
  g.forward(both, false, false, wb, 2);
  const TimeTensor& ob = wb.acts[static_cast<size_t>(g.output_node())];

  for (int s = 0; s < 2; ++s) {
    one.v = both.v.segment(static_cast<Eigen::Index>(s) * one.sample_size(),
                           one.sample_size());
    Workspace ws;
    g.forward(one, false, false, ws, 1);
    const TimeTensor& o = ws.acts[static_cast<size_t>(g.output_node())];
    for (Eigen::Index i = 0; i < o.v.size(); ++i) {
      const double got = ob.v[static_cast<Eigen::Index>(s) * o.v.size() + i];
      const bool same = (got == o.v[i]) ||
                        (std::isinf(got) && std::isinf(o.v[i]));
      CHECK(same);
    }
  }
}

TEST_CASE("gradient check passes on every architecture") {
  for (ArchKind arch : kAllArchs) {
    CAPTURE(to_string(arch));
    ModelConfig mc = make_architecture(arch, 1, 24, 24, 4,
                                       DelayGranularity::kChannel, 0.5, 8);
    Graph g = Graph::build(mc, 3);
    TimeTensor in = random_image(4, 1, 24, 24, 23);
    std::vector<int> labels = {0, 1, 2, 3};
    GradCheckReport r = finite_diff_check(g, in, labels, 1.0, 1e-6, 1e-4, 30,
                                          5, 1);
    CAPTURE(r.max_rel_err);
    CHECK(r.evaluated > 0);
    CHECK(r.max_rel_err < 1e-3);
  }
}

TEST_CASE("checkpoint round trip reproduces the forward pass bit for bit") {
  for (ArchKind arch : {ArchKind::kBaseline, ArchKind::kConcatSkipDelay}) {
    CAPTURE(to_string(arch));
    ModelConfig mc = make_architecture(arch, 1, 24, 24, 4,
                                       DelayGranularity::kChannel, 0.5, 8);
    Graph g = Graph::build(mc, 31);
    const std::string path = "engine_ckpt_roundtrip.ckpt";
    save_checkpoint(path, g, 17);
    LoadedCheckpoint lc = load_checkpoint(path);
    CHECK(lc.epoch == 17);
    CHECK(!lc.has_optimizer);

    TimeTensor in = random_image(3, 1, 24, 24, 37);
    Workspace wa, wb;
    g.forward(in, false, false, wa, 1);
    lc.graph.forward(in, false, false, wb, 1);
    const TimeTensor& oa = wa.acts[static_cast<size_t>(g.output_node())];
    const TimeTensor& ob =
        wb.acts[static_cast<size_t>(lc.graph.output_node())];
    REQUIRE(oa.v.size() == ob.v.size());
    for (Eigen::Index i = 0; i < oa.v.size(); ++i) {
      const bool same = (oa.v[i] == ob.v[i]) ||
                        (std::isinf(oa.v[i]) && std::isinf(ob.v[i]));
      CHECK(same);
    }
    std::remove(path.c_str());
  }
}

TEST_CASE("selection fingerprint is stable and input sensitive") {
  ModelConfig mc = make_architecture(ArchKind::kBaseline, 1, 24, 24, 4,
                                     DelayGranularity::kChannel, 0.5, 8);
  Graph g = Graph::build(mc, 41);
  TimeTensor a = random_image(2, 1, 24, 24, 1);
  TimeTensor b = random_image(2, 1, 24, 24, 2);
  Workspace w1, w2, w3;
  g.forward(a, true, true, w1, 1);
  g.forward(a, true, true, w2, 1);
  g.forward(b, true, true, w3, 1);
  CHECK(g.selection_fingerprint(w1) == g.selection_fingerprint(w2));
  CHECK(g.selection_fingerprint(w1) != g.selection_fingerprint(w3));
}

TEST_CASE("architectures expose the expected parameter inventory") {
  for (ArchKind arch : kAllArchs) {
    CAPTURE(to_string(arch));
    ModelConfig mc = make_architecture(arch, 1, 24, 24, 4,
                                       DelayGranularity::kChannel, 0.5, 8);
    Graph g = Graph::build(mc, 1);
    CHECK(g.temporal_nodes().size() == 5);  // conv2..conv5 + head
    CHECK(g.param_index("enc.w") >= 0);
    CHECK(g.param_index("fc.w") >= 0);
    const bool wants_delay = (arch == ArchKind::kConcatSkipDelay);
    const bool has_theta = g.param_index("block1.theta") >= 0 &&
                           g.param_index("block2.theta") >= 0;
    CHECK(has_theta == wants_delay);
    const size_t taps = g.overlap_taps().size();
    if (arch == ArchKind::kConcatSkip || arch == ArchKind::kConcatSkipDelay)
      CHECK(taps == 2);
    else
      CHECK(taps == 0);
  }
}

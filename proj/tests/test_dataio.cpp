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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ttfs/checkpoint.hpp"
#include "ttfs/config_io.hpp"
#include "ttfs/dataset.hpp"
#include "ttfs/graph.hpp"
#include "ttfs/rng.hpp"

using namespace ttfs;

namespace {

Dataset small_dataset(int n, int h, int w, int classes, std::uint64_t seed) {
  Dataset ds;
  ds.images.reshape({n, 1, h, w});
  Rng rng(seed);
  for (Eigen::Index i = 0; i < ds.images.v.size(); ++i)
    ds.images.v[i] = rng.uniform_f32(0.0, 1.0);
  ds.labels.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    ds.labels[static_cast<size_t>(i)] =
        static_cast<std::uint16_t>(rng.integer(classes));
  ds.classes = classes;
  return ds;
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Minimal IDX pair for reader tests.
void write_idx_pair(const std::string& img_path, const std::string& lbl_path,
                    int n, int h, int w) {
  auto be32 = [](std::ofstream& o, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8)
      o.put(static_cast<char>((v >> s) & 0xff));
  };
  std::ofstream img(img_path, std::ios::binary);
  be32(img, 0x00000803);
  be32(img, static_cast<std::uint32_t>(n));
  be32(img, static_cast<std::uint32_t>(h));
  be32(img, static_cast<std::uint32_t>(w));
  for (int i = 0; i < n * h * w; ++i)
    img.put(static_cast<char>(i % 251));
  img.close();
  std::ofstream lbl(lbl_path, std::ios::binary);
  be32(lbl, 0x00000801);
  be32(lbl, static_cast<std::uint32_t>(n));
  for (int i = 0; i < n; ++i) lbl.put(static_cast<char>(i % 7));
}

}  // namespace

TEST_CASE("dataset container round trips bit for bit") {
  Dataset ds = small_dataset(13, 9, 11, 5, 3);
  const std::string path = "dataio_roundtrip.ttfs";
  write_dataset(ds, path);
  Dataset back = read_dataset(path);
  CHECK(back.n() == 13);
  CHECK(back.classes == 5);
  CHECK(back.images.dims == ds.images.dims);
  CHECK((back.images.v == ds.images.v).all());
  CHECK(back.labels == ds.labels);
  std::remove(path.c_str());
}

TEST_CASE("dataset reader rejects tampering") {
  Dataset ds = small_dataset(4, 6, 6, 3, 1);
  const std::string path = "dataio_tamper.ttfs";
  write_dataset(ds, path);
  std::vector<char> bytes = slurp(path);

  SUBCASE("bad magic") {
    bytes[2] ^= 0x40;
    spit(path, bytes);
    CHECK_THROWS_AS(read_dataset(path), IoError);
  }
  SUBCASE("flipped payload byte breaks the checksum") {
    bytes[bytes.size() / 2] ^= 0x01;
    spit(path, bytes);
    CHECK_THROWS_AS(read_dataset(path), IntegrityError);
  }
  SUBCASE("truncation") {
    bytes.resize(bytes.size() - 7);
    spit(path, bytes);
    CHECK_THROWS(read_dataset(path));
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_dataset("no_such_dir/none.ttfs"), IoError);
  }
  std::remove(path.c_str());
}

TEST_CASE("checkpoint file is stable across save-load-save") {
  ModelConfig mc = make_architecture(ArchKind::kConcatSkipDelay, 1, 20, 20, 4,
                                     DelayGranularity::kChannel, 0.5, 8);
  Graph g = Graph::build(mc, 77);
  const std::string p1 = "dataio_ck1.ckpt", p2 = "dataio_ck2.ckpt";

  AdamState st;
  st.init(g.params());
  st.step = 42;
  save_checkpoint(p1, g, 3, &st);
  LoadedCheckpoint lc = load_checkpoint(p1);
  CHECK(lc.epoch == 3);
  CHECK(lc.has_optimizer);
  CHECK(lc.optimizer.step == 42);
  REQUIRE(lc.optimizer.m.size() == g.params().size());

  save_checkpoint(p2, lc.graph, lc.epoch, &lc.optimizer);
  CHECK(slurp(p1) == slurp(p2));

  // Loaded config reproduces the architecture.
  CHECK(lc.graph.params().size() == g.params().size());
  for (size_t s = 0; s < g.params().size(); ++s) {
    CHECK(lc.graph.params()[s].name == g.params()[s].name);
    CHECK((lc.graph.params()[s].value == g.params()[s].value).all());
  }
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("checkpoint reader rejects tampering") {
  ModelConfig mc = make_architecture(ArchKind::kBaseline, 1, 20, 20, 4,
                                     DelayGranularity::kChannel, 0.5, 8);
  Graph g = Graph::build(mc, 5);
  const std::string path = "dataio_ck_tamper.ckpt";
  save_checkpoint(path, g, 0);
  std::vector<char> bytes = slurp(path);

  SUBCASE("bad magic") {
    bytes[0] ^= 0x01;
    spit(path, bytes);
    CHECK_THROWS_AS(load_checkpoint(path), IoError);
  }
  SUBCASE("payload corruption") {
    bytes[bytes.size() / 2] ^= 0x10;
    spit(path, bytes);
    CHECK_THROWS_AS(load_checkpoint(path), IntegrityError);
  }
  std::remove(path.c_str());
}

TEST_CASE("idx reader loads images scaled to unit range") {
  const std::string img = "dataio_imgs.idx", lbl = "dataio_lbls.idx";
  write_idx_pair(img, lbl, 10, 5, 4);
  Dataset ds = read_idx_dataset(img, lbl);
  CHECK(ds.n() == 10);
  CHECK(ds.images.dims == std::vector<int>({10, 1, 5, 4}));
  CHECK(ds.classes == 7);  // max label 6
  CHECK(ds.images.v.minCoeff() >= 0.0);
  CHECK(ds.images.v.maxCoeff() <= 1.0);
  // Pixel k holds raw byte k%251 scaled by 1/255.
  CHECK(ds.images.v[7] == doctest::Approx(7.0 / 255.0).epsilon(1e-7));
  std::remove(img.c_str());
  std::remove(lbl.c_str());
}

TEST_CASE("idx reader rejects malformed headers") {
  const std::string img = "dataio_imgs2.idx", lbl = "dataio_lbls2.idx";
  write_idx_pair(img, lbl, 6, 3, 3);

  SUBCASE("wrong image magic") {
    std::vector<char> bytes = slurp(img);
    bytes[3] = 0x01;  // claims labels, not images
    spit(img, bytes);
    CHECK_THROWS_AS(read_idx_dataset(img, lbl), IoError);
  }
  SUBCASE("count mismatch between images and labels") {
    const std::string lbl_short = "dataio_lbls3.idx";
    write_idx_pair("dataio_imgs3.idx", lbl_short, 5, 3, 3);
    CHECK_THROWS_AS(read_idx_dataset(img, lbl_short), IoError);
    std::remove("dataio_imgs3.idx");
    std::remove(lbl_short.c_str());
  }
  SUBCASE("truncated pixel payload") {
    std::vector<char> bytes = slurp(img);
    bytes.resize(bytes.size() - 5);
    spit(img, bytes);
    CHECK_THROWS_AS(read_idx_dataset(img, lbl), IoError);
  }
  std::remove(img.c_str());
  std::remove(lbl.c_str());
}

TEST_CASE("dataset head truncates and clamps") {
  Dataset ds = small_dataset(10, 4, 4, 3, 9);
  Dataset h = dataset_head(ds, 4);
  CHECK(h.n() == 4);
  CHECK(h.classes == 3);
  CHECK(h.labels == std::vector<std::uint16_t>(ds.labels.begin(),
                                               ds.labels.begin() + 4));
  CHECK((h.images.v == ds.images.v.segment(0, h.images.v.size())).all());
  CHECK(dataset_head(ds, 99).n() == 10);
}

TEST_CASE("config parser applies defaults and round trips") {
  RunConfig c = parse_config(R"({
    "model": {"architecture": "concat_skip_delay", "width": 16,
               "input": [1, 32, 32], "classes": 4},
    "train": {"epochs": 7, "lr0": 0.001}
  })");
  CHECK(c.model.arch == ArchKind::kConcatSkipDelay);
  CHECK(c.model.width == 16);
  CHECK(c.model.in_height == 32);
  CHECK(c.model.classes == 4);
  CHECK(c.train.epochs == 7);
  CHECK(c.train.lr0 == 0.001);
  // Untouched fields keep their defaults.
  CHECK(c.train.batch_size == 128);
  CHECK(c.train.weight_decay == 1e-3);
  CHECK(c.train.lambda1 == 1.0);
  CHECK(c.train.lambda2 == 1e-6);
  CHECK(c.model.delay_init == 0.5);

  RunConfig back = parse_config(config_to_json(c));
  CHECK(back.model.arch == c.model.arch);
  CHECK(back.model.width == c.model.width);
  CHECK(back.train.epochs == c.train.epochs);
  CHECK(back.train.lr0 == c.train.lr0);
}

TEST_CASE("config parser pinpoints unknown keys by path") {
  try {
    parse_config(R"({"model": {"architecture": "baseline", "depth": 9}})");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("/model/depth") != std::string::npos);
  }
  try {
    parse_config(R"({"trian": {}})");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/trian") != std::string::npos);
  }
}

TEST_CASE("config parser rejects bad types and values") {
  CHECK_THROWS_AS(parse_config(R"({"model": {"width": "wide"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"width": 7}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"classes": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"train": {"lr0": -0.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"train": {"epochs": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"delay_init": -1.0}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"architecture": "resnet"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("not json at all"), ConfigError);
  CHECK_THROWS_AS(load_config("no_such_file.json"), IoError);
}

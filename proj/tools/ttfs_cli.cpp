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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ttfs/checkpoint.hpp"
#include "ttfs/config_io.hpp"
#include "ttfs/dataset.hpp"
#include "ttfs/metrics.hpp"
#include "ttfs/rng.hpp"
#include "ttfs/trainer.hpp"
#include "ttfs/wave.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Loads one split from a data directory: native containers first, the
// common IDX layout (train-images-idx3-ubyte, ...) as a fallback.
ttfs::Dataset load_split(const std::string& dir, bool train) {
  const fs::path root(dir);
  const fs::path native = root / (train ? "train.ttfs" : "test.ttfs");
  if (fs::exists(native)) return ttfs::read_dataset(native.string());
  const char* img = train ? "train-images-idx3-ubyte" : "t10k-images-idx3-ubyte";
  const char* lab = train ? "train-labels-idx1-ubyte" : "t10k-labels-idx1-ubyte";
  if (fs::exists(root / img))
    return ttfs::read_idx_dataset((root / img).string(), (root / lab).string());
  throw ttfs::IoError("no dataset found in " + dir + " (expected " +
                      native.filename().string() + " or " + img + ")");
}

int cmd_gen_wave(const ttfs::WaveConfig& wc, const std::string& out,
                 std::uint64_t seed, int workers) {
  ttfs::WaveDataset ds = ttfs::generate_wave_dataset(wc, seed, workers);
  fs::create_directories(out);
  ttfs::write_dataset(ds.train, (fs::path(out) / "train.ttfs").string());
  ttfs::write_dataset(ds.test, (fs::path(out) / "test.ttfs").string());
  std::ofstream mf(fs::path(out) / "manifest.json");
  if (!mf) throw ttfs::IoError("cannot write manifest in " + out);
  mf << ds.manifest_json << "\n";
  ordered_json j{{"train", ds.train.n()},
                 {"test", ds.test.n()},
                 {"classes", ds.train.classes},
                 {"out", out}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& data,
              const std::string& out, ttfs::RunConfig cfg, bool seed_set,
              std::uint64_t seed, bool epochs_set, int epochs, int limit_train,
              int limit_test, const std::string& init_from, int workers,
              bool quiet) {
  if (seed_set) cfg.train.seed = seed;
  if (epochs_set) cfg.train.epochs = epochs;
  cfg.train.workers = workers;
  ttfs::Dataset train = load_split(data, true);
  ttfs::Dataset test = load_split(data, false);
  if (limit_train > 0) train = ttfs::dataset_head(train, limit_train);
  if (limit_test > 0) test = ttfs::dataset_head(test, limit_test);

  cfg.model.in_channels = train.images.dims[1];
  cfg.model.in_height = train.images.dims[2];
  cfg.model.in_width = train.images.dims[3];
  cfg.model.classes = train.classes;
  ttfs::Graph g = init_from.empty()
                      ? ttfs::Graph::build(cfg.model, cfg.train.seed)
                      : ttfs::load_checkpoint(init_from).graph;

  fs::create_directories(out);
  ttfs::AdamState opt;
  ttfs::TrainResult res = ttfs::train_model(
      g, train, test, cfg.train, (fs::path(out) / "history.csv").string(),
      quiet ? nullptr : &std::cerr, &opt);
  ttfs::save_checkpoint((fs::path(out) / "model.ckpt").string(), g,
                        cfg.train.epochs, &opt);
  std::ofstream cf(fs::path(out) / "config.json");
  cf << ttfs::config_to_json(cfg) << "\n";

  const ttfs::EpochStats& last = res.history.back();
  ordered_json j{{"config", config_path},
                 {"epochs", cfg.train.epochs},
                 {"train_acc", last.train_acc},
                 {"test_acc", last.test_acc},
                 {"latency", last.latency},
                 {"checkpoint", (fs::path(out) / "model.ckpt").string()}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_gradcheck(const std::string& config_path, double eps, int n_params,
                  int batch, double tol, std::uint64_t seed, int workers) {
  ttfs::RunConfig cfg = ttfs::load_config(config_path);
  ttfs::Graph g = ttfs::Graph::build(cfg.model, seed);
  ttfs::Rng rng(seed ^ 0x9E3779B97F4A7C15ull);
  ttfs::TimeTensor input({batch, cfg.model.in_channels, cfg.model.in_height,
                          cfg.model.in_width});
  for (Eigen::Index i = 0; i < input.v.size(); ++i)
    input.v[i] = rng.uniform();
  std::vector<int> labels(static_cast<size_t>(batch));
  for (int& y : labels)
    y = static_cast<int>(rng.integer(
        static_cast<std::uint64_t>(cfg.model.classes)));

  ttfs::GradCheckReport rep = ttfs::finite_diff_check(
      g, input, labels, cfg.train.lambda1, cfg.train.lambda2, eps, n_params,
      seed, workers);
  const bool ok = rep.evaluated > 0 && rep.max_rel_err < tol;
  ordered_json j{{"architecture", ttfs::to_string(cfg.model.arch)},
                 {"eps", eps},
                 {"max_rel_err", rep.max_rel_err},
                 {"mean_rel_err", rep.mean_rel_err},
                 {"evaluated", rep.evaluated},
                 {"skipped_boundary", rep.skipped_boundary},
                 {"zero_pairs", rep.zero_pairs},
                 {"pass", ok}};
  std::cout << j.dump() << "\n";
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-to-first-spike network engine"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  int workers = 0;
  app.add_option("--seed", seed, "Global RNG seed")->capture_default_str();
  app.add_option("--workers", workers,
                 "Worker threads (0 = all hardware threads)")
      ->capture_default_str();

  // gen-wave
  auto* gen = app.add_subcommand("gen-wave", "Simulate the wave-source dataset");
  ttfs::WaveConfig wc;
  std::string out_dir;
  gen->add_option("--grid", wc.n, "Grid points per side")
      ->capture_default_str();
  gen->add_option("--zones", wc.zones, "Label zones per side")
      ->capture_default_str();
  gen->add_option("--steps", wc.n_steps, "Snapshot time step")
      ->capture_default_str();
  gen->add_option("--cfl", wc.cfl, "Courant number c*dt/dx")
      ->capture_default_str();
  gen->add_option("--border", wc.border, "Excluded source border, pixels")
      ->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->required();

  // train
  auto* tr = app.add_subcommand("train", "Train a model and write a checkpoint");
  std::string config_path, data_dir = [] {
    const char* e = std::getenv("TTFS_DATA_DIR");
    return std::string(e ? e : "");
  }();
  int epochs = 0, limit_train = 0, limit_test = 0;
  bool quiet = false;
  tr->add_option("--config", config_path, "JSON run config")->required();
  auto add_data = [&](CLI::App* c) {
    c->add_option("--data", data_dir,
                  "Dataset directory (default: $TTFS_DATA_DIR)");
  };
  add_data(tr);
  tr->add_option("--out", out_dir, "Output directory")->required();
  auto* tr_epochs = tr->add_option("--epochs", epochs, "Override epoch count");
  tr->add_option("--limit-train", limit_train, "Keep first N train samples");
  tr->add_option("--limit-test", limit_test, "Keep first N test samples");
  std::string init_from;
  tr->add_option("--init-from", init_from,
                 "Start from this checkpoint's weights instead of a fresh "
                 "initialization (optimizer starts fresh)");
  tr->add_flag("--quiet", quiet, "Suppress progress on stderr");

  // eval / energy-report / histograms share checkpoint+data plumbing.
  std::string ckpt_path, split = "test";
  int batch = 256, bins = 50;
  auto add_eval_opts = [&](CLI::App* c) {
    c->add_option("--ckpt", ckpt_path, "Model checkpoint")->required();
    add_data(c);
    c->add_option("--split", split, "Dataset split: test | train")
        ->check(CLI::IsMember({"test", "train"}))
        ->capture_default_str();
    c->add_option("--batch", batch, "Evaluation batch size")
        ->capture_default_str();
  };
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint; prints a run report");
  add_eval_opts(ev);
  auto* en = app.add_subcommand("energy-report",
                                "Print the estimated energy of a checkpoint");
  add_eval_opts(en);
  auto* hi = app.add_subcommand("histograms",
                                "Export spike-timing histograms to CSV");
  add_eval_opts(hi);
  hi->add_option("--out", out_dir, "Output directory")->required();
  hi->add_option("--bins", bins, "Histogram bins over [0, horizon]")
      ->capture_default_str();

  // gradcheck
  auto* gc = app.add_subcommand(
      "gradcheck", "Compare analytic gradients against finite differences");
  double eps = 1e-4, tol = 1e-3;
  int n_params = 200, gc_batch = 8;
  gc->add_option("--config", config_path, "JSON run config")->required();
  gc->add_option("--eps", eps, "Central-difference step")
      ->capture_default_str();
  gc->add_option("--params", n_params, "Sampled parameters")
      ->capture_default_str();
  gc->add_option("--batch", gc_batch, "Probe batch size")
      ->capture_default_str();
  gc->add_option("--tol", tol, "Max relative error to pass")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_wave(wc, out_dir, seed, workers);
    if (tr->parsed()) {
      ttfs::RunConfig cfg = ttfs::load_config(config_path);
      return cmd_train(config_path, data_dir, out_dir, cfg,
                       app.count("--seed") > 0, seed, tr_epochs->count() > 0,
                       epochs, limit_train, limit_test, init_from, workers,
                       quiet);
    }
    if (gc->parsed())
      return cmd_gradcheck(config_path, eps, n_params, gc_batch, tol, seed,
                           workers);

    // The remaining commands all start from a checkpoint + dataset.
    ttfs::LoadedCheckpoint ck = ttfs::load_checkpoint(ckpt_path);
    ttfs::Dataset ds = load_split(data_dir, split == "train");
    if (ev->parsed()) {
      ttfs::RunReport rep =
          ttfs::evaluate_report(ck.graph, ds, batch, workers);
      std::cout << rep.to_json() << "\n";
    } else if (en->parsed()) {
      ttfs::RunReport rep =
          ttfs::evaluate_report(ck.graph, ds, batch, workers);
      ordered_json j{{"e_ann_pj", rep.e_ann_pj},
                     {"e_snn_pj", rep.e_snn_pj},
                     {"energy_ratio", rep.energy_ratio}};
      std::cout << j.dump() << "\n";
    } else if (hi->parsed()) {
      fs::create_directories(out_dir);
      const std::string csv = (fs::path(out_dir) / "histograms.csv").string();
      ttfs::export_timing_histograms(ck.graph, ds, bins, csv, batch, workers);
      ordered_json j{{"csv", csv}, {"bins", bins}};
      std::cout << j.dump() << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

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

#include "ttfs/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ttfs {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
  throw ConfigError(pointer + ": " + what);
}

void check_keys(const json& obj, const std::string& pointer,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(pointer, "expected an object");
  for (const auto& [key, _] : obj.items())
    if (allowed.find(key) == allowed.end())
      fail(pointer + "/" + key, "unknown key");
}

template <class T>
T take(const json& obj, const std::string& pointer, const char* key,
       T fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    fail(pointer + "/" + key, "wrong type");
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "", {"model", "train"});
  RunConfig cfg;

  if (root.contains("model")) {
    const json& m = root.at("model");
    check_keys(m, "/model",
               {"architecture", "input", "classes", "width",
                "delay_granularity", "delay_init"});
    std::string arch = take<std::string>(m, "/model", "architecture",
                                         to_string(ArchKind::kBaseline));
    try {
      cfg.model.arch = arch_from_string(arch);
    } catch (const ConfigError&) {
      fail("/model/architecture", "unknown architecture '" + arch + "'");
    }
    if (m.contains("input")) {
      const json& in = m.at("input");
      if (!in.is_array() || in.size() != 3)
        fail("/model/input", "expected [channels, height, width]");
      for (size_t i = 0; i < 3; ++i)
        if (!in[i].is_number_integer() || in[i].get<int>() <= 0)
          fail("/model/input/" + std::to_string(i), "expected a positive int");
      cfg.model.in_channels = in[0].get<int>();
      cfg.model.in_height = in[1].get<int>();
      cfg.model.in_width = in[2].get<int>();
    }
    cfg.model.classes = take<int>(m, "/model", "classes", cfg.model.classes);
    cfg.model.width = take<int>(m, "/model", "width", cfg.model.width);
    std::string gran =
        take<std::string>(m, "/model", "delay_granularity",
                          to_string(cfg.model.delay_granularity));
    try {
      cfg.model.delay_granularity = granularity_from_string(gran);
    } catch (const ConfigError&) {
      fail("/model/delay_granularity", "unknown granularity '" + gran + "'");
    }
    cfg.model.delay_init =
        take<double>(m, "/model", "delay_init", cfg.model.delay_init);
    if (cfg.model.classes < 2) fail("/model/classes", "need at least 2");
    if (cfg.model.width < 2 || cfg.model.width % 2 != 0)
      fail("/model/width", "width must be even and >= 2");
    if (cfg.model.delay_init < 0.0)
      fail("/model/delay_init", "must be >= 0");
  }

  if (root.contains("train")) {
    const json& t = root.at("train");
    check_keys(t, "/train",
               {"epochs", "batch_size", "lr0", "weight_decay", "lambda1",
                "lambda2", "seed", "grad_clip"});
    cfg.train.epochs = take<int>(t, "/train", "epochs", cfg.train.epochs);
    cfg.train.batch_size =
        take<int>(t, "/train", "batch_size", cfg.train.batch_size);
    cfg.train.lr0 = take<double>(t, "/train", "lr0", cfg.train.lr0);
    cfg.train.weight_decay =
        take<double>(t, "/train", "weight_decay", cfg.train.weight_decay);
    cfg.train.lambda1 = take<double>(t, "/train", "lambda1", cfg.train.lambda1);
    cfg.train.lambda2 = take<double>(t, "/train", "lambda2", cfg.train.lambda2);
    cfg.train.seed = take<std::uint64_t>(t, "/train", "seed", cfg.train.seed);
    cfg.train.grad_clip =
        take<double>(t, "/train", "grad_clip", cfg.train.grad_clip);
    if (cfg.train.epochs <= 0) fail("/train/epochs", "must be positive");
    if (cfg.train.batch_size <= 0)
      fail("/train/batch_size", "must be positive");
    if (cfg.train.lr0 <= 0.0) fail("/train/lr0", "must be positive");
    if (cfg.train.weight_decay < 0.0)
      fail("/train/weight_decay", "must be >= 0");
    if (cfg.train.lambda1 < 0.0) fail("/train/lambda1", "must be >= 0");
    if (cfg.train.lambda2 < 0.0) fail("/train/lambda2", "must be >= 0");
    if (cfg.train.grad_clip < 0.0) fail("/train/grad_clip", "must be >= 0");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = json::parse(cfg.model.to_json());
  j["train"] = {{"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"lr0", cfg.train.lr0},
                {"weight_decay", cfg.train.weight_decay},
                {"lambda1", cfg.train.lambda1},
                {"lambda2", cfg.train.lambda2},
                {"seed", cfg.train.seed},
                {"grad_clip", cfg.train.grad_clip}};
  return j.dump(2);
}

}  // namespace ttfs

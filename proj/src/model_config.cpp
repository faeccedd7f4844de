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

#include "ttfs/model_config.hpp"

#include <nlohmann/json.hpp>

namespace ttfs {

using nlohmann::json;

std::string to_string(ArchKind k) {
  switch (k) {
    case ArchKind::kBaseline: return "baseline";
    case ArchKind::kAddSkip: return "add_skip";
    case ArchKind::kConcatSkip: return "concat_skip";
    case ArchKind::kConcatSkipDelay: return "concat_skip_delay";
  }
  return "baseline";
}

std::string to_string(DelayGranularity g) {
  switch (g) {
    case DelayGranularity::kLayer: return "layer";
    case DelayGranularity::kChannel: return "channel";
    case DelayGranularity::kPixel: return "pixel";
  }
  return "channel";
}

ArchKind arch_from_string(const std::string& s) {
  if (s == "baseline") return ArchKind::kBaseline;
  if (s == "add_skip") return ArchKind::kAddSkip;
  if (s == "concat_skip") return ArchKind::kConcatSkip;
  if (s == "concat_skip_delay") return ArchKind::kConcatSkipDelay;
  throw ConfigError("unknown architecture: " + s);
}

DelayGranularity granularity_from_string(const std::string& s) {
  if (s == "layer") return DelayGranularity::kLayer;
  if (s == "channel") return DelayGranularity::kChannel;
  if (s == "pixel") return DelayGranularity::kPixel;
  throw ConfigError("unknown delay granularity: " + s);
}

std::string ModelConfig::to_json() const {
  json j;
  j["architecture"] = to_string(arch);
  j["input"] = {in_channels, in_height, in_width};
  j["classes"] = classes;
  j["width"] = width;
  j["delay_granularity"] = to_string(delay_granularity);
  j["delay_init"] = delay_init;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  json j = json::parse(text);
  ModelConfig c;
  c.arch = arch_from_string(j.at("architecture").get<std::string>());
  auto in = j.at("input");
  c.in_channels = in.at(0).get<int>();
  c.in_height = in.at(1).get<int>();
  c.in_width = in.at(2).get<int>();
  c.classes = j.at("classes").get<int>();
  c.width = j.at("width").get<int>();
  c.delay_granularity =
      granularity_from_string(j.at("delay_granularity").get<std::string>());
  c.delay_init = j.at("delay_init").get<double>();
  return c;
}

ModelConfig make_architecture(ArchKind kind, int in_channels, int in_height,
                              int in_width, int classes,
                              DelayGranularity granularity, double delay_init,
                              int width) {
  if (in_channels < 1 || in_height < 8 || in_width < 8) {
    throw ConfigError("make_architecture: input shape too small");
  }
  if (classes < 2) throw ConfigError("make_architecture: need >= 2 classes");
  if (width < 2 || width % 2 != 0) {
    throw ConfigError("make_architecture: width must be even and >= 2");
  }
  if (delay_init < 0.0) {
    throw ConfigError("make_architecture: delay_init must be >= 0");
  }
  ModelConfig c;
  c.arch = kind;
  c.in_channels = in_channels;
  c.in_height = in_height;
  c.in_width = in_width;
  c.classes = classes;
  c.width = width;
  c.delay_granularity = granularity;
  c.delay_init = delay_init;
  return c;
}

}  // namespace ttfs

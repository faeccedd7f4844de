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

#include <string>

#include "ttfs/model_config.hpp"
#include "ttfs/trainer.hpp"

namespace ttfs {

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
};

/// Strict JSON config:
///   { "model": { architecture, input [C,H,W], classes, width,
///                delay_granularity, delay_init },
///     "train": { epochs, batch_size, lr0, weight_decay, lambda1, lambda2,
///                seed, grad_clip } }
/// Every key is optional (defaults fill in); unknown keys and wrong types
/// are rejected with the offending JSON pointer path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

}  // namespace ttfs

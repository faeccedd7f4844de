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

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ttfs {

/// Spike-time horizon in time units. Any spike at or beyond this time is
/// treated as "never fired". Kept well above the latencies the trained
/// networks actually reach (single digits).
inline constexpr double kSpikeHorizon = 10.0;

/// z-domain sentinel, z = exp(kSpikeHorizon). Finite so that z-space
/// arithmetic stays well-defined for non-firing neurons.
inline const double kZMax = std::exp(kSpikeHorizon);

/// Causal weight sums with (sum - 1) at or below this are rejected as
/// firing candidates; the closed form is singular at sum == 1.
inline constexpr double kDenomEps = 1e-6;

/// Time-domain sentinel for "no spike".
inline constexpr double kNoSpike = std::numeric_limits<double>::infinity();

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class IntegrityError : public std::runtime_error {
 public:
  explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ttfs

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
#include <string>

#include <Eigen/Core>

#include "ttfs/dataset.hpp"

namespace ttfs {

/// Acoustic pressure on the unit square, explicit central differences.
struct WaveConfig {
  int n = 64;                   // grid points per side (N_x = N_y)
  int zones = 3;                // M zones per side; labels in [0, M^2)
  double c = 1484.0;            // wave speed, m/s (cancels into the CFL term)
  double cfl = 0.5;             // c*dt/dx; must stay <= 1/sqrt(2)
  int n_steps = 100;            // field snapshot step
  double gaussian_width = 0.05; // initial pulse width, normalized units
  int border = 10;              // excluded source band, pixels per side
  double train_fraction = 0.8;

  void validate() const;
};

struct WaveField {
  Eigen::ArrayXXd u;  // (n, n) pressure, row = y
  int step = 0;
  double dx = 0.0, dt = 0.0;
};

/// Gaussian pulse at the source, zero initial velocity (second-order start:
/// u1 = u0 + cfl^2/2 * lap(u0)), then u_{t+1} = 2u_t - u_{t-1} +
/// cfl^2 * lap(u_t), five-point Laplacian, hard-zero Dirichlet boundary.
WaveField simulate_wave(int src_row, int src_col, const WaveConfig& cfg);

/// Row-major zone index: floor(row*M/n)*M + floor(col*M/n).
int zone_label(int row, int col, int n, int zones);

struct WaveDataset {
  Dataset train, test;
  std::string manifest_json;
};

/// One sample per interior source (border excluded on every side), field
/// taken at cfg.n_steps, globally min-max normalized to [0,1], split
/// 80:20 by a seeded shuffle (test count floors, train takes the rest).
WaveDataset generate_wave_dataset(const WaveConfig& cfg, std::uint64_t seed,
                                  int workers);

/// Max-norm error against the analytic standing wave
/// sin(pi x) sin(pi y) cos(c pi sqrt(2) t) after `steps` steps on an
/// (n x n) grid — the scheme's order probe.
double standing_wave_error(int n, int steps, double cfl);

}  // namespace ttfs

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

#include "ttfs/wave.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ttfs/common.hpp"
#include "ttfs/rng.hpp"
#include "ttfs/threading.hpp"

namespace ttfs {

namespace {

// One leapfrog run from an arbitrary pulse with zero initial velocity.
// The interior update writes rows [1, n-2]; the boundary stays exactly 0.
Eigen::ArrayXXd run_scheme(Eigen::ArrayXXd u0, double cfl2, int steps) {
  const Eigen::Index n = u0.rows();
  u0.row(0).setZero();
  u0.row(n - 1).setZero();
  u0.col(0).setZero();
  u0.col(n - 1).setZero();

  auto lap_into = [n](const Eigen::ArrayXXd& u, Eigen::ArrayXXd& out) {
    out.setZero();
    out.block(1, 1, n - 2, n - 2) =
        u.block(0, 1, n - 2, n - 2) + u.block(2, 1, n - 2, n - 2) +
        u.block(1, 0, n - 2, n - 2) + u.block(1, 2, n - 2, n - 2) -
        4.0 * u.block(1, 1, n - 2, n - 2);
  };

  Eigen::ArrayXXd lap(n, n), prev = u0, cur(n, n), next(n, n);
  lap_into(u0, lap);
  cur = u0 + 0.5 * cfl2 * lap;  // second-order start for zero velocity
  if (steps == 0) return prev;
  for (int s = 2; s <= steps; ++s) {
    lap_into(cur, lap);
    next = 2.0 * cur - prev + cfl2 * lap;
    next.row(0).setZero();
    next.row(n - 1).setZero();
    next.col(0).setZero();
    next.col(n - 1).setZero();
    prev.swap(cur);
    cur.swap(next);
  }
  return cur;
}

}  // namespace

void WaveConfig::validate() const {
  if (n < 4) throw ConfigError("wave grid too small");
  if (zones < 1) throw ConfigError("zones must be >= 1");
  if (cfl <= 0.0 || cfl > 1.0 / std::sqrt(2.0) + 1e-12)
    throw ConfigError("CFL number violates the 2-D stability bound 1/sqrt(2)");
  if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
  if (border < 0) throw ConfigError("border must be >= 0");
  if (gaussian_width <= 0.0) throw ConfigError("gaussian width must be > 0");
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw ConfigError("train fraction must lie in (0,1)");
  if (n - 2 * border <= 0)
    throw ConfigError("border leaves no interior source locations");
}

WaveField simulate_wave(int src_row, int src_col, const WaveConfig& cfg) {
  cfg.validate();
  if (src_row < cfg.border || src_row >= cfg.n - cfg.border ||
      src_col < cfg.border || src_col >= cfg.n - cfg.border)
    throw std::out_of_range("wave source outside the interior region");

  const double dx = 1.0 / static_cast<double>(cfg.n - 1);
  const double w2 = cfg.gaussian_width * cfg.gaussian_width;
  Eigen::ArrayXXd u0(cfg.n, cfg.n);
  const double cy = src_row * dx, cx = src_col * dx;
  for (int r = 0; r < cfg.n; ++r) {
    const double y = r * dx;
    for (int col = 0; col < cfg.n; ++col) {
      const double x = col * dx;
      u0(r, col) =
          std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / w2);
    }
  }

  WaveField f;
  f.u = run_scheme(std::move(u0), cfg.cfl * cfg.cfl, cfg.n_steps);
  f.step = cfg.n_steps;
  f.dx = dx;
  f.dt = cfg.cfl * dx / cfg.c;
  return f;
}

int zone_label(int row, int col, int n, int zones) {
  if (row < 0 || row >= n || col < 0 || col >= n)
    throw std::out_of_range("zone source outside the grid");
  return (row * zones / n) * zones + col * zones / n;
}

WaveDataset generate_wave_dataset(const WaveConfig& cfg, std::uint64_t seed,
                                  int workers) {
  cfg.validate();
  const int side = cfg.n - 2 * cfg.border;
  const int count = side * side;

  TimeTensor fields({count, 1, cfg.n, cfg.n});
  std::vector<std::uint16_t> labels(static_cast<size_t>(count));
  parallel_slots(count, workers, [&](int, int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const int row = cfg.border + i / side;
      const int col = cfg.border + i % side;
      const WaveField f = simulate_wave(row, col, cfg);
      Eigen::Map<
          Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          fields.sample(i).data(), cfg.n, cfg.n) = f.u;
      labels[static_cast<size_t>(i)] =
          static_cast<std::uint16_t>(zone_label(row, col, cfg.n, cfg.zones));
    }
  });

  // Global min-max to [0,1] across the whole corpus.
  const double lo = fields.v.minCoeff();
  const double span = fields.v.maxCoeff() - lo;
  if (span > 0.0)
    fields.v = (fields.v - lo) / span;
  else
    fields.v.setZero();

  std::vector<int> order(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) order[static_cast<size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const int test_n =
      static_cast<int>(count * (1.0 - cfg.train_fraction));
  const int train_n = count - test_n;

  WaveDataset out;
  auto fill = [&](Dataset& ds, int begin, int n_samples) {
    ds.images.reshape({n_samples, 1, cfg.n, cfg.n});
    ds.labels.resize(static_cast<size_t>(n_samples));
    ds.classes = cfg.zones * cfg.zones;
    for (int i = 0; i < n_samples; ++i) {
      const int src = order[static_cast<size_t>(begin + i)];
      ds.images.sample(i) = fields.sample(src);
      ds.labels[static_cast<size_t>(i)] = labels[static_cast<size_t>(src)];
    }
  };
  fill(out.train, 0, train_n);
  fill(out.test, train_n, test_n);

  std::vector<int> hist(static_cast<size_t>(cfg.zones * cfg.zones), 0);
  for (std::uint16_t l : labels) ++hist[l];
  nlohmann::ordered_json j;
  j["grid"] = cfg.n;
  j["zones"] = cfg.zones;
  j["wave_speed"] = cfg.c;
  j["cfl"] = cfg.cfl;
  j["steps"] = cfg.n_steps;
  j["gaussian_width"] = cfg.gaussian_width;
  j["border"] = cfg.border;
  j["train_fraction"] = cfg.train_fraction;
  j["seed"] = seed;
  j["samples"] = count;
  j["train_samples"] = train_n;
  j["test_samples"] = test_n;
  j["label_histogram"] = hist;
  out.manifest_json = j.dump(2);
  return out;
}

double standing_wave_error(int n, int steps, double cfl) {
  if (n < 4 || steps < 1) throw ConfigError("bad convergence-probe setup");
  const double dx = 1.0 / static_cast<double>(n - 1);
  Eigen::ArrayXXd u0(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      u0(r, c) = std::sin(M_PI * r * dx) * std::sin(M_PI * c * dx);

  const Eigen::ArrayXXd u = run_scheme(u0, cfl * cfl, steps);

  // c*dt = cfl*dx, so the phase at step k is omega*t = pi*sqrt(2)*cfl*dx*k.
  const double phase = M_PI * std::sqrt(2.0) * cfl * dx * steps;
  double err = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double exact = std::sin(M_PI * r * dx) * std::sin(M_PI * c * dx) *
                           std::cos(phase);
      err = std::max(err, std::abs(u(r, c) - exact));
    }
  return err;
}

}  // namespace ttfs

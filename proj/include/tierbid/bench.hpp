// Copyright 2026 The tierbid Authors
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
#include <vector>

#include <json.hpp>

#include "tierbid/core.hpp"

namespace tierbid {

/// Scaling benchmark for single-round auction resolution. Populations and
/// bid sets are prepared outside the timed region, so the numbers cover
/// winner determination plus charging and nothing else. Timings measure the
/// machine they ran on; the claim under test is how the time grows with the
/// number of bidders, which should track N·log N.
struct BenchConfig {
  std::vector<int> user_grid = {120, 600, 1200, 2400};
  int repetitions = 9;   // timed measurements per grid point (median wins)
  int warmup = 2;        // untimed rounds per grid point before measuring
  std::uint64_t seed = 1;
  int threads = 1;
};

struct BenchPoint {
  int users = 0;
  std::int64_t median_ns = 0;  // per round
  /// Outcome checksums for the canonical round at this grid point; these
  /// depend only on the seed, never on the clock.
  Currency welfare;
  Currency revenue;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchPoint> points;
  /// Least-squares slope of ln(time) over ln(N·log2 N) across grid points
  /// with N >= 2, in parts per million. Linearithmic growth fits near 1.
  std::int64_t fit_exponent_ppm = 0;
  /// time(2N)/time(N) in parts per million for each consecutive grid pair
  /// where the user count exactly doubles.
  std::vector<std::int64_t> doubling_ratio_ppm;
};

/// The three-tier reference network used for scaling runs: one 500-unit
/// wide-area root, two 50-unit mid networks, and four 10-unit leaves.
Topology default_bench_topology();

/// The reference service mix: low-quality video (1), high-quality video
/// (5), and file transfer (1).
ServiceCatalog default_bench_catalog();

/// Draws `users` flows spread round-robin over the leaves, cycling through
/// the catalog, with values uniform on [1, 50]. Determined by `seed`.
std::vector<UserFlow> bench_population(int users, const Topology& topology,
                                       const ServiceCatalog& catalog,
                                       std::uint64_t seed);

BenchReport run_bench(const BenchConfig& config);

/// The reproducible half of a bench report: configuration echo, seed,
/// config hash, and per-point outcome checksums. Byte-identical across
/// re-runs of the same config.
nlohmann::json bench_results_json(const BenchReport& report);

/// The measured half: per-point median times and the fitted growth
/// figures. Depends on the clock, so it is kept out of the results file.
nlohmann::json bench_timings_json(const BenchReport& report);

}  // namespace tierbid

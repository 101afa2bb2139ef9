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

// tierbid: batch front end for the tiered-auction engine.
//
//   tierbid run <scenario.json>           episode simulation -> CSV + manifest
//   tierbid auction <scenario.json>       one round -> full audit document
//   tierbid oracle-check <scenario.json>  engine charges vs counterfactual rerun
//   tierbid bench                         auction-resolution scaling grid
//
// Exit codes: 0 success, 1 validation/parse error, 2 I/O error, 3 internal
// invariant violation.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "tierbid/bench.hpp"
#include "tierbid/errors.hpp"
#include "tierbid/scenario.hpp"

namespace {

using tierbid::ScenarioSpec;

struct CommonFlags {
  std::string scenario_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string mode;
  bool prefix_winners = false;
  int replications = 0;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags* flags, bool needs_scenario) {
  if (needs_scenario) {
    cmd->add_option("scenario", flags->scenario_path, "Scenario or manifest file")
        ->required();
  }
  cmd->add_option("--out-dir", flags->out_dir, "Output directory");
  cmd->add_option("--seed", flags->seed, "Override the scenario seed")
      ->each([flags](const std::string&) { flags->seed_set = true; });
  cmd->add_option("--mode", flags->mode,
                  "Override the mode: auction, multicast, or cooperative");
  cmd->add_flag("--prefix-winners", flags->prefix_winners,
                "Stop admission at the first bid that does not fit");
  cmd->add_option("--replications", flags->replications,
                  "Override the replication count");
  cmd->add_option("--threads", flags->threads,
                  "Worker threads (never changes results)");
}

// Applies command-line overrides, then re-validates by round-tripping
// through the canonical form so overridden configs obey the same rules as
// written ones. The returned spec is what gets hashed and echoed.
ScenarioSpec load_with_overrides(const CommonFlags& flags) {
  ScenarioSpec spec = tierbid::load_scenario_file(flags.scenario_path);
  if (flags.seed_set) spec.seed = flags.seed;
  if (flags.prefix_winners) spec.prefix_winners = true;
  if (!flags.mode.empty()) {
    nlohmann::json probe = tierbid::emit_scenario(spec);
    probe["mode"] = flags.mode;
    spec = tierbid::parse_scenario(probe);
  }
  if (flags.replications > 0) spec.replications = flags.replications;
  return tierbid::parse_scenario(tierbid::emit_scenario(spec));
}

int dispatch(const std::function<int()>& body) {
  try {
    return body();
  } catch (const tierbid::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const tierbid::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 2;
  } catch (const tierbid::InternalError& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw tierbid::IoError("cannot create output directory '" + out_dir +
                           "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Rounds allocate and free a few hundred kilobytes each; with default
  // thresholds the allocator hands that memory back to the kernel after
  // every round and the next one page-faults it all in again. Keeping the
  // heap intact makes round cost scale with instance size, not page count.
  mallopt(M_TRIM_THRESHOLD, 64 << 20);
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
#endif
  CLI::App app{"Hierarchical sealed-bid bandwidth auction toolkit"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand(
      "run", "Simulate the scenario's episode(s) and write metric tables");
  add_common(run, &run_flags, true);

  CommonFlags auction_flags;
  int auction_slot = 1;
  CLI::App* auction = app.add_subcommand(
      "auction", "Resolve a single round and write the audit document");
  add_common(auction, &auction_flags, true);
  auction->add_option("--slot", auction_slot,
                      "Slot to resolve when the scenario uses cohorts");

  CommonFlags oracle_flags;
  int oracle_samples = 100;
  CLI::App* oracle = app.add_subcommand(
      "oracle-check",
      "Compare engine charges against the counterfactual-rerun price");
  add_common(oracle, &oracle_flags, true);
  oracle->add_option("--samples", oracle_samples, "Rounds to draw and check");

  tierbid::BenchConfig bench_config;
  std::string bench_out_dir = "out";
  CLI::App* bench = app.add_subcommand(
      "bench", "Time auction resolution across a grid of population sizes");
  bench->add_option("--users", bench_config.user_grid,
                    "Population sizes to time");
  bench->add_option("--repetitions", bench_config.repetitions,
                    "Timed measurements per size");
  bench->add_option("--warmup", bench_config.warmup,
                    "Untimed rounds per size");
  bench->add_option("--seed", bench_config.seed, "Population seed");
  bench->add_option("--threads", bench_config.threads,
                    "Worker threads (never changes results)");
  bench->add_option("--out-dir", bench_out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (run->parsed()) {
    return dispatch([&] {
      const ScenarioSpec spec = load_with_overrides(run_flags);
      const nlohmann::json manifest =
          tierbid::run_scenario(spec, run_flags.out_dir, run_flags.threads);
      std::printf("wrote %s/per_user.csv, per_network_slot.csv, manifest.json\n",
                  run_flags.out_dir.c_str());
      std::printf("config_hash %s  welfare_micro %lld  revenue_micro %lld\n",
                  manifest["config_hash"].get<std::string>().c_str(),
                  static_cast<long long>(
                      manifest["totals"]["welfare_micro"].get<std::int64_t>()),
                  static_cast<long long>(
                      manifest["totals"]["revenue_micro"].get<std::int64_t>()));
      return 0;
    });
  }
  if (auction->parsed()) {
    return dispatch([&] {
      const ScenarioSpec spec = load_with_overrides(auction_flags);
      const nlohmann::json outcome = tierbid::resolve_single_round(
          spec, auction_slot, auction_flags.threads);
      ensure_out_dir(auction_flags.out_dir);
      const std::string path = auction_flags.out_dir + "/auction.json";
      tierbid::write_json_file(outcome, path);
      std::printf("wrote %s\n", path.c_str());
      std::printf("social_welfare_micro %lld  revenue_micro %lld\n",
                  static_cast<long long>(
                      outcome["social_welfare_micro"].get<std::int64_t>()),
                  static_cast<long long>(
                      outcome["revenue_micro"].get<std::int64_t>()));
      return 0;
    });
  }
  if (oracle->parsed()) {
    return dispatch([&] {
      const ScenarioSpec spec = load_with_overrides(oracle_flags);
      const nlohmann::json report = tierbid::oracle_check_scenario(
          spec, oracle_samples, oracle_flags.threads);
      ensure_out_dir(oracle_flags.out_dir);
      const std::string path = oracle_flags.out_dir + "/oracle_check.json";
      tierbid::write_json_file(report, path);
      std::printf("wrote %s\n", path.c_str());
      std::printf(
          "winners_checked %lld  match_rate_ppm %lld  max_abs_diff_micro %lld\n",
          static_cast<long long>(report["winners_checked"].get<std::int64_t>()),
          static_cast<long long>(report["match_rate_ppm"].get<std::int64_t>()),
          static_cast<long long>(
              report["max_abs_diff_micro"].get<std::int64_t>()));
      return 0;
    });
  }
  return dispatch([&] {
    const tierbid::BenchReport report = tierbid::run_bench(bench_config);
    ensure_out_dir(bench_out_dir);
    tierbid::write_json_file(tierbid::bench_results_json(report),
                             bench_out_dir + "/bench.json");
    tierbid::write_json_file(tierbid::bench_timings_json(report),
                             bench_out_dir + "/bench_timings.json");
    std::printf("wrote %s/bench.json and bench_timings.json\n",
                bench_out_dir.c_str());
    for (const tierbid::BenchPoint& p : report.points) {
      std::printf("N %5d   median %10lld ns/round\n", p.users,
                  static_cast<long long>(p.median_ns));
    }
    std::printf("fit_exponent_ppm %lld\n",
                static_cast<long long>(report.fit_exponent_ppm));
    return 0;
  });
}

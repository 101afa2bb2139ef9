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
#include <string>
#include <vector>

#include <json.hpp>

#include "tierbid/coop.hpp"
#include "tierbid/core.hpp"
#include "tierbid/sim.hpp"

namespace tierbid {

/// A user given literally in a scenario file (for single-shot auction
/// resolution) instead of being drawn from cohorts.
struct ExplicitUser {
  std::string user_id;
  std::string service_id;
  Currency value;
  std::vector<std::string> path;  // root to leaf
  std::uint64_t arrival_seq = 0;
};

/// Complete declarative description of a run: the network, the services,
/// either a stochastic workload (cohorts) or literal users, the allocation
/// mode, and every knob the engine takes. Everything a run needs and
/// nothing about where its outputs go.
struct ScenarioSpec {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  Mode mode = Mode::kAuction;
  bool prefix_winners = false;
  int replications = 1;
  std::vector<ServiceClass> services;
  std::vector<NetworkNode> networks;
  WorkloadSpec workload;               // cohorts may be empty if users given
  std::vector<ExplicitUser> users;     // single-shot input
  std::vector<int> multicast_thresholds;  // multicast mode, one per tier
  WeightPolicy policy;                 // cooperative mode
  bool per_slot_values = false;
  Currency continuation_bonus;
};

/// Strict schema: unknown keys are validation errors, every quantity is a
/// scaled integer (micros or parts-per-million), never a decimal float. A
/// manifest produced by run_scenario is also accepted (its embedded config
/// is unwrapped), so any run can be reproduced from its own manifest.
ScenarioSpec parse_scenario(const nlohmann::json& j);
nlohmann::json emit_scenario(const ScenarioSpec& spec);

/// Reads and parses a scenario (or manifest) file. IoError if unreadable;
/// ValidationError with position info if it does not parse or validate.
ScenarioSpec load_scenario_file(const std::string& path);

/// Fingerprint of the canonical emitted form; embedded in every output.
std::uint64_t config_hash(const ScenarioSpec& spec);

/// Builds the topology/catalog pair a scenario describes (validated).
Topology scenario_topology(const ScenarioSpec& spec);
ServiceCatalog scenario_catalog(const ScenarioSpec& spec);

/// Runs the episode(s) a scenario describes and writes per_user.csv,
/// per_network_slot.csv, and manifest.json into out_dir. Replication r uses
/// the seed substream(seed, r) listed in the manifest. Returns the manifest.
nlohmann::json run_scenario(const ScenarioSpec& spec,
                            const std::string& out_dir, int threads);

/// Resolves one auction round and returns the full audit document: winners
/// and charges per user, and per network the residual capacity plus the
/// purged losing index. Explicit users are used when present; otherwise the
/// cohort workload is generated and the agents active at `slot` bid their
/// per-agent values with capacities drawn for that slot.
nlohmann::json resolve_single_round(const ScenarioSpec& spec, int slot,
                                    int threads);

/// Draws `samples` random rounds from the scenario's workload and compares
/// the engine's local charge against the full counterfactual-rerun charge
/// for every served user. Returns a report with the match rate, the largest
/// absolute discrepancy, and replayable dumps of the first mismatches.
/// Requires auction mode (the other modes have no per-user charges to
/// check).
nlohmann::json oracle_check_scenario(const ScenarioSpec& spec, int samples,
                                     int threads);

/// Writes a JSON document with sorted keys, a trailing newline, and no
/// machine-dependent formatting, so byte-level comparison is meaningful.
void write_json_file(const nlohmann::json& j, const std::string& path);

}  // namespace tierbid

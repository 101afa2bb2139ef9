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

#include "tierbid/auction.hpp"
#include "tierbid/coop.hpp"
#include "tierbid/core.hpp"

namespace tierbid {

enum class ValueClass { kLow, kMedium, kHigh };

/// The three bidding postures a repeated-auction agent can take: declare
/// less than the service is worth, exactly what it is worth, or more.
enum class Strategy { kShade, kTruthful, kAggressive };

enum class Mode { kAuction, kMulticast, kCooperative };

/// Closed interval a value class draws from, in currency per slot.
struct ValueInterval {
  Currency lo;
  Currency hi;
};

/// One homogeneous block of users: `count` agents of one service and value
/// class attached under one leaf network (their path runs root to leaf).
struct CohortSpec {
  std::string leaf;
  std::string service;
  ValueClass value_class = ValueClass::kMedium;
  int count = 0;
};

/// Everything stochastic about an episode: who shows up where, what they
/// are worth, and how capacity breathes slot to slot.
struct WorkloadSpec {
  int horizon = 100;  // number of auction slots, 1-based
  std::vector<CohortSpec> cohorts;
  ValueInterval low{Fixed::from_units(1), Fixed::from_units(5)};
  ValueInterval medium{Fixed::from_units(5), Fixed::from_units(20)};
  ValueInterval high{Fixed::from_units(20), Fixed::from_units(50)};
  /// Per-slot capacity is uniform in [C·(1−h), C·(1+h)]; h in [0, 1).
  Fixed capacity_half_width = Fixed::from_raw(200'000);
  std::uint64_t seed = 1;
};

/// One user across a whole episode. The agent asks for `duration` slots
/// starting at `start_slot` and bids factor·value in each of them.
struct BiddingAgent {
  std::string user_id;
  std::string service_id;
  std::vector<std::string> attachment_path;  // root to leaf
  ValueClass value_class = ValueClass::kMedium;
  Currency true_value;  // per-slot worth of being served
  Strategy strategy = Strategy::kTruthful;
  Fixed bid_factor = Fixed::from_units(1);  // <1 shades, >1 inflates
  int start_slot = 1;
  int duration = 1;
  std::uint64_t arrival_seq = 0;

  bool active_in(int slot) const {
    return slot >= start_slot && slot < start_slot + duration;
  }
};

/// Draws the population described by the spec: start slots uniform on
/// {1..T}, durations uniform on {1..T−start} (one slot when starting at T),
/// per-slot values uniform on the class interval. Fully determined by
/// spec.seed. Agents come out cohort by cohort in input order, and their
/// position is both their arrival_seq and their identity everywhere else.
std::vector<BiddingAgent> generate_workload(const WorkloadSpec& spec,
                                            const Topology& topology,
                                            const ServiceCatalog& catalog);

/// The per-network capacities offered in one slot: uniform draws within the
/// spec's fluctuation band around each nominal capacity, fully determined
/// by (spec.seed, slot) and independent of everything else in the episode.
std::vector<Bandwidth> draw_slot_capacities(const Topology& topology,
                                            const WorkloadSpec& spec,
                                            int slot);

/// Which allocator runs each slot and how agents' values evolve.
struct EpisodeConfig {
  Mode mode = Mode::kAuction;
  std::vector<int> multicast_thresholds;  // multicast mode, one per tier
  WeightPolicy policy;                    // cooperative mode
  bool prefix_winners = false;
  int threads = 1;
  /// Redraw every agent's per-slot value independently each slot instead of
  /// holding it fixed for the agent's lifetime.
  bool per_slot_values = false;
  /// Added to an agent's value in any slot directly following a won slot
  /// (a light model of service continuity being worth extra). Zero by
  /// default so values stay independent.
  Currency continuation_bonus;
};

/// One slot of one agent's history, enough to recompute every per-agent
/// metric from scratch.
struct SlotRecord {
  int slot = 0;
  bool won = false;
  std::uint32_t network = kNoIndex;  // serving network when won
  Currency charge;
  Currency value;  // the agent's true per-slot value at that slot
};

struct AgentEpisode {
  std::int64_t served_slots = 0;
  std::int64_t completion_ppm = 0;  // served/duration in parts per million
  int handoffs = 0;
  Currency total_charge;
  Currency total_value_won;  // summed true values over won slots
  Currency payoff;           // total_value_won − total_charge
  std::vector<SlotRecord> history;  // one record per active slot
};

struct NetworkSlotRecord {
  int slot = 0;
  std::uint32_t network = kNoIndex;
  Bandwidth demand;   // summed rates of the bids that reached the scan
  Bandwidth supply;   // capacity drawn for the slot
  int winners = 0;    // users served at this network this slot
  Currency revenue;
  Currency welfare;
};

struct EpisodeMetrics {
  std::vector<AgentEpisode> agents;             // parallel to the agent list
  std::vector<NetworkSlotRecord> network_slots; // slot-major, network order
  Currency total_welfare;
  Currency total_revenue;
  Currency weight_total;  // cooperative mode: served weight mass
};

/// Runs T consecutive rounds: each slot the active agents bid, per-network
/// capacity is drawn within its fluctuation band, one round resolves, and
/// histories update. A handoff is counted only when an agent is served in
/// two consecutive slots by different networks; winning again after an
/// interruption is not a handoff.
EpisodeMetrics run_episode(const Topology& topology,
                           const ServiceCatalog& catalog,
                           const std::vector<BiddingAgent>& agents,
                           const WorkloadSpec& spec,
                           const EpisodeConfig& config);

/// A/B/C test of one agent's bidding posture under common random numbers:
/// every replication draws a fresh population and value path, then replays
/// the identical episode once per arm with only the target's bid factor
/// changed. Values are redrawn independently every slot for all agents.
struct StrategyExperimentSpec {
  WorkloadSpec workload;
  EpisodeConfig episode;
  std::uint32_t target = 0;  // agent index under test
  Fixed shade_factor = Fixed::from_raw(800'000);        // 0.8
  Fixed aggressive_factor = Fixed::from_raw(1'200'000); // 1.2
  int replications = 200;
  std::uint64_t seed = 1;
};

struct StrategyArm {
  Strategy strategy = Strategy::kTruthful;
  Currency mean_payoff;
  /// Paired statistics of (this arm − truthful) across replications;
  /// zero for the truthful arm itself.
  Currency mean_diff_vs_truthful;
  Currency se_diff_vs_truthful;
};

struct StrategyExperimentResult {
  StrategyArm shade;
  StrategyArm truthful;
  StrategyArm aggressive;
  int replications = 0;
};

StrategyExperimentResult strategy_payoff_experiment(
    const StrategyExperimentSpec& spec, const Topology& topology,
    const ServiceCatalog& catalog);

}  // namespace tierbid

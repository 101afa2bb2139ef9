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

#include "tierbid/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "tierbid/errors.hpp"
#include "tierbid/rng.hpp"

namespace tierbid {
namespace {

// Substream tags: every random quantity draws from its own named stream, so
// adding a draw in one place never shifts any other sequence. This is what
// makes common-random-number comparisons across modes and strategy arms
// honest: the environment is bitwise identical, only the decision differs.
enum : std::uint64_t {
  kStreamStart = 1,
  kStreamDuration = 2,
  kStreamLifetimeValue = 3,
  kStreamCapacity = 4,
  kStreamSlotValue = 5,
  kStreamReplication = 6,
};

Rng agent_stream(std::uint64_t seed, std::uint64_t tag, std::uint32_t agent) {
  return Rng(Rng::substream(Rng::substream(seed, tag), agent));
}

const ValueInterval& interval_for(const WorkloadSpec& spec, ValueClass c) {
  switch (c) {
    case ValueClass::kLow:
      return spec.low;
    case ValueClass::kMedium:
      return spec.medium;
    case ValueClass::kHigh:
      return spec.high;
  }
  throw InternalError("unhandled value class");
}

void validate_spec(const WorkloadSpec& spec) {
  if (spec.horizon < 1) {
    throw ValidationError("workload horizon must be at least one slot");
  }
  for (const ValueInterval* iv : {&spec.low, &spec.medium, &spec.high}) {
    if (iv->lo.is_negative() || iv->hi < iv->lo) {
      throw ValidationError("value-class interval must satisfy 0 <= lo <= hi");
    }
  }
  if (spec.capacity_half_width.is_negative() ||
      !(spec.capacity_half_width < Fixed::from_units(1))) {
    throw ValidationError("capacity fluctuation half-width must be in [0, 1)");
  }
}

Currency slot_value(const WorkloadSpec& spec, const BiddingAgent& agent,
                    std::uint32_t index, int slot, bool per_slot) {
  if (!per_slot) return agent.true_value;
  const ValueInterval& iv = interval_for(spec, agent.value_class);
  Rng rng(Rng::substream(
      Rng::substream(Rng::substream(spec.seed, kStreamSlotValue), index),
      static_cast<std::uint64_t>(slot)));
  return rng.uniform(iv.lo, iv.hi);
}

}  // namespace

std::vector<Bandwidth> draw_slot_capacities(const Topology& topology,
                                            const WorkloadSpec& spec,
                                            int slot) {
  Rng rng(Rng::substream(Rng::substream(spec.seed, kStreamCapacity),
                         static_cast<std::uint64_t>(slot)));
  std::vector<Bandwidth> caps(topology.size());
  const Fixed one = Fixed::from_units(1);
  for (std::uint32_t k = 0; k < topology.size(); ++k) {
    const Bandwidth nominal = topology[k].capacity;
    const Bandwidth lo = nominal * (one - spec.capacity_half_width);
    const Bandwidth hi = nominal * (one + spec.capacity_half_width);
    caps[k] = rng.uniform(lo, hi);
  }
  return caps;
}

std::vector<BiddingAgent> generate_workload(const WorkloadSpec& spec,
                                            const Topology& topology,
                                            const ServiceCatalog& catalog) {
  validate_spec(spec);
  std::size_t population = 0;
  for (const CohortSpec& cohort : spec.cohorts) {
    if (cohort.count < 0) {
      throw ValidationError("cohort count must be non-negative");
    }
    topology.index_of(cohort.leaf);    // must exist
    catalog.index_of(cohort.service);  // must exist
    population += static_cast<std::size_t>(cohort.count);
  }
  if (population == 0) {
    throw ValidationError("workload population is empty");
  }

  std::vector<BiddingAgent> agents;
  agents.reserve(population);
  const std::int64_t horizon = spec.horizon;
  std::uint32_t index = 0;
  for (const CohortSpec& cohort : spec.cohorts) {
    std::vector<std::string> path;
    for (std::uint32_t n :
         topology.path_to_root(topology.index_of(cohort.leaf))) {
      path.push_back(topology[n].id);
    }
    for (int i = 0; i < cohort.count; ++i, ++index) {
      BiddingAgent agent;
      char name[16];
      std::snprintf(name, sizeof(name), "u%06u", index);
      agent.user_id = name;
      agent.service_id = cohort.service;
      agent.attachment_path = path;
      agent.value_class = cohort.value_class;
      agent.arrival_seq = index;

      agent.start_slot = static_cast<int>(
          agent_stream(spec.seed, kStreamStart, index).range(1, horizon));
      const std::int64_t span = horizon - agent.start_slot;
      agent.duration =
          span < 1 ? 1
                   : static_cast<int>(agent_stream(spec.seed, kStreamDuration,
                                                   index)
                                          .range(1, span));
      const ValueInterval& iv = interval_for(spec, cohort.value_class);
      agent.true_value = agent_stream(spec.seed, kStreamLifetimeValue, index)
                             .uniform(iv.lo, iv.hi);
      agents.push_back(std::move(agent));
    }
  }
  return agents;
}

EpisodeMetrics run_episode(const Topology& topology,
                           const ServiceCatalog& catalog,
                           const std::vector<BiddingAgent>& agents,
                           const WorkloadSpec& spec,
                           const EpisodeConfig& config) {
  validate_spec(spec);
  if (config.mode == Mode::kMulticast &&
      config.multicast_thresholds.size() !=
          static_cast<std::size_t>(topology.tiers())) {
    throw ValidationError("multicast mode needs one threshold per tier");
  }
  if (config.continuation_bonus.is_negative()) {
    throw ValidationError("continuation bonus must be non-negative");
  }

  // One validated instance up front resolves every path and service id to
  // dense indices; per-slot work then touches no strings at all.
  std::vector<UserFlow> flows;
  flows.reserve(agents.size());
  for (const BiddingAgent& agent : agents) {
    if (agent.bid_factor.is_negative()) {
      throw ValidationError("agent '" + agent.user_id +
                            "' has a negative bid factor");
    }
    if (agent.start_slot < 1 || agent.duration < 1) {
      throw ValidationError("agent '" + agent.user_id +
                            "' has an empty service window");
    }
    flows.push_back(UserFlow{agent.user_id, agent.service_id,
                             agent.true_value, agent.attachment_path,
                             agent.arrival_seq});
  }
  const Instance instance(topology, catalog, std::move(flows));
  const std::size_t n = agents.size();

  EngineConfig engine;
  engine.prefix_winners = config.prefix_winners;
  engine.threads = config.threads;
  if (config.mode == Mode::kMulticast) {
    engine.multicast_thresholds = config.multicast_thresholds;
  }
  if (config.mode == Mode::kCooperative) {
    engine.charging = false;
  }

  EpisodeMetrics metrics;
  metrics.agents.assign(n, AgentEpisode{});
  metrics.network_slots.reserve(static_cast<std::size_t>(spec.horizon) *
                                topology.size());

  std::vector<FlowScheduleState> schedule(n);
  for (std::uint32_t u = 0; u < n; ++u) {
    schedule[u].service_id = agents[u].service_id;
    schedule[u].t_init = agents[u].start_slot;
  }
  std::vector<int> last_won_slot(n, 0);
  std::vector<std::uint32_t> last_network(n, kNoIndex);

  for (int t = 1; t <= spec.horizon; ++t) {
    const std::vector<Bandwidth> caps = draw_slot_capacities(topology, spec, t);

    std::vector<std::vector<Bid>> sets(topology.size());
    std::vector<std::uint8_t> active(n, 0);
    std::vector<Currency> value_now(n);
    for (std::uint32_t u = 0; u < n; ++u) {
      if (!agents[u].active_in(t)) continue;
      active[u] = 1;
      Currency v = slot_value(spec, agents[u], u, t, config.per_slot_values);
      if (last_won_slot[u] == t - 1 && t > agents[u].start_slot) {
        v += config.continuation_bonus;
      }
      value_now[u] = v;

      Bid bid;
      if (config.mode == Mode::kCooperative) {
        bid = instance.make_bid(u);
        bid.unit_price = compute_weight(config.policy, schedule[u], t);
        bid.value = v;
      } else {
        bid = make_bid(u, instance.flows()[u], catalog, agents[u].bid_factor * v);
      }
      for (std::uint32_t net : instance.path(u)) {
        sets[net].push_back(bid);
      }
    }

    const AuctionOutcome outcome =
        run_hierarchical_auction(topology, sets, n, engine, &caps);

    for (std::uint32_t u = 0; u < n; ++u) {
      if (!active[u]) continue;
      const UserOutcome& res = outcome.users[u];
      AgentEpisode& ep = metrics.agents[u];
      ep.history.push_back(SlotRecord{t, res.served, res.network, res.charge,
                                      value_now[u]});
      if (res.served) {
        ++ep.served_slots;
        ep.total_charge += res.charge;
        ep.total_value_won += value_now[u];
        if (last_network[u] != kNoIndex && last_won_slot[u] == t - 1 &&
            last_network[u] != res.network) {
          ++ep.handoffs;
        }
        last_won_slot[u] = t;
        last_network[u] = res.network;
        schedule[u].cumulative_share +=
            catalog[catalog.index_of(agents[u].service_id)].mean_rate;
        ++schedule[u].slots_served;
      }
    }
    for (std::uint32_t k = 0; k < topology.size(); ++k) {
      const NetworkRoundState& st = outcome.networks[k];
      metrics.network_slots.push_back(NetworkSlotRecord{
          t, k, st.demand, st.capacity, st.users_served, st.revenue,
          st.welfare});
    }
    metrics.total_welfare += outcome.social_welfare;
    metrics.total_revenue += outcome.revenue;
    if (config.mode == Mode::kCooperative) {
      metrics.weight_total += outcome.weight_total;
    }
  }

  for (std::uint32_t u = 0; u < n; ++u) {
    AgentEpisode& ep = metrics.agents[u];
    ep.completion_ppm =
        ep.served_slots * 1'000'000 / static_cast<std::int64_t>(
                                          agents[u].duration);
    ep.payoff = ep.total_value_won - ep.total_charge;
  }
  return metrics;
}

StrategyExperimentResult strategy_payoff_experiment(
    const StrategyExperimentSpec& spec, const Topology& topology,
    const ServiceCatalog& catalog) {
  if (spec.replications < 1) {
    throw ValidationError("strategy experiment needs at least 1 replication");
  }
  if (spec.episode.mode == Mode::kCooperative) {
    throw ValidationError(
        "strategy experiment compares payoffs, which cooperative mode lacks");
  }

  EpisodeConfig episode = spec.episode;
  episode.per_slot_values = true;

  struct ArmDef {
    Strategy strategy;
    Fixed factor;
  };
  const ArmDef arms[3] = {
      {Strategy::kShade, spec.shade_factor},
      {Strategy::kTruthful, Fixed::from_units(1)},
      {Strategy::kAggressive, spec.aggressive_factor},
  };

  const int reps = spec.replications;
  std::vector<std::int64_t> payoff[3];
  for (auto& p : payoff) p.reserve(static_cast<std::size_t>(reps));

  for (int r = 0; r < reps; ++r) {
    WorkloadSpec wl = spec.workload;
    wl.seed = Rng::substream(Rng::substream(spec.seed, kStreamReplication),
                             static_cast<std::uint64_t>(r));
    std::vector<BiddingAgent> agents =
        generate_workload(wl, topology, catalog);
    if (spec.target >= agents.size()) {
      throw ValidationError("strategy experiment target index out of range");
    }
    // Same population, same capacity path, same value draws in every arm:
    // the replayed world differs only in the target's declared bid.
    for (int a = 0; a < 3; ++a) {
      agents[spec.target].strategy = arms[a].strategy;
      agents[spec.target].bid_factor = arms[a].factor;
      const EpisodeMetrics m =
          run_episode(topology, catalog, agents, wl, episode);
      payoff[a].push_back(m.agents[spec.target].payoff.raw());
    }
  }

  const auto mean_raw = [reps](const std::vector<std::int64_t>& xs) {
    __int128 sum = 0;
    for (std::int64_t x : xs) sum += x;
    const __int128 half = reps / 2;
    const __int128 q = sum >= 0 ? (sum + half) / reps : (sum - half) / reps;
    return static_cast<std::int64_t>(q);
  };
  const auto paired = [&](int arm, StrategyArm* out) {
    out->strategy = arms[arm].strategy;
    out->mean_payoff = Fixed::from_raw(mean_raw(payoff[arm]));
    if (arm == 1) return;  // truthful is the reference arm
    std::vector<std::int64_t> diff(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) diff[r] = payoff[arm][r] - payoff[1][r];
    const std::int64_t mean_d = mean_raw(diff);
    out->mean_diff_vs_truthful = Fixed::from_raw(mean_d);
    if (reps > 1) {
      double ss = 0.0;
      for (std::int64_t d : diff) {
        const double c = static_cast<double>(d - mean_d);
        ss += c * c;
      }
      const double se = std::sqrt(ss / (reps - 1) / reps);
      out->se_diff_vs_truthful = Fixed::from_raw(
          static_cast<std::int64_t>(std::llround(se)));
    }
  };

  StrategyExperimentResult result;
  result.replications = reps;
  paired(0, &result.shade);
  paired(1, &result.truthful);
  paired(2, &result.aggressive);
  return result;
}

}  // namespace tierbid

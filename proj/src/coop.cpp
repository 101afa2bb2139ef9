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

#include "tierbid/coop.hpp"

#include <string>

#include "tierbid/errors.hpp"

namespace tierbid {
namespace {

Fixed checked_weight(Fixed w, const std::string& context) {
  if (w.is_negative()) {
    throw ValidationError("negative weight configured for " + context);
  }
  return w;
}

Fixed lookup_service_weight(const std::map<std::string, Fixed>& table,
                            const std::string& service_id,
                            const std::string& context) {
  auto it = table.find(service_id);
  if (it == table.end()) {
    throw ValidationError("service '" + service_id + "' missing from the " +
                          context + " weight table");
  }
  return checked_weight(it->second, "service '" + service_id + "'");
}

}  // namespace

Fixed compute_weight(const WeightPolicy& policy,
                     const FlowScheduleState& state, int now) {
  if (state.t_init < 1) {
    throw ValidationError("flow start slot must be 1-based");
  }
  if (now < state.t_init) {
    throw ValidationError("cannot weigh a flow before its start slot");
  }
  if (state.cumulative_share.is_negative() || state.slots_served < 0) {
    throw ValidationError("flow schedule state went negative");
  }
  const Fixed one = Fixed::from_units(1);
  switch (policy.kind) {
    case PolicyKind::kStaticService:
      return lookup_service_weight(policy.service_weights, state.service_id,
                                   "static");
    case PolicyKind::kTimeOfDay: {
      for (const TimeOfDayBucket& bucket : policy.buckets) {
        if (now >= bucket.from_slot && now < bucket.to_slot) {
          return lookup_service_weight(bucket.service_weights,
                                       state.service_id, "time-of-day");
        }
      }
      throw ValidationError("slot " + std::to_string(now) +
                            " falls outside every time-of-day bucket");
    }
    case PolicyKind::kAging: {
      Fixed base = one;
      auto it = policy.service_weights.find(state.service_id);
      if (it != policy.service_weights.end()) {
        base = checked_weight(it->second, "service '" + state.service_id + "'");
      }
      const Fixed gamma = checked_weight(policy.aging_gamma, "aging gamma");
      return base * (one + gamma * Fixed::from_units(state.slots_served));
    }
    case PolicyKind::kRoundRobin:
      if (state.cumulative_share.is_zero()) return kZeroShareSentinel;
      return one / state.cumulative_share;
    case PolicyKind::kFcfs:
      return one / Fixed::from_units(state.t_init);
  }
  throw InternalError("unhandled policy kind");
}

AuctionOutcome run_cooperative_round(
    const Instance& instance, const std::vector<FlowScheduleState>& states,
    const WeightPolicy& policy, int now, const EngineConfig& config,
    const std::vector<Bandwidth>* capacities) {
  if (states.size() != instance.user_count()) {
    throw ValidationError("schedule states do not match the flow list");
  }
  std::vector<std::vector<Bid>> sets(instance.topology().size());
  for (std::uint32_t u = 0; u < instance.user_count(); ++u) {
    Bid bid = instance.make_bid(u);
    // The weight replaces the unit price as the ranking key; the true
    // willingness to pay stays in `value` so the welfare ledger remains
    // comparable with auction mode.
    bid.unit_price = compute_weight(policy, states[u], now);
    for (std::uint32_t net : instance.path(u)) {
      sets[net].push_back(bid);
    }
  }
  EngineConfig coop = config;
  coop.charging = false;
  coop.multicast_thresholds.clear();
  return run_hierarchical_auction(instance.topology(), sets,
                                  instance.user_count(), coop, capacities);
}

}  // namespace tierbid

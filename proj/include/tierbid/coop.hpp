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

#include <map>
#include <string>
#include <vector>

#include "tierbid/auction.hpp"
#include "tierbid/core.hpp"

namespace tierbid {

/// How a cooperative deployment ranks flows once money is out of the
/// picture: operator-set service weights replace bids in the very same
/// winner determination, and charges are identically zero.
enum class PolicyKind {
  kStaticService,  // fixed weight per service class (DiffServ-style)
  kTimeOfDay,      // weight per service per slot bucket (peak-hour shaping)
  kAging,          // service base weight grows with slots already served
  kRoundRobin,     // weight is the inverse of the share received so far
  kFcfs            // weight is the inverse of the flow's start slot
};

/// One half-open slot range [from_slot, to_slot) with its own weight table.
struct TimeOfDayBucket {
  int from_slot = 1;
  int to_slot = 1;
  std::map<std::string, Fixed> service_weights;
};

struct WeightPolicy {
  PolicyKind kind = PolicyKind::kStaticService;
  /// Static policy: must cover every service that shows up. Aging policy:
  /// base weight per service, defaulting to 1 when absent.
  std::map<std::string, Fixed> service_weights;
  /// Time-of-day policy only. Buckets must not overlap; a slot outside
  /// every bucket is a configuration error, not a silent default.
  std::vector<TimeOfDayBucket> buckets;
  /// Aging policy: weight = base · (1 + gamma · slots_served).
  Fixed aging_gamma = Fixed::from_raw(100'000);  // 0.1
};

/// Stands in for the undefined inverse of a zero share: flows that never
/// received anything outrank every finite inverse in a run.
inline constexpr Fixed kZeroShareSentinel =
    Fixed::from_units(1'000'000'000);

/// What the scheduler knows about one flow when weighing it.
struct FlowScheduleState {
  std::string service_id;
  int t_init = 1;              // 1-based slot the flow first asked for service
  Bandwidth cumulative_share;  // rate·slots actually delivered so far
  std::int64_t slots_served = 0;
};

/// The policy's ranking weight for one flow at slot `now`. Pure function;
/// safe to call concurrently. Throws ValidationError when the policy table
/// does not cover the flow (missing static service, uncovered slot) or a
/// configured weight is negative.
Fixed compute_weight(const WeightPolicy& policy,
                     const FlowScheduleState& state, int now);

/// One cooperative round: identical hierarchical winner determination with
/// the policy weight in place of the unit price, and no payments at all.
/// The outcome's social_welfare still sums the winners' true willingness to
/// pay (so policies can be compared against the auction on one instance),
/// weight_total sums the winning weights, and every charge is zero.
/// `states` runs parallel to instance.flows().
AuctionOutcome run_cooperative_round(
    const Instance& instance, const std::vector<FlowScheduleState>& states,
    const WeightPolicy& policy, int now, const EngineConfig& config = {},
    const std::vector<Bandwidth>* capacities = nullptr);

}  // namespace tierbid

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
#include <utility>
#include <vector>

#include "tierbid/auction.hpp"
#include "tierbid/core.hpp"

namespace tierbid {

/// An aggregated same-service bid: the members' unit prices add up, but the
/// service rate is consumed once, so one capacity slice serves everyone in
/// the group. Identified by its service within the network that formed it.
struct MulticastGroupBid {
  std::uint32_t service = kNoIndex;
  Currency aggregate_price;   // exact sum of member unit prices
  Bandwidth rate;             // the common per-member service rate, once
  Currency total_value;       // exact sum of member declared values
  std::vector<GroupMember> members;   // ascending user index
  std::uint64_t arrival_seq = 0;      // earliest member, for tie-breaks
  std::uint32_t tie_user = kNoIndex;  // smallest member, for tie-breaks
};

/// Partition of one network's pending bids into multicast groups plus the
/// unicast bids that stay individual.
struct GroupingResult {
  std::vector<MulticastGroupBid> groups;  // ascending service index
  std::vector<Bid> unicast;               // original order
};

/// Groups same-service bids at one network. Every service with at least
/// max(threshold, 2) pending bids becomes one group (groups of one are
/// never formed: they would just duplicate the unicast bid); grouped users'
/// unicast bids are dropped at this network and do not re-enter even if the
/// group loses. Everyone else stays unicast.
GroupingResult form_groups(const std::vector<Bid>& pending, int threshold);

/// Splits a group's total charge across its members in proportion to their
/// individual unit prices, in exact fixed-point: floor every share at the
/// smallest representable step, then hand the leftover steps to the largest
/// remainders (earlier members first on ties). Shares always sum exactly to
/// the total. A group with an all-zero price vector splits evenly.
std::vector<std::pair<std::uint32_t, Currency>> split_group_charge(
    const std::vector<GroupMember>& members, Currency total);

inline std::vector<std::pair<std::uint32_t, Currency>> split_group_charge(
    const MulticastGroupBid& group, Currency total) {
  return split_group_charge(group.members, total);
}

/// Convenience front end: one round with multicast grouping enabled at
/// every tier using the given per-tier minimum group sizes (index 0 is the
/// widest tier). Thresholds must cover every tier of the topology.
AuctionOutcome run_multicast_auction(
    const Topology& topology, const std::vector<std::vector<Bid>>& bid_sets,
    std::size_t user_count, const std::vector<int>& tier_thresholds,
    const EngineConfig& config = {},
    const std::vector<Bandwidth>* capacities = nullptr);

}  // namespace tierbid

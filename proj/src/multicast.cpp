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

#include "tierbid/multicast.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "tierbid/errors.hpp"

namespace tierbid {

GroupingResult form_groups(const std::vector<Bid>& pending, int threshold) {
  if (threshold < 1) {
    throw ValidationError("multicast threshold must be at least 1");
  }
  GroupingResult out;
  // A singleton "group" is the unicast bid under another name, so the
  // effective minimum is two members regardless of the configured floor.
  const std::size_t min_size =
      static_cast<std::size_t>(std::max(threshold, 2));

  std::map<std::uint32_t, std::size_t> count;  // ordered: deterministic output
  for (const Bid& b : pending) ++count[b.service];

  std::map<std::uint32_t, MulticastGroupBid> groups;
  for (const Bid& b : pending) {
    if (count[b.service] < min_size) {
      out.unicast.push_back(b);
      continue;
    }
    MulticastGroupBid& g = groups[b.service];
    if (g.members.empty()) {
      g.service = b.service;
      g.rate = b.rate;
      g.arrival_seq = b.arrival_seq;
      g.tie_user = b.user;
    } else if (g.rate != b.rate) {
      throw InternalError("same-service bids with differing rates");
    }
    g.aggregate_price += b.unit_price;
    g.total_value += b.value;
    g.arrival_seq = std::min(g.arrival_seq, b.arrival_seq);
    g.tie_user = std::min(g.tie_user, b.user);
    g.members.push_back(GroupMember{b.user, b.unit_price, b.value});
  }
  out.groups.reserve(groups.size());
  for (auto& [service, g] : groups) {
    std::sort(g.members.begin(), g.members.end(),
              [](const GroupMember& a, const GroupMember& b) {
                return a.user < b.user;
              });
    out.groups.push_back(std::move(g));
  }
  return out;
}

std::vector<std::pair<std::uint32_t, Currency>> split_group_charge(
    const std::vector<GroupMember>& members, Currency total) {
  if (members.empty()) {
    throw ValidationError("cannot split a charge over an empty group");
  }
  if (total.is_negative()) {
    throw ValidationError("cannot split a negative charge");
  }

  // Weight by unit price; an all-zero price vector degrades to even shares.
  std::vector<std::int64_t> weights(members.size());
  __int128 denom = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    weights[i] = members[i].unit_price.raw();
    denom += weights[i];
  }
  if (denom == 0) {
    std::fill(weights.begin(), weights.end(), 1);
    denom = static_cast<__int128>(members.size());
  }

  const std::int64_t total_raw = total.raw();
  std::vector<std::int64_t> share(members.size());
  std::vector<__int128> remainder(members.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const __int128 num = static_cast<__int128>(total_raw) * weights[i];
    share[i] = static_cast<std::int64_t>(num / denom);
    remainder[i] = num % denom;
    assigned += share[i];
  }
  // Hand the leftover smallest-unit steps to the largest remainders;
  // earlier members break ties so the split is deterministic.
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&remainder](std::size_t a, std::size_t b) {
                     return remainder[b] < remainder[a];
                   });
  std::int64_t left = total_raw - assigned;
  for (std::size_t idx : order) {
    if (left == 0) break;
    ++share[idx];
    --left;
  }

  std::vector<std::pair<std::uint32_t, Currency>> out;
  out.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    out.emplace_back(members[i].user, Fixed::from_raw(share[i]));
  }
  return out;
}

AuctionOutcome run_multicast_auction(
    const Topology& topology, const std::vector<std::vector<Bid>>& bid_sets,
    std::size_t user_count, const std::vector<int>& tier_thresholds,
    const EngineConfig& config, const std::vector<Bandwidth>* capacities) {
  // An empty list would silently disable grouping inside the engine; this
  // entry point exists to run with grouping, so demand full coverage.
  if (tier_thresholds.empty()) {
    throw ValidationError("multicast thresholds must cover every tier");
  }
  EngineConfig with_groups = config;
  with_groups.multicast_thresholds = tier_thresholds;
  return run_hierarchical_auction(topology, bid_sets, user_count, with_groups,
                                  capacities);
}

}  // namespace tierbid

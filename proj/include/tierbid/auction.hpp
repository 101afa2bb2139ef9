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

#include "tierbid/core.hpp"

namespace tierbid {

/// Engine knobs. Defaults give the sealed-bid unit-price auction with
/// skip-greedy admission and per-network charges.
struct EngineConfig {
  /// Admit strictly in sorted order and stop at the first bid that does not
  /// fit, instead of skipping past it to smaller bids further down.
  bool prefix_winners = false;

  /// When false, winner determination runs as usual but every charge is
  /// zero (cooperative sharing ranks flows without payments).
  bool charging = true;

  /// Minimum group size per tier (index 0 is tier 1). Empty disables
  /// multicast grouping. Groups of one are never formed.
  std::vector<int> multicast_thresholds;

  /// Worker threads for same-tier networks. Results are identical for any
  /// value; this only trades wall-clock time.
  int threads = 1;
};

/// A member of a multicast group bid, with the slice of declared value it
/// brought in (used for pro-rata charge splitting).
struct GroupMember {
  std::uint32_t user = kNoIndex;
  Currency unit_price;
  Currency value;
};

/// One element of a network's sorted bid list: either a single user's bid
/// or an aggregated multicast group for one service. Groups advertise the
/// summed unit price but consume the service rate only once.
struct AuctionEntry {
  Currency unit_price;          // ranking key (sum of member prices for groups)
  Bandwidth rate;               // service rate; a group consumes it once
  std::uint64_t arrival_seq = 0;  // groups use their earliest member
  std::uint32_t tie_user = kNoIndex;  // final tie-break; groups use min member
  Currency value;               // exact declared value (summed for groups)
  std::uint32_t service = kNoIndex;
  std::uint32_t user = kNoIndex;      // kNoIndex for group entries
  std::vector<GroupMember> members;   // empty for single-user entries

  bool is_group() const { return !members.empty(); }
};

/// Sorted-scan order for auction entries; mirrors bid_sorts_before.
inline bool entry_sorts_before(const AuctionEntry& a, const AuctionEntry& b) {
  if (a.unit_price != b.unit_price) return b.unit_price < a.unit_price;
  if (a.arrival_seq != b.arrival_seq) return a.arrival_seq < b.arrival_seq;
  return a.tie_user < b.tie_user;
}

/// Result of a single network's winner determination.
struct WinnerSplit {
  std::vector<AuctionEntry> winners;  // admission order
  std::vector<AuctionEntry> losers;   // sorted descending
  Bandwidth residual;                 // capacity left after the winners
};

/// Sorts the entries (price desc, arrival asc, user asc) and scans once:
/// skip-greedy admits anything that still fits the residual capacity;
/// prefix mode stops at the first entry that does not fit.
WinnerSplit determine_winners(std::vector<AuctionEntry> entries,
                              Bandwidth capacity, bool prefix_winners = false);

/// What one network did in a round, kept for charge audits and reports.
struct NetworkRoundState {
  std::uint32_t network = kNoIndex;
  Bandwidth capacity;   // capacity actually offered this round
  Bandwidth residual;   // left over after admission
  Bandwidth demand;     // summed rates of the bids that entered the scan
  std::vector<AuctionEntry> winners;
  /// Losing entries that survived the cross-tier purge: bids whose users
  /// went entirely unserved this round. This is exactly the list the
  /// charge walk consumes, in descending order.
  std::vector<AuctionEntry> losing_index;
  Currency welfare;  // summed declared values of winners here
  Currency revenue;  // summed charges assessed here
  int users_served = 0;
};

/// Per-user result of a round.
struct UserOutcome {
  bool served = false;
  std::uint32_t network = kNoIndex;  // serving network, if served
  int tier = 0;                      // its tier, if served
  Currency charge;                   // this user's share, zero if unserved
};

struct AuctionOutcome {
  std::vector<UserOutcome> users;          // dense by user index
  std::vector<NetworkRoundState> networks; // dense by topology index
  Currency social_welfare;  // summed declared values of served users
  Currency revenue;         // summed charges
  /// Summed ranking keys of all winning entries. In cooperative mode the
  /// ranking key is the policy weight, so this is the served weight mass;
  /// in auction mode it is the winners' summed unit prices.
  Currency weight_total;
};

/// Runs one full round over every tier, widest first. Winners at a tier are
/// withdrawn from all deeper tiers before those run; after the last tier,
/// losing bids of users served elsewhere are purged from every losing index,
/// and each network charges its winners from what remains: a winner pays the
/// summed declared value of the top surviving losers that fill its rate
/// (pro-rata at the margin, zero for any shortfall), never more than its own
/// declared value.
///
/// `bid_sets` holds each network's sealed bids (topology indexing);
/// `capacities` optionally overrides nominal capacities for this round.
AuctionOutcome run_hierarchical_auction(
    const Topology& topology, const std::vector<std::vector<Bid>>& bid_sets,
    std::size_t user_count, const EngineConfig& config = {},
    const std::vector<Bandwidth>* capacities = nullptr);

/// The engine's local charge rule, exposed for audits: the price of
/// refilling `rate` units from the network's purged losing index, best
/// losers first. Fully consumed losing bids contribute their exact declared
/// value, the bid at the margin contributes its unit price times the
/// remainder, and any shortfall past the end of the index costs nothing.
Currency compute_charge_local(Bandwidth rate, const NetworkRoundState& state);

/// Same, for a specific winning bid: the walk for its rate, capped at its
/// own declared value (a winner never pays more than it offered).
Currency compute_charge_local(const Bid& winner,
                              const NetworkRoundState& state);

/// Summed declared value of all served users.
inline Currency social_welfare(const AuctionOutcome& outcome) {
  return outcome.social_welfare;
}

/// Summed charges across all networks.
inline Currency revenue(const AuctionOutcome& outcome) {
  return outcome.revenue;
}

}  // namespace tierbid

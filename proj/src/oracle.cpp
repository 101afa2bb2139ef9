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

#include "tierbid/oracle.hpp"

#include "tierbid/errors.hpp"

namespace tierbid {

Currency vcg_oracle_charge(const Topology& topology,
                           const std::vector<std::vector<Bid>>& bid_sets,
                           std::size_t user_count, std::uint32_t user,
                           const EngineConfig& config,
                           const std::vector<Bandwidth>* capacities,
                           const AuctionOutcome* baseline) {
  if (user >= user_count) {
    throw ValidationError("oracle asked about a user index out of range");
  }

  AuctionOutcome actual;
  if (baseline == nullptr) {
    actual = run_hierarchical_auction(topology, bid_sets, user_count, config,
                                      capacities);
    baseline = &actual;
  }

  Currency own_value;
  bool has_bid = false;
  for (const std::vector<Bid>& set : bid_sets) {
    for (const Bid& b : set) {
      if (b.user == user) {
        own_value = b.value;
        has_bid = true;
        break;
      }
    }
    if (has_bid) break;
  }

  Currency others_with = baseline->social_welfare;
  if (baseline->users[user].served) others_with -= own_value;

  std::vector<std::vector<Bid>> without(bid_sets.size());
  for (std::size_t n = 0; n < bid_sets.size(); ++n) {
    without[n].reserve(bid_sets[n].size());
    for (const Bid& b : bid_sets[n]) {
      if (b.user != user) without[n].push_back(b);
    }
  }
  EngineConfig cheap = config;
  cheap.charging = false;  // only welfare matters for the rerun
  const AuctionOutcome counterfactual = run_hierarchical_auction(
      topology, without, user_count, cheap, capacities);

  return counterfactual.social_welfare - others_with;
}

}  // namespace tierbid

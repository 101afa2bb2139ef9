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

#include "tierbid/auction.hpp"

namespace tierbid {

/// Reference charge for one user, computed the expensive way: rerun the
/// entire hierarchy with the user's bids withdrawn and price them at the
/// externality they impose, i.e. everyone else's welfare without them minus
/// everyone else's welfare with them. The production engine prices winners
/// from each network's local losing index instead of rerunning; this oracle
/// exists to check that shortcut and for offline audits, never on the hot
/// path.
///
/// `baseline` may pass a previously computed outcome for the full bid sets
/// to skip recomputing it per user.
Currency vcg_oracle_charge(const Topology& topology,
                           const std::vector<std::vector<Bid>>& bid_sets,
                           std::size_t user_count, std::uint32_t user,
                           const EngineConfig& config = {},
                           const std::vector<Bandwidth>* capacities = nullptr,
                           const AuctionOutcome* baseline = nullptr);

}  // namespace tierbid

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

#include "tierbid/core.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "tierbid/errors.hpp"

namespace tierbid {

ServiceCatalog::ServiceCatalog(std::vector<ServiceClass> services)
    : services_(std::move(services)) {
  if (services_.empty()) {
    throw ValidationError("service catalog is empty");
  }
  std::set<std::int64_t> rates;
  for (std::uint32_t i = 0; i < services_.size(); ++i) {
    const ServiceClass& s = services_[i];
    if (s.id.empty()) {
      throw ValidationError("service class with empty id");
    }
    if (!(Fixed{} < s.mean_rate)) {
      throw ValidationError("service '" + s.id + "' has non-positive rate");
    }
    if (!by_id_.emplace(s.id, i).second) {
      throw ValidationError("duplicate service id '" + s.id + "'");
    }
    rates.insert(s.mean_rate.raw());
  }
  distinct_rates_ = rates.size();
}

std::uint32_t ServiceCatalog::index_of(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) {
    throw ValidationError("unknown service id '" + id + "'");
  }
  return it->second;
}

Topology::Topology(std::vector<NetworkNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) {
    throw ValidationError("topology has no networks");
  }
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const NetworkNode& n = nodes_[i];
    if (n.id.empty()) {
      throw ValidationError("network with empty id");
    }
    if (!by_id_.emplace(n.id, i).second) {
      throw ValidationError("duplicate network id '" + n.id + "'");
    }
    if (n.tier < 1) {
      throw ValidationError("network '" + n.id + "' has tier < 1");
    }
    if (!(Fixed{} < n.capacity)) {
      throw ValidationError("network '" + n.id + "' has non-positive capacity");
    }
    tiers_ = std::max(tiers_, n.tier);
  }

  tier_members_.resize(static_cast<std::size_t>(tiers_));
  parent_.assign(nodes_.size(), kNoIndex);
  child_count_.assign(nodes_.size(), 0);
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const NetworkNode& n = nodes_[i];
    tier_members_[static_cast<std::size_t>(n.tier - 1)].push_back(i);
    if (n.tier == 1) {
      if (!n.parent.empty()) {
        throw ValidationError("tier-1 network '" + n.id +
                              "' must not have a parent");
      }
      continue;
    }
    auto it = by_id_.find(n.parent);
    if (it == by_id_.end()) {
      throw ValidationError("network '" + n.id + "' names unknown parent '" +
                            n.parent + "'");
    }
    const NetworkNode& p = nodes_[it->second];
    if (p.tier != n.tier - 1) {
      throw ValidationError("network '" + n.id + "' at tier " +
                            std::to_string(n.tier) + " has parent '" + p.id +
                            "' at tier " + std::to_string(p.tier) +
                            "; parents must sit exactly one tier up");
    }
    parent_[i] = it->second;
    ++child_count_[it->second];
  }
  for (int t = 1; t <= tiers_; ++t) {
    if (tier_members_[static_cast<std::size_t>(t - 1)].empty()) {
      throw ValidationError("no networks at tier " + std::to_string(t) +
                            "; tiers must be contiguous from 1");
    }
  }
}

std::uint32_t Topology::index_of(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) {
    throw ValidationError("unknown network id '" + id + "'");
  }
  return it->second;
}

const std::vector<std::uint32_t>& Topology::tier_members(int tier) const {
  if (tier < 1 || tier > tiers_) {
    throw ValidationError("tier " + std::to_string(tier) + " out of range");
  }
  return tier_members_[static_cast<std::size_t>(tier - 1)];
}

std::vector<std::uint32_t> Topology::leaves() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (child_count_[i] == 0) out.push_back(i);
  }
  return out;
}

std::vector<std::uint32_t> Topology::path_to_root(std::uint32_t idx) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t cur = idx; cur != kNoIndex; cur = parent_[cur]) {
    out.push_back(cur);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

Bid make_bid(std::uint32_t user_index, const UserFlow& flow,
             const ServiceCatalog& catalog) {
  return make_bid(user_index, flow, catalog, flow.willingness_to_pay);
}

Bid make_bid(std::uint32_t user_index, const UserFlow& flow,
             const ServiceCatalog& catalog, Currency declared_value) {
  const ServiceClass& svc = catalog[catalog.index_of(flow.service_id)];
  if (declared_value.is_negative()) {
    throw ValidationError("flow '" + flow.user_id +
                          "' declares a negative value");
  }
  Bid bid;
  bid.user = user_index;
  bid.rate = svc.mean_rate;
  bid.unit_price = declared_value / svc.mean_rate;
  bid.service = catalog.index_of(flow.service_id);
  bid.arrival_seq = flow.arrival_seq;
  bid.value = declared_value;
  return bid;
}

Instance::Instance(Topology topology, ServiceCatalog catalog,
                   std::vector<UserFlow> flows)
    : topology_(std::move(topology)),
      catalog_(std::move(catalog)),
      flows_(std::move(flows)) {
  paths_.reserve(flows_.size());
  for (const UserFlow& flow : flows_) {
    if (flow.user_id.empty()) {
      throw ValidationError("flow with empty user id");
    }
    if (flow.willingness_to_pay.is_negative()) {
      throw ValidationError("flow '" + flow.user_id +
                            "' has negative willingness to pay");
    }
    catalog_.index_of(flow.service_id);  // must exist
    if (flow.attachment_path.empty()) {
      throw ValidationError("flow '" + flow.user_id +
                            "' has an empty attachment path");
    }
    std::vector<std::uint32_t> path;
    path.reserve(flow.attachment_path.size());
    for (const std::string& id : flow.attachment_path) {
      path.push_back(topology_.index_of(id));
    }
    // The path must start at tier 1 and walk down one containment edge at
    // a time, so "delete from lower tiers" is well defined for it.
    if (topology_[path.front()].tier != 1) {
      throw ValidationError("flow '" + flow.user_id +
                            "' path must start at a tier-1 network");
    }
    for (std::size_t i = 1; i < path.size(); ++i) {
      if (topology_.parent_of(path[i]) != path[i - 1]) {
        throw ValidationError(
            "flow '" + flow.user_id + "' path breaks containment between '" +
            topology_[path[i - 1]].id + "' and '" + topology_[path[i]].id +
            "'");
      }
    }
    paths_.push_back(std::move(path));
  }
}

Bid Instance::make_bid(std::uint32_t user) const {
  return tierbid::make_bid(user, flows_[user], catalog_);
}

std::vector<std::vector<Bid>> Instance::build_bid_sets() const {
  std::vector<std::vector<Bid>> sets(topology_.size());
  for (std::uint32_t u = 0; u < flows_.size(); ++u) {
    Bid bid = make_bid(u);
    for (std::uint32_t net : paths_[u]) {
      sets[net].push_back(bid);
    }
  }
  return sets;
}

}  // namespace tierbid

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
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "tierbid/fixed.hpp"

namespace tierbid {

constexpr std::uint32_t kNoIndex = std::numeric_limits<std::uint32_t>::max();

/// One service class: a named traffic type with a fixed mean rate. Every
/// flow of a given service consumes exactly the class rate while served.
struct ServiceClass {
  std::string id;
  Bandwidth mean_rate;  // strictly positive
  std::string label;    // free-form, for reports only
};

/// Immutable, validated set of service classes, addressable by dense index
/// or by id. Also exposes the number of distinct rates, which bounds the
/// per-network charge table (one walk per distinct rate, not per winner).
class ServiceCatalog {
public:
  ServiceCatalog() = default;
  explicit ServiceCatalog(std::vector<ServiceClass> services);

  std::size_t size() const { return services_.size(); }
  const ServiceClass& operator[](std::uint32_t idx) const {
    return services_[idx];
  }
  const std::vector<ServiceClass>& services() const { return services_; }

  bool contains(const std::string& id) const {
    return by_id_.find(id) != by_id_.end();
  }
  /// Throws ValidationError for an unknown id.
  std::uint32_t index_of(const std::string& id) const;

  /// Number of distinct mean rates across all classes.
  std::size_t distinct_rate_count() const { return distinct_rates_; }

private:
  std::vector<ServiceClass> services_;
  std::unordered_map<std::string, std::uint32_t> by_id_;
  std::size_t distinct_rates_ = 0;
};

/// One network in the hierarchy. Tier 1 is the widest coverage layer;
/// larger tiers are nested inside it with progressively smaller footprints.
/// `parent` is empty for tier-1 networks and otherwise names a node exactly
/// one tier above.
struct NetworkNode {
  std::string id;
  int tier = 1;
  Bandwidth capacity;  // nominal shared downlink capacity, > 0
  std::string parent;  // empty at tier 1
};

/// Validated containment forest of networks. Construction checks that ids
/// are unique, tiers start at 1 and are contiguous, every non-root has a
/// parent exactly one tier up, and capacities are positive.
class Topology {
public:
  Topology() = default;
  explicit Topology(std::vector<NetworkNode> nodes);

  std::size_t size() const { return nodes_.size(); }
  int tiers() const { return tiers_; }
  const NetworkNode& operator[](std::uint32_t idx) const {
    return nodes_[idx];
  }
  const std::vector<NetworkNode>& nodes() const { return nodes_; }

  bool contains(const std::string& id) const {
    return by_id_.find(id) != by_id_.end();
  }
  /// Throws ValidationError for an unknown id.
  std::uint32_t index_of(const std::string& id) const;

  /// kNoIndex for tier-1 networks.
  std::uint32_t parent_of(std::uint32_t idx) const { return parent_[idx]; }

  /// Indices of the networks at a given tier (1-based), in input order.
  const std::vector<std::uint32_t>& tier_members(int tier) const;

  bool is_leaf(std::uint32_t idx) const { return child_count_[idx] == 0; }
  std::vector<std::uint32_t> leaves() const;

  /// Chain from the node up to its tier-1 root, returned root-first.
  std::vector<std::uint32_t> path_to_root(std::uint32_t idx) const;

private:
  std::vector<NetworkNode> nodes_;
  std::unordered_map<std::string, std::uint32_t> by_id_;
  std::vector<std::uint32_t> parent_;
  std::vector<int> child_count_;
  std::vector<std::vector<std::uint32_t>> tier_members_;  // [tier - 1]
  int tiers_ = 0;
};

/// One user's demand for the current round: which service they want, what
/// the whole transfer is worth to them, and which networks they can hear.
/// The attachment path lists reachable networks from the widest tier down;
/// it must be a top-anchored chain in the topology (tier 1, 2, ... with each
/// element the parent of the next). Shorter paths model users outside the
/// small-cell footprints.
struct UserFlow {
  std::string user_id;
  std::string service_id;
  Currency willingness_to_pay;  // >= 0, for the full service
  std::vector<std::string> attachment_path;
  std::uint64_t arrival_seq = 0;  // admission order, breaks price ties
};

/// A sealed bid as a network sees it. `unit_price` is the declared value
/// spread per unit of rate (value / rate, rounded); `value` keeps the exact
/// declared amount so welfare and charge sums never accumulate rounding.
/// `user` and `service` are dense indices into the owning instance.
struct Bid {
  std::uint32_t user = kNoIndex;
  Currency unit_price;
  Bandwidth rate;
  std::uint32_t service = kNoIndex;
  std::uint64_t arrival_seq = 0;
  Currency value;
};

/// Winner-determination order: unit price descending, then earlier arrival,
/// then smaller user index. Total over well-formed bid sets, so sorted scans
/// are reproducible across platforms and thread counts.
inline bool bid_sorts_before(const Bid& a, const Bid& b) {
  if (a.unit_price != b.unit_price) return b.unit_price < a.unit_price;
  if (a.arrival_seq != b.arrival_seq) return a.arrival_seq < b.arrival_seq;
  return a.user < b.user;
}

/// Builds the bid a flow submits: rate comes from the service catalog and
/// the unit price is the declared value divided by that rate.
Bid make_bid(std::uint32_t user_index, const UserFlow& flow,
             const ServiceCatalog& catalog);

/// Same, but with the declared value overridden (used when an agent shades
/// or inflates relative to its true valuation).
Bid make_bid(std::uint32_t user_index, const UserFlow& flow,
             const ServiceCatalog& catalog, Currency declared_value);

/// A full single-round problem: topology, catalog, and the admitted flows,
/// cross-validated on construction. Flows keep their input order; their
/// position is the dense user index used everywhere downstream.
class Instance {
public:
  Instance(Topology topology, ServiceCatalog catalog,
           std::vector<UserFlow> flows);

  const Topology& topology() const { return topology_; }
  const ServiceCatalog& catalog() const { return catalog_; }
  const std::vector<UserFlow>& flows() const { return flows_; }
  std::size_t user_count() const { return flows_.size(); }

  /// Network indices on the flow's attachment path, widest tier first.
  const std::vector<std::uint32_t>& path(std::uint32_t user) const {
    return paths_[user];
  }

  Bid make_bid(std::uint32_t user) const;

  /// Registers every flow's bid with every network on its attachment path:
  /// one bid set per network, and each user appears at most once per tier.
  std::vector<std::vector<Bid>> build_bid_sets() const;

private:
  Topology topology_;
  ServiceCatalog catalog_;
  std::vector<UserFlow> flows_;
  std::vector<std::vector<std::uint32_t>> paths_;
};

}  // namespace tierbid

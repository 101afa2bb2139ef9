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

#include "tierbid/auction.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <utility>

#include "tierbid/errors.hpp"
#include "tierbid/multicast.hpp"
#include "tierbid/util.hpp"

namespace tierbid {
namespace {

AuctionEntry entry_from_bid(const Bid& b) {
  AuctionEntry e;
  e.unit_price = b.unit_price;
  e.rate = b.rate;
  e.arrival_seq = b.arrival_seq;
  e.tie_user = b.user;
  e.value = b.value;
  e.service = b.service;
  e.user = b.user;
  return e;
}

/// Compact stand-in for an entry during ordering: everything the
/// comparator needs plus the entry's position, so the wide structs (a
/// group entry drags its member list along) move exactly once.
struct SortKey {
  std::int64_t price_raw;
  std::uint64_t arrival_seq;
  std::uint32_t tie_user;
  std::uint32_t index;
};

constexpr int kRadixPasses = 20;

/// Radix byte for pass `p` (least-significant pass first): tie_user bytes
/// 0-3, then arrival_seq bytes 4-11, then price bytes 12-19. Price bytes
/// are sign-biased and complemented so plain ascending bucket order walks
/// prices from high to low.
inline unsigned radix_digit(const SortKey& k, int p) {
  if (p < 4) return (k.tie_user >> (8 * p)) & 0xffu;
  if (p < 12) return (k.arrival_seq >> (8 * (p - 4))) & 0xffu;
  const std::uint64_t biased =
      static_cast<std::uint64_t>(k.price_raw) ^ (1ull << 63);
  return 0xffu ^ static_cast<unsigned>((biased >> (8 * (p - 12))) & 0xffu);
}

/// Sorts keys into winner-determination order: price descending, then
/// arrival, then user id, then input position. That last tiebreak makes
/// the order total, so the sorted sequence is unique and any correct
/// algorithm produces the same one. Least-significant-digit counting
/// passes are used because their strictly sequential access pattern keeps
/// per-element cost flat as rounds grow, where a partition-based sort
/// degrades once the round outgrows the near caches. A pass whose digit
/// is the same in every key cannot move anything and is skipped; on
/// realistic inputs that leaves a handful of passes live.
void radix_sort_keys(std::vector<SortKey>& keys) {
  const std::size_t n = keys.size();
  if (n < 2) return;
  // Field-wise OR and AND across all keys expose the digit positions
  // where every key already agrees.
  std::uint32_t or_tie = 0, and_tie = ~0u;
  std::uint64_t or_arr = 0, and_arr = ~0ull;
  std::uint64_t or_pr = 0, and_pr = ~0ull;
  for (const SortKey& k : keys) {
    or_tie |= k.tie_user;
    and_tie &= k.tie_user;
    or_arr |= k.arrival_seq;
    and_arr &= k.arrival_seq;
    const std::uint64_t biased =
        static_cast<std::uint64_t>(k.price_raw) ^ (1ull << 63);
    or_pr |= biased;
    and_pr &= biased;
  }
  bool active[kRadixPasses];
  for (int p = 0; p < 4; ++p) {
    active[p] = (((or_tie ^ and_tie) >> (8 * p)) & 0xffu) != 0;
  }
  for (int p = 4; p < 12; ++p) {
    active[p] = (((or_arr ^ and_arr) >> (8 * (p - 4))) & 0xffu) != 0;
  }
  for (int p = 12; p < kRadixPasses; ++p) {
    active[p] = (((or_pr ^ and_pr) >> (8 * (p - 12))) & 0xffu) != 0;
  }

  std::vector<SortKey> scratch(n);
  SortKey* src = keys.data();
  SortKey* dst = scratch.data();
  for (int p = 0; p < kRadixPasses; ++p) {
    if (!active[p]) continue;
    std::uint32_t count[256] = {};
    for (std::size_t i = 0; i < n; ++i) ++count[radix_digit(src[i], p)];
    std::uint32_t sum = 0;
    for (unsigned d = 0; d < 256; ++d) {
      const std::uint32_t c = count[d];
      count[d] = sum;
      sum += c;
    }
    for (std::size_t i = 0; i < n; ++i) {
      dst[count[radix_digit(src[i], p)]++] = src[i];
    }
    std::swap(src, dst);
  }
  if (src != keys.data()) keys.swap(scratch);
}

/// Eight-byte counting passes for the packed fast path below; `varying`
/// marks the bytes where keys actually differ.
void radix_sort_u64(std::vector<std::uint64_t>& v, std::uint64_t varying) {
  const std::size_t n = v.size();
  if (n < 2) return;
  std::vector<std::uint64_t> scratch(n);
  std::uint64_t* src = v.data();
  std::uint64_t* dst = scratch.data();
  for (int p = 0; p < 8; ++p) {
    if (((varying >> (8 * p)) & 0xffu) == 0) continue;
    std::uint32_t count[256] = {};
    for (std::size_t i = 0; i < n; ++i) ++count[(src[i] >> (8 * p)) & 0xffu];
    std::uint32_t sum = 0;
    for (unsigned d = 0; d < 256; ++d) {
      const std::uint32_t c = count[d];
      count[d] = sum;
      sum += c;
    }
    for (std::size_t i = 0; i < n; ++i) {
      dst[count[(src[i] >> (8 * p)) & 0xffu]++] = src[i];
    }
    std::swap(src, dst);
  }
  if (src != v.data()) v.swap(scratch);
}

/// The three fields the winner-determination comparator reads.
struct OrderFields {
  std::int64_t price_raw;
  std::uint64_t arrival_seq;
  std::uint32_t tie_user;
};

/// Running digest of the comparator fields seen so far. The OR/AND pair
/// per field exposes the bit positions where items actually differ, and
/// the monotone flag records whether arrival strictly increases in input
/// order (bid sets laid out in arrival order make this the common case).
struct OrderDigest {
  std::uint32_t or_tie = 0, and_tie = ~0u;
  std::uint64_t or_arr = 0, and_arr = ~0ull;
  std::uint64_t or_pr = 0, and_pr = ~0ull;
  std::uint64_t prev_arr = 0;
  bool arrival_increasing = true;
  bool empty = true;

  void add(const OrderFields& f) {
    or_tie |= f.tie_user;
    and_tie &= f.tie_user;
    or_arr |= f.arrival_seq;
    and_arr &= f.arrival_seq;
    const std::uint64_t biased =
        static_cast<std::uint64_t>(f.price_raw) ^ (1ull << 63);
    or_pr |= biased;
    and_pr &= biased;
    if (!empty && f.arrival_seq <= prev_arr) arrival_increasing = false;
    prev_arr = f.arrival_seq;
    empty = false;
  }
};

/// Computes the winner-determination order over n items (which arrive in
/// index order, satisfying the final tiebreak for free) and returns it as
/// item indices; `digest` summarizes the comparator fields and `at(i)`
/// re-exposes item i's. Only the bits where items actually differ decide
/// the order, so when the differing spans of price, arrival and user id
/// fit into one 64-bit word alongside the index, the sort runs over
/// packed words instead of wide keys; rounds big enough to overflow that
/// span fall back to the general key sort. When arrival strictly
/// increases in input order, equal-price items are already settled by the
/// index tiebreak alone, so the arrival and user spans drop out entirely.
template <class FieldsAt>
std::vector<std::uint32_t> winner_order_digest(std::size_t n,
                                               const OrderDigest& digest,
                                               FieldsAt&& at) {
  std::vector<std::uint32_t> order(n);
  if (n < 2) {
    if (n == 1) order[0] = 0;
    return order;
  }
  const int wp = std::bit_width(digest.or_pr ^ digest.and_pr);
  const int wa =
      digest.arrival_increasing
          ? 0
          : std::bit_width(digest.or_arr ^ digest.and_arr);
  const int wt = digest.arrival_increasing
                     ? 0
                     : std::bit_width(digest.or_tie ^ digest.and_tie);
  const int wi = std::bit_width(n - 1);
  if (wp + wa + wt + wi <= 64) {
    // A field of non-zero width w shifts by at most 64 - w because the
    // widths sum to at most 64; zero-width fields contribute nothing and
    // are skipped so no shift ever reaches 64. The price span is
    // complemented so ascending word order walks prices from high to low.
    const std::uint64_t maskp = (1ull << wp) - 1;
    const std::uint64_t maska = (1ull << wa) - 1;
    const std::uint64_t maskt = (1ull << wt) - 1;
    const int shift_tie = wi;
    const int shift_arr = wt + wi;
    const int shift_pr = wa + wt + wi;
    std::vector<std::uint64_t> packed(n);
    std::uint64_t or_c = 0, and_c = ~0ull;
    for (std::size_t i = 0; i < n; ++i) {
      const OrderFields f = at(i);
      std::uint64_t c = static_cast<std::uint64_t>(i);
      if (wt > 0) {
        c |= (static_cast<std::uint64_t>(f.tie_user) & maskt) << shift_tie;
      }
      if (wa > 0) c |= (f.arrival_seq & maska) << shift_arr;
      if (wp > 0) {
        const std::uint64_t biased =
            static_cast<std::uint64_t>(f.price_raw) ^ (1ull << 63);
        c |= (~biased & maskp) << shift_pr;
      }
      packed[i] = c;
      or_c |= c;
      and_c &= c;
    }
    radix_sort_u64(packed, or_c ^ and_c);
    const std::uint64_t maski = (1ull << wi) - 1;
    for (std::size_t i = 0; i < n; ++i) {
      order[i] = static_cast<std::uint32_t>(packed[i] & maski);
    }
    return order;
  }
  std::vector<SortKey> keys;
  keys.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const OrderFields f = at(i);
    keys.push_back({f.price_raw, f.arrival_seq, f.tie_user, i});
  }
  radix_sort_keys(keys);
  for (std::size_t i = 0; i < n; ++i) order[i] = keys[i].index;
  return order;
}

template <class FieldsAt>
std::vector<std::uint32_t> winner_order_n(std::size_t n, FieldsAt&& at) {
  OrderDigest digest;
  for (std::size_t i = 0; i < n; ++i) digest.add(at(i));
  return winner_order_digest(n, digest, at);
}

std::vector<std::uint32_t> winner_order(
    const std::vector<AuctionEntry>& entries) {
  return winner_order_n(entries.size(), [&](std::size_t i) {
    const AuctionEntry& e = entries[i];
    return OrderFields{e.unit_price.raw(), e.arrival_seq, e.tie_user};
  });
}

/// Single admission pass following the sorted order; `rate_at(i)` exposes
/// the rate at order position i, and the win/lose callbacks fire in that
/// same order, so losers come out still in descending order, which is
/// what the charge walk needs. Returns the leftover capacity.
template <class RateAt, class Win, class Lose>
Bandwidth admission_scan(const std::vector<std::uint32_t>& order,
                         RateAt&& rate_at, Bandwidth capacity,
                         bool prefix_winners, Win&& win, Lose&& lose) {
  Bandwidth residual = capacity;
  bool open = true;
  for (const std::uint32_t idx : order) {
    const Bandwidth r = rate_at(idx);
    const bool fits = !(residual < r);
    if (fits && (open || !prefix_winners)) {
      residual -= r;
      win(idx);
    } else {
      open = false;
      lose(idx);
    }
  }
  return residual;
}

/// Per-bid sanity checks, applied while each network's set streams through
/// its round so no separate validation pass over every bid is needed.
void validate_bid(const Bid& b, std::size_t user_count) {
  if (b.user >= user_count) {
    throw ValidationError("bid references a user index out of range");
  }
  if (!(Fixed{} < b.rate)) {
    throw ValidationError("bid with non-positive rate");
  }
  if (b.unit_price.is_negative() || b.value.is_negative()) {
    throw ValidationError("bid with negative price or value");
  }
}

/// Working state for one network's round while later tiers still run.
/// Unicast rounds carry their losers as bid indexes and materialize only
/// the ones that survive the purge; multicast rounds hold real entries
/// because groups exist nowhere else.
struct RoundSplit {
  std::vector<AuctionEntry> winners;
  std::vector<AuctionEntry> loser_entries;
  std::vector<std::uint32_t> loser_bids;
  Bandwidth residual;
};

AuctionEntry entry_from_group(MulticastGroupBid&& g) {
  AuctionEntry e;
  e.unit_price = g.aggregate_price;
  e.rate = g.rate;
  e.arrival_seq = g.arrival_seq;
  e.tie_user = g.tie_user;
  e.value = g.total_value;
  e.service = g.service;
  e.members = std::move(g.members);
  return e;
}

}  // namespace

Currency compute_charge_local(Bandwidth rate, const NetworkRoundState& state) {
  Currency total;
  Bandwidth remaining = rate;
  for (const AuctionEntry& e : state.losing_index) {
    if (!(Fixed{} < remaining)) break;
    if (!(remaining < e.rate)) {
      total += e.value;
      remaining -= e.rate;
    } else {
      total += e.unit_price * remaining;
      remaining = Fixed{};
    }
  }
  return total;
}

Currency compute_charge_local(const Bid& winner,
                              const NetworkRoundState& state) {
  return std::min(compute_charge_local(winner.rate, state), winner.value);
}

WinnerSplit determine_winners(std::vector<AuctionEntry> entries,
                              Bandwidth capacity, bool prefix_winners) {
  const std::vector<std::uint32_t> order = winner_order(entries);
  WinnerSplit split;
  split.residual = admission_scan(
      order, [&](std::uint32_t i) { return entries[i].rate; }, capacity,
      prefix_winners,
      [&](std::uint32_t i) { split.winners.push_back(std::move(entries[i])); },
      [&](std::uint32_t i) { split.losers.push_back(std::move(entries[i])); });
  return split;
}

AuctionOutcome run_hierarchical_auction(
    const Topology& topology, const std::vector<std::vector<Bid>>& bid_sets,
    std::size_t user_count, const EngineConfig& config,
    const std::vector<Bandwidth>* capacities) {
  if (bid_sets.size() != topology.size()) {
    throw ValidationError("bid sets do not match the topology size");
  }
  if (capacities != nullptr && capacities->size() != topology.size()) {
    throw ValidationError("capacity overrides do not match the topology size");
  }
  const bool multicast = !config.multicast_thresholds.empty();
  if (multicast) {
    if (config.multicast_thresholds.size() !=
        static_cast<std::size_t>(topology.tiers())) {
      throw ValidationError("multicast thresholds must cover every tier");
    }
    for (int n : config.multicast_thresholds) {
      if (n < 1) {
        throw ValidationError("multicast threshold must be at least 1");
      }
    }
    // Grouping folds same-service bids into one entry at the service rate,
    // so a service class must not show up with two different rates.
    std::map<std::uint32_t, std::int64_t> rate_of;
    for (const std::vector<Bid>& set : bid_sets) {
      for (const Bid& b : set) {
        const auto [it, inserted] = rate_of.emplace(b.service, b.rate.raw());
        if (!inserted && it->second != b.rate.raw()) {
          throw ValidationError(
              "bids of one service class declare differing rates");
        }
      }
    }
  }
  AuctionOutcome out;
  out.users.assign(user_count, UserOutcome{});
  out.networks.resize(topology.size());
  std::vector<std::uint8_t> served(user_count, 0);
  std::vector<RoundSplit> splits(topology.size());

  for (int tier = 1; tier <= topology.tiers(); ++tier) {
    const std::vector<std::uint32_t>& nets = topology.tier_members(tier);

    // Same-tier networks share no users, so their scans are independent;
    // `served` is only read here and only written between tiers.
    parallel_for(nets.size(), config.threads, [&](std::size_t j) {
      const std::uint32_t net = nets[j];
      NetworkRoundState& st = out.networks[net];
      st.network = net;
      st.capacity =
          capacities != nullptr ? (*capacities)[net] : topology[net].capacity;

      Bandwidth demand;
      RoundSplit& sp = splits[net];
      if (multicast) {
        std::vector<Bid> pending;
        pending.reserve(bid_sets[net].size());
        for (const Bid& b : bid_sets[net]) {
          validate_bid(b, user_count);
          if (!served[b.user]) {
            pending.push_back(b);
            demand += b.rate;
          }
        }
        GroupingResult grouped =
            form_groups(pending, config.multicast_thresholds[
                                     static_cast<std::size_t>(tier - 1)]);
        std::vector<AuctionEntry> entries;
        entries.reserve(grouped.groups.size() + grouped.unicast.size());
        for (MulticastGroupBid& g : grouped.groups) {
          entries.push_back(entry_from_group(std::move(g)));
        }
        for (const Bid& b : grouped.unicast) {
          entries.push_back(entry_from_bid(b));
        }
        const std::vector<std::uint32_t> order = winner_order(entries);
        sp.residual = admission_scan(
            order, [&](std::uint32_t i) { return entries[i].rate; },
            st.capacity, config.prefix_winners,
            [&](std::uint32_t i) {
              sp.winners.push_back(std::move(entries[i]));
            },
            [&](std::uint32_t i) {
              sp.loser_entries.push_back(std::move(entries[i]));
            });
      } else {
        // Unicast rounds order and admit straight off the bid set: each
        // winner is materialized exactly once, in its final slot, and
        // losers stay as bid indexes until the purge.
        const std::vector<Bid>& set = bid_sets[net];
        std::vector<std::uint32_t> cand;
        cand.reserve(set.size());
        OrderDigest digest;
        for (std::uint32_t bi = 0; bi < set.size(); ++bi) {
          const Bid& b = set[bi];
          validate_bid(b, user_count);
          if (served[b.user]) continue;
          cand.push_back(bi);
          demand += b.rate;
          digest.add({b.unit_price.raw(), b.arrival_seq, b.user});
        }
        const std::vector<std::uint32_t> order =
            winner_order_digest(cand.size(), digest, [&](std::size_t i) {
              const Bid& b = set[cand[i]];
              return OrderFields{b.unit_price.raw(), b.arrival_seq, b.user};
            });
        sp.residual = admission_scan(
            order, [&](std::uint32_t i) { return set[cand[i]].rate; },
            st.capacity, config.prefix_winners,
            [&](std::uint32_t i) {
              sp.winners.push_back(entry_from_bid(set[cand[i]]));
            },
            [&](std::uint32_t i) { sp.loser_bids.push_back(cand[i]); });
      }
      st.demand = demand;
    });

    // Commit this tier's winners before any deeper tier runs: their bids
    // vanish from every network further down.
    for (std::uint32_t net : nets) {
      NetworkRoundState& st = out.networks[net];
      RoundSplit& sp = splits[net];
      st.residual = sp.residual;
      st.winners = std::move(sp.winners);
      for (const AuctionEntry& w : st.winners) {
        st.welfare += w.value;
        out.weight_total += w.unit_price;
        const auto mark = [&](std::uint32_t user, Currency value) {
          if (served[user]) {
            throw InternalError("user served twice in one round");
          }
          served[user] = 1;
          out.users[user].served = true;
          out.users[user].network = net;
          out.users[user].tier = tier;
          out.social_welfare += value;
          ++st.users_served;
        };
        if (w.is_group()) {
          for (const GroupMember& m : w.members) mark(m.user, m.value);
        } else {
          mark(w.user, w.value);
        }
      }
    }
  }

  // Purge and charge. A losing bid whose user was served at some other
  // network drops out of the losing index; a losing group survives as long
  // as any member is still unserved. Each network then prices its winners
  // off its own surviving losers, one walk per distinct service rate, and
  // no one ever pays more than they declared.
  parallel_for(topology.size(), config.threads, [&](std::size_t n) {
    const std::uint32_t net = static_cast<std::uint32_t>(n);
    NetworkRoundState& st = out.networks[net];
    RoundSplit& sp = splits[net];
    if (!sp.loser_bids.empty()) {
      // Losing bids land in index-random order (the list is price-sorted),
      // so each lookup would stall on a cache miss; the whole read stream
      // is known up front, so prefetching a fixed distance ahead hides it.
      // A bid can straddle two cache lines, hence the second prefetch.
      constexpr std::size_t kAhead = 32;
      const std::vector<Bid>& set = bid_sets[net];
      st.losing_index.reserve(sp.loser_bids.size());
      for (std::size_t k = 0; k < sp.loser_bids.size(); ++k) {
        if (k + kAhead < sp.loser_bids.size()) {
          const char* next =
              reinterpret_cast<const char*>(&set[sp.loser_bids[k + kAhead]]);
          __builtin_prefetch(next);
          __builtin_prefetch(next + sizeof(Bid) - 1);
        }
        const Bid& b = set[sp.loser_bids[k]];
        if (!served[b.user]) {
          st.losing_index.push_back(entry_from_bid(b));
        }
      }
    } else {
      st.losing_index = std::move(sp.loser_entries);
      std::erase_if(st.losing_index, [&](const AuctionEntry& l) {
        if (!l.is_group()) return served[l.user] != 0;
        for (const GroupMember& m : l.members) {
          if (!served[m.user]) return false;
        }
        return true;
      });
    }
    if (!config.charging) return;

    // One walk per distinct service rate that actually won here; every
    // winner of that rate then shares the precomputed figure.
    std::map<std::int64_t, Currency> charge_by_rate;
    for (const AuctionEntry& w : st.winners) {
      charge_by_rate.emplace(w.rate.raw(), Currency{});
    }
    for (auto& [rate_raw, charge] : charge_by_rate) {
      charge = compute_charge_local(Fixed::from_raw(rate_raw), st);
    }
    for (const AuctionEntry& w : st.winners) {
      Currency total = std::min(charge_by_rate[w.rate.raw()], w.value);
      st.revenue += total;
      if (w.is_group()) {
        for (const auto& [user, share] : split_group_charge(w.members, total)) {
          out.users[user].charge = share;
        }
      } else {
        out.users[w.user].charge = total;
      }
    }
  });
  for (const NetworkRoundState& st : out.networks) {
    out.revenue += st.revenue;
  }
  return out;
}

}  // namespace tierbid

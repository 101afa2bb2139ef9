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
//
// End-to-end acceptance suite. Each criterion prints one [PASS]/[FAIL]
// line; the exit code is the number of failed criteria. argv[1] must name
// the command-line binary (used by the reproducibility criterion).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "tierbid/auction.hpp"
#include "tierbid/bench.hpp"
#include "tierbid/coop.hpp"
#include "tierbid/core.hpp"
#include "tierbid/errors.hpp"
#include "tierbid/multicast.hpp"
#include "tierbid/oracle.hpp"
#include "tierbid/rng.hpp"
#include "tierbid/scenario.hpp"
#include "tierbid/sim.hpp"
#include "../support/generators.hpp"

namespace tierbid {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------------
// Pinned pass conditions. Every threshold the suite enforces lives here.
// ---------------------------------------------------------------------------
constexpr double kChargeAuditBudgetSec = 60.0;
constexpr double kIncentiveBudgetSec = 120.0;
constexpr double kScaleRunBudgetSec = 300.0;
constexpr std::int64_t kMidCompletionLoPpm = 50'000;   // exclusive
constexpr std::int64_t kMidCompletionHiPpm = 950'000;  // exclusive
// Mid-range completions must stay under a quarter of the population.
constexpr std::int64_t kMidCompletionNumer = 1;
constexpr std::int64_t kMidCompletionDenom = 4;
constexpr int kHandoffP95Max = 1;
constexpr std::int64_t kFitExponentMaxPpm = 1'150'000;  // vs N·log2 N
constexpr std::int64_t kDoublingRatioMaxPpm = 2'600'000;

struct Tally {
  long long checks = 0;
  long long failures = 0;
  std::string note;  // first failure, for the summary line

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      ++failures;
      if (note.empty()) note = what;
    }
  }
  bool ok() const { return checks > 0 && failures == 0; }
};

// Ordering evidence collected while other criteria run their instances,
// folded into the dedicated ordering criterion below.
Tally g_ordering;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

// Per-network admission ordering. With skip-greedy admission no surviving
// losing bid may still fit the final residual (the scan would have taken
// it); in prefix mode no losing bid may out-price any winner of its network.
void check_ordering(const AuctionOutcome& outcome, bool prefix, Tally& t) {
  for (const NetworkRoundState& st : outcome.networks) {
    Currency min_winner =
        Fixed::from_raw(std::numeric_limits<std::int64_t>::max());
    for (const AuctionEntry& w : st.winners) {
      min_winner = std::min(min_winner, w.unit_price);
    }
    for (const AuctionEntry& l : st.losing_index) {
      if (prefix) {
        t.expect(!(min_winner < l.unit_price),
                 "prefix mode: loser out-priced a winner");
      } else {
        t.expect(st.residual < l.rate,
                 "skip mode: surviving loser fits the residual");
      }
    }
  }
}

// Engine-vs-counterfactual comparison for every user of one instance.
void check_oracle_equivalence(const Instance& instance, Tally& t) {
  const std::vector<std::vector<Bid>> sets = instance.build_bid_sets();
  const AuctionOutcome outcome = run_hierarchical_auction(
      instance.topology(), sets, instance.user_count());
  for (std::uint32_t u = 0; u < instance.user_count(); ++u) {
    const Currency oracle =
        vcg_oracle_charge(instance.topology(), sets, instance.user_count(), u,
                          EngineConfig{}, nullptr, &outcome);
    if (outcome.users[u].served) {
      t.expect(outcome.users[u].charge == oracle,
               "served charge diverged from the counterfactual price");
    } else {
      t.expect(oracle == Fixed{}, "an unserved user had an externality");
    }
  }
  check_ordering(outcome, false, g_ordering);
}

// Equal-rate chain-forest instance from explicit chain capacities and
// explicit (value, chain) users; the exhaustive sweep enumerates these.
Instance chain_case(const std::vector<std::vector<Fixed>>& chains,
                    const std::vector<std::pair<Fixed, int>>& users) {
  testgen::GenInstance gen;
  gen.services = {{"svc", Fixed::from_units(1), ""}};
  std::vector<std::vector<std::string>> paths(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t d = 0; d < chains[c].size(); ++d) {
      const std::string id =
          "c" + std::to_string(c) + "-" + std::to_string(d + 1);
      gen.networks.push_back({id, static_cast<int>(d + 1), chains[c][d],
                              d == 0 ? "" : paths[c].back()});
      paths[c].push_back(id);
    }
  }
  for (std::size_t i = 0; i < users.size(); ++i) {
    UserFlow flow;
    flow.user_id = "u" + std::to_string(i);
    flow.service_id = "svc";
    flow.willingness_to_pay = users[i].first;
    flow.attachment_path = paths[static_cast<std::size_t>(users[i].second)];
    flow.arrival_seq = i;
    gen.flows.push_back(std::move(flow));
  }
  return gen.instance();
}

// Every assignment of n users to (value grid x chain) combinations, for
// every population size in [min_users, max_users].
long long enumerate_chain_cases(const std::vector<std::vector<Fixed>>& chains,
                                int max_users,
                                const std::vector<Fixed>& grid, Tally& t,
                                int min_users = 1) {
  const long long options =
      static_cast<long long>(grid.size()) *
      static_cast<long long>(chains.size());
  long long instances = 0;
  for (int n = min_users; n <= max_users; ++n) {
    long long combos = 1;
    for (int i = 0; i < n; ++i) combos *= options;
    for (long long code = 0; code < combos; ++code) {
      long long rest = code;
      std::vector<std::pair<Fixed, int>> users;
      users.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const long long pick = rest % options;
        rest /= options;
        users.emplace_back(grid[static_cast<std::size_t>(
                               pick % static_cast<long long>(grid.size()))],
                           static_cast<int>(
                               pick / static_cast<long long>(grid.size())));
      }
      check_oracle_equivalence(chain_case(chains, users), t);
      ++instances;
    }
  }
  return instances;
}

// --------------------------------------------------------------------------
// 1. Local charges equal the full counterfactual rerun, exactly.
// --------------------------------------------------------------------------
bool criterion1(std::string& detail) {
  const auto start = Clock::now();
  Tally t;

  const Fixed u1 = Fixed::from_units(1);
  const Fixed u2 = Fixed::from_units(2);
  const Fixed u3 = Fixed::from_units(3);
  const std::vector<Fixed> grid012 = {Fixed{}, u1, u2};
  const std::vector<Fixed> grid123 = {u1, u2, u3};
  const std::vector<Fixed> grid12 = {u1, u2};

  long long exhaustive = 0;
  for (const Fixed& cap : {u1, u2, u3}) {
    exhaustive += enumerate_chain_cases({{cap}}, 6, grid123, t);
  }
  for (const Fixed& top : {u1, u2}) {
    for (const Fixed& low : {u1, u2}) {
      exhaustive += enumerate_chain_cases({{top, low}}, 6, grid123, t);
      exhaustive += enumerate_chain_cases({{top}, {low}}, 4, grid012, t);
    }
  }
  exhaustive += enumerate_chain_cases({{u1}, {u1, u1}}, 4, grid012, t);
  exhaustive += enumerate_chain_cases({{u2}}, 8, grid12, t, 7);

  Rng rng(20260814);
  for (int trial = 0; trial < 1000; ++trial) {
    const testgen::GenInstance gen = testgen::random_chain_forest(rng, 50);
    check_oracle_equivalence(gen.instance(), t);
  }

  const double elapsed =
      std::chrono::duration<double>(Clock::now() - start).count();
  t.expect(elapsed < kChargeAuditBudgetSec, "over the time budget");
  std::ostringstream os;
  os << exhaustive << " exhaustive + 1000 random instances, "
     << t.checks << " charges, " << fmt(elapsed) << "s";
  detail = os.str() + (t.note.empty() ? "" : "; " + t.note);
  return t.ok();
}

// --------------------------------------------------------------------------
// 2. Truthful declaration dominates every factor on a 20-point bid grid.
// --------------------------------------------------------------------------
std::vector<std::vector<Bid>> bid_sets_with_declared(const Instance& instance,
                                                     std::uint32_t target,
                                                     Currency declared) {
  std::vector<std::vector<Bid>> sets(instance.topology().size());
  for (std::uint32_t u = 0; u < instance.user_count(); ++u) {
    const Bid b = u == target
                      ? make_bid(u, instance.flows()[u], instance.catalog(),
                                 declared)
                      : instance.make_bid(u);
    for (std::uint32_t net : instance.path(u)) {
      sets[net].push_back(b);
    }
  }
  return sets;
}

bool criterion2(std::string& detail) {
  const auto start = Clock::now();
  Tally t;

  std::vector<Fixed> factors;
  for (int m = 100'000; m <= 900'000; m += 100'000) {
    factors.push_back(Fixed::from_raw(m));
  }
  factors.push_back(Fixed::from_raw(950'000));
  factors.push_back(Fixed::from_raw(1'050'000));
  for (int m = 1'150'000; m <= 1'950'000; m += 100'000) {
    factors.push_back(Fixed::from_raw(m));
  }
  t.expect(factors.size() == 20, "factor grid must have 20 points");

  Rng rng(20260815);
  for (int trial = 0; trial < 500; ++trial) {
    const testgen::GenInstance gen = testgen::random_chain_forest(rng, 20);
    const Instance instance = gen.instance();
    const std::uint32_t target = static_cast<std::uint32_t>(
        static_cast<std::size_t>(trial) % instance.user_count());
    const Currency value = instance.flows()[target].willingness_to_pay;

    const AuctionOutcome truthful = run_hierarchical_auction(
        instance.topology(), instance.build_bid_sets(),
        instance.user_count());
    check_ordering(truthful, false, g_ordering);
    const Currency truthful_payoff =
        truthful.users[target].served ? value - truthful.users[target].charge
                                      : Currency{};

    for (const Fixed& factor : factors) {
      const AuctionOutcome deviated = run_hierarchical_auction(
          instance.topology(),
          bid_sets_with_declared(instance, target, value * factor),
          instance.user_count());
      const Currency deviated_payoff =
          deviated.users[target].served
              ? value - deviated.users[target].charge
              : Currency{};
      t.expect(!(truthful_payoff < deviated_payoff),
               "a non-truthful declaration paid off");
    }
  }

  const double elapsed =
      std::chrono::duration<double>(Clock::now() - start).count();
  t.expect(elapsed < kIncentiveBudgetSec, "over the time budget");
  std::ostringstream os;
  os << "500 instances x 20 factors, " << fmt(elapsed) << "s";
  detail = os.str() + (t.note.empty() ? "" : "; " + t.note);
  return t.ok();
}

// --------------------------------------------------------------------------
// 3. Winners out-rank surviving losers at every network, in both modes.
// --------------------------------------------------------------------------
bool criterion3(std::string& detail) {
  Tally t;
  Rng rng(20260816);
  for (int trial = 0; trial < 500; ++trial) {
    const testgen::GenInstance gen = testgen::random_forest(rng, 25);
    const Instance instance = gen.instance();
    const std::vector<std::vector<Bid>> sets = instance.build_bid_sets();
    for (const bool prefix : {false, true}) {
      EngineConfig config;
      config.prefix_winners = prefix;
      check_ordering(run_hierarchical_auction(instance.topology(), sets,
                                              instance.user_count(), config),
                     prefix, t);
    }
  }
  for (int trial = 0; trial < 300; ++trial) {
    const testgen::GenInstance gen = testgen::random_chain_forest(rng, 30);
    const Instance instance = gen.instance();
    const std::vector<std::vector<Bid>> sets = instance.build_bid_sets();
    const std::vector<int> thresholds(
        static_cast<std::size_t>(instance.topology().tiers()), 2);
    for (const bool prefix : {false, true}) {
      EngineConfig config;
      config.prefix_winners = prefix;
      check_ordering(run_hierarchical_auction(instance.topology(), sets,
                                              instance.user_count(), config),
                     prefix, t);
      check_ordering(
          run_multicast_auction(instance.topology(), sets,
                                instance.user_count(), thresholds, config),
          prefix, t);
    }
  }

  std::ostringstream os;
  os << t.checks << " sweep checks + " << g_ordering.checks
     << " from earlier criteria";
  const std::string note =
      !t.note.empty() ? t.note : g_ordering.note;
  detail = os.str() + (note.empty() ? "" : "; " + note);
  return t.ok() && g_ordering.failures == 0;
}

// --------------------------------------------------------------------------
// 4. Hierarchical allocation matches the exhaustive optimum.
// --------------------------------------------------------------------------
bool criterion4(std::string& detail) {
  Tally t;
  Rng rng(20260817);
  for (int trial = 0; trial < 2000; ++trial) {
    // At most 10 users over at most 4 networks (two chains, depth <= 2).
    const testgen::GenInstance gen =
        testgen::random_chain_forest(rng, 10, 2, 2);
    const Instance instance = gen.instance();
    const AuctionOutcome outcome = run_hierarchical_auction(
        instance.topology(), instance.build_bid_sets(),
        instance.user_count());
    check_ordering(outcome, false, t);
    t.expect(outcome.social_welfare ==
                 testgen::brute_force_optimal_welfare(instance),
             "greedy welfare fell short of the exhaustive optimum");
  }
  detail = "2000 instances vs subset enumeration";
  if (!t.note.empty()) detail += "; " + t.note;
  return t.ok();
}

// --------------------------------------------------------------------------
// 5. Group bids out-price every member and never lower welfare.
// --------------------------------------------------------------------------
bool criterion5(std::string& detail) {
  Tally t;
  Rng rng(20260818);
  int with_groups = 0;
  int attempts = 0;
  int unicast_compared = 0;
  for (; attempts < 4000 && with_groups < 500; ++attempts) {
    const testgen::GenInstance gen = testgen::random_chain_forest(rng, 20);
    const Instance instance = gen.instance();
    const std::vector<std::vector<Bid>> sets = instance.build_bid_sets();
    const AuctionOutcome unicast = run_hierarchical_auction(
        instance.topology(), sets, instance.user_count());
    const std::vector<int> thresholds(
        static_cast<std::size_t>(instance.topology().tiers()), 2);
    const AuctionOutcome grouped = run_multicast_auction(
        instance.topology(), sets, instance.user_count(), thresholds);
    check_ordering(grouped, false, t);

    bool any_group = false;
    for (const NetworkRoundState& st : grouped.networks) {
      for (const std::vector<AuctionEntry>* list :
           {&st.winners, &st.losing_index}) {
        for (const AuctionEntry& e : *list) {
          if (!e.is_group()) continue;
          any_group = true;
          for (const GroupMember& m : e.members) {
            t.expect(m.unit_price < e.unit_price,
                     "a member matched or beat its group's price");
          }
        }
      }
    }
    if (any_group) {
      ++with_groups;
      t.expect(!(grouped.social_welfare < unicast.social_welfare),
               "grouping lowered welfare");
    }

    if (unicast_compared < 200) {
      ++unicast_compared;
      // Thresholds no population can meet must change nothing at all.
      const AuctionOutcome inert = run_multicast_auction(
          instance.topology(), sets, instance.user_count(),
          std::vector<int>(thresholds.size(), 10'000));
      t.expect(inert.social_welfare == unicast.social_welfare &&
                   inert.revenue == unicast.revenue,
               "unreachable thresholds changed the totals");
      for (std::uint32_t u = 0; u < instance.user_count(); ++u) {
        t.expect(inert.users[u].served == unicast.users[u].served &&
                     inert.users[u].network == unicast.users[u].network &&
                     inert.users[u].charge == unicast.users[u].charge,
                 "unreachable thresholds changed a user outcome");
      }
    }
  }
  t.expect(with_groups >= 500, "too few instances formed groups");

  std::ostringstream os;
  os << with_groups << " grouped instances out of " << attempts;
  detail = os.str() + (t.note.empty() ? "" : "; " + t.note);
  return t.ok();
}

// --------------------------------------------------------------------------
// 6. City-scale episodes: completions are decisive, handoffs are rare.
// --------------------------------------------------------------------------
bool criterion6(std::string& detail) {
  const auto start = Clock::now();
  Tally t;

  std::vector<NetworkNode> nodes = {
      {"core", 1, Fixed::from_units(500), ""},
      {"metro-1", 2, Fixed::from_units(50), "core"},
      {"metro-2", 2, Fixed::from_units(50), "core"},
  };
  for (int i = 1; i <= 10; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "cell-%02d", i);
    nodes.push_back({id, 3, Fixed::from_units(6),
                     i <= 5 ? "metro-1" : "metro-2"});
  }
  const Topology topology(std::move(nodes));
  const ServiceCatalog catalog(std::vector<ServiceClass>{
      {"video-lq", Fixed::from_units(1), ""},
      {"video-hq", Fixed::from_units(5), ""},
      {"ftp", Fixed::from_units(1), ""},
  });

  WorkloadSpec workload;
  workload.horizon = 500;
  // Fixed per-slot capacity: with capacity breathing every slot, agents
  // right at the admission cut shuttle between tiers and the handoff tail
  // reflects the breathing, not the allocation rule under study.
  workload.capacity_half_width = Fixed{};
  for (int i = 1; i <= 10; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "cell-%02d", i);
    for (const char* service : {"video-lq", "video-hq", "ftp"}) {
      workload.cohorts.push_back({id, service, ValueClass::kMedium, 40});
    }
  }

  EpisodeConfig config;
  config.threads = 2;

  std::vector<std::int64_t> completions;
  std::vector<int> handoffs;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    WorkloadSpec wl = workload;
    wl.seed = seed;
    const std::vector<BiddingAgent> agents =
        generate_workload(wl, topology, catalog);
    t.expect(agents.size() == 1200, "population size must be 1200");
    const EpisodeMetrics metrics =
        run_episode(topology, catalog, agents, wl, config);
    for (const AgentEpisode& ep : metrics.agents) {
      completions.push_back(ep.completion_ppm);
      handoffs.push_back(ep.handoffs);
    }
  }

  long long mid = 0;
  for (std::int64_t c : completions) {
    mid += c > kMidCompletionLoPpm && c < kMidCompletionHiPpm;
  }
  t.expect(mid * kMidCompletionDenom <
               static_cast<long long>(completions.size()) *
                   kMidCompletionNumer,
           "too many mid-range completions");

  std::sort(handoffs.begin(), handoffs.end());
  const std::size_t rank =
      (handoffs.size() * 95 + 99) / 100;  // ceil, nearest-rank
  const int p95 = handoffs[rank - 1];
  t.expect(p95 <= kHandoffP95Max, "95th-percentile handoffs too high");

  const double elapsed =
      std::chrono::duration<double>(Clock::now() - start).count();
  t.expect(elapsed < kScaleRunBudgetSec, "over the time budget");
  std::ostringstream os;
  os << "20 seeds x 1200 users x 500 slots; mid-range " << mid << "/"
     << completions.size() << ", handoff p95 " << p95 << ", "
     << fmt(elapsed) << "s";
  detail = os.str() + (t.note.empty() ? "" : "; " + t.note);
  return t.ok();
}

// --------------------------------------------------------------------------
// 7. Truthful bidding wins the repeated-auction payoff experiment.
// --------------------------------------------------------------------------
bool criterion7(std::string& detail) {
  Tally t;
  StrategyExperimentSpec spec;
  spec.workload.horizon = 40;
  spec.workload.cohorts = {{"net", "svc", ValueClass::kMedium, 6}};
  spec.target = 0;
  spec.replications = 200;
  spec.seed = 20260819;

  const Topology topology(std::vector<NetworkNode>{
      {"net", 1, Fixed::from_units(2), ""}});
  const ServiceCatalog catalog(
      std::vector<ServiceClass>{{"svc", Fixed::from_units(1), ""}});

  const StrategyExperimentResult result =
      strategy_payoff_experiment(spec, topology, catalog);
  t.expect(result.replications == 200, "wrong replication count");
  for (const StrategyArm* arm : {&result.shade, &result.aggressive}) {
    // Mean difference (arm - truthful) must be negative by more than one
    // standard error of the paired differences.
    t.expect((arm->mean_diff_vs_truthful + arm->se_diff_vs_truthful)
                 .is_negative(),
             "a deviation came within one standard error of truthful");
  }

  std::ostringstream os;
  os << "truthful " << result.truthful.mean_payoff.str() << ", shade diff "
     << result.shade.mean_diff_vs_truthful.str() << " (se "
     << result.shade.se_diff_vs_truthful.str() << "), aggressive diff "
     << result.aggressive.mean_diff_vs_truthful.str() << " (se "
     << result.aggressive.se_diff_vs_truthful.str() << ")";
  detail = os.str() + (t.note.empty() ? "" : "; " + t.note);
  return t.ok();
}

// --------------------------------------------------------------------------
// 8. Round time scales linearithmically with the bidder count.
// --------------------------------------------------------------------------
bool criterion8(std::string& detail) {
  Tally t;
  const BenchReport report = run_bench(BenchConfig{});
  t.expect(report.points.size() == 4, "wrong grid size");
  t.expect(report.fit_exponent_ppm <= kFitExponentMaxPpm,
           "fitted growth exponent too high");
  for (std::int64_t ratio : report.doubling_ratio_ppm) {
    t.expect(ratio <= kDoublingRatioMaxPpm, "a doubling step grew too fast");
  }

  std::ostringstream os;
  os << "exponent " << report.fit_exponent_ppm << "ppm, doublings";
  for (std::int64_t ratio : report.doubling_ratio_ppm) {
    os << " " << ratio << "ppm";
  }
  detail = os.str() + (t.note.empty() ? "" : "; " + t.note);
  return t.ok();
}

// --------------------------------------------------------------------------
// 9. The auction dominates every cooperative policy on welfare; round-robin
//    equalizes homogeneous shares.
// --------------------------------------------------------------------------
bool criterion9(std::string& detail) {
  Tally t;

  std::vector<WeightPolicy> policies(5);
  policies[0].kind = PolicyKind::kStaticService;
  policies[0].service_weights = {{"svc-a", Fixed::from_units(2)},
                                 {"svc-b", Fixed::from_units(1)}};
  policies[1].kind = PolicyKind::kTimeOfDay;
  policies[1].buckets = {{1, 2,
                          {{"svc-a", Fixed::from_units(1)},
                           {"svc-b", Fixed::from_units(3)}}}};
  policies[2].kind = PolicyKind::kAging;
  policies[2].service_weights = {{"svc-a", Fixed::from_units(2)}};
  policies[3].kind = PolicyKind::kRoundRobin;
  policies[4].kind = PolicyKind::kFcfs;

  Rng rng(20260820);
  for (int trial = 0; trial < 200; ++trial) {
    const testgen::GenInstance gen = testgen::random_chain_forest(rng, 20);
    const Instance instance = gen.instance();
    const AuctionOutcome auction = run_hierarchical_auction(
        instance.topology(), instance.build_bid_sets(),
        instance.user_count());
    check_ordering(auction, false, t);

    std::vector<FlowScheduleState> states(instance.user_count());
    for (std::uint32_t u = 0; u < instance.user_count(); ++u) {
      states[u].service_id = instance.flows()[u].service_id;
      states[u].t_init = 1;
    }
    for (const WeightPolicy& policy : policies) {
      const AuctionOutcome coop =
          run_cooperative_round(instance, states, policy, 1);
      t.expect(!(auction.social_welfare < coop.social_welfare),
               "a cooperative policy beat the auction on welfare");
      t.expect(coop.revenue == Fixed{}, "a cooperative round charged money");
    }
  }

  // Round-robin fairness: five identical flows on a two-unit network end a
  // 100-slot run within one slot of service of each other.
  const Topology topology(std::vector<NetworkNode>{
      {"net", 1, Fixed::from_units(2), ""}});
  const ServiceCatalog catalog(
      std::vector<ServiceClass>{{"svc", Fixed::from_units(1), ""}});
  std::vector<UserFlow> flows;
  for (int i = 0; i < 5; ++i) {
    flows.push_back({"f" + std::to_string(i), "svc", Fixed::from_units(10),
                     {"net"}, static_cast<std::uint64_t>(i)});
  }
  const Instance instance(topology, catalog, flows);
  WeightPolicy rr;
  rr.kind = PolicyKind::kRoundRobin;
  std::vector<FlowScheduleState> states(5);
  for (auto& s : states) {
    s.service_id = "svc";
    s.t_init = 1;
  }
  for (int now = 1; now <= 100; ++now) {
    const AuctionOutcome round =
        run_cooperative_round(instance, states, rr, now);
    for (std::uint32_t u = 0; u < 5; ++u) {
      if (round.users[u].served) {
        states[u].cumulative_share += Fixed::from_units(1);
        states[u].slots_served += 1;
      }
    }
  }
  Fixed lo = states[0].cumulative_share;
  Fixed hi = states[0].cumulative_share;
  for (const FlowScheduleState& s : states) {
    lo = std::min(lo, s.cumulative_share);
    hi = std::max(hi, s.cumulative_share);
  }
  t.expect(!(Fixed::from_units(1) < hi - lo),
           "round-robin shares drifted by more than one slot");

  std::ostringstream os;
  os << "200 instances x 5 policies; share spread "
     << (hi - lo).str();
  detail = os.str() + (t.note.empty() ? "" : "; " + t.note);
  return t.ok();
}

// --------------------------------------------------------------------------
// 10. Byte-identical outputs across thread counts, and from the manifest.
// --------------------------------------------------------------------------
std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool run_cmd(const std::string& cmd) {
  return std::system((cmd + " > /dev/null 2>&1").c_str()) == 0;
}

bool criterion10(const std::string& cli, std::string& detail) {
  Tally t;
  t.expect(!cli.empty() && fs::exists(cli),
           "command-line binary path missing (argv[1])");
  if (!t.ok()) {
    detail = t.note;
    return false;
  }

  const fs::path base = fs::temp_directory_path() / "tierbid_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);

  ScenarioSpec spec;
  spec.name = "repro";
  spec.seed = 7;
  spec.replications = 2;
  spec.services = {{"video", Fixed::from_units(2), ""},
                   {"ftp", Fixed::from_units(1), ""}};
  spec.networks = {{"wide", 1, Fixed::from_units(6), ""},
                   {"cell", 2, Fixed::from_units(2), "wide"}};
  spec.workload.horizon = 25;
  spec.workload.cohorts = {{"cell", "video", ValueClass::kMedium, 6},
                           {"cell", "ftp", ValueClass::kLow, 6}};
  const fs::path scenario = base / "scenario.json";
  write_json_file(emit_scenario(spec), scenario.string());

  const std::string q = "\"";
  const std::string cli_q = q + cli + q;
  const std::string sc_q = q + scenario.string() + q;
  auto dir = [&](const char* name) { return (base / name).string(); };

  t.expect(run_cmd(cli_q + " run " + sc_q + " --out-dir " + q + dir("a") +
                   q + " --threads 1"),
           "run with one thread failed");
  t.expect(run_cmd(cli_q + " run " + sc_q + " --out-dir " + q + dir("b") +
                   q + " --threads 4"),
           "run with four threads failed");
  for (const char* file :
       {"per_user.csv", "per_network_slot.csv", "manifest.json"}) {
    t.expect(slurp(base / "a" / file) == slurp(base / "b" / file),
             std::string(file) + " differed across thread counts");
  }

  t.expect(run_cmd(cli_q + " run " + q + (base / "a" / "manifest.json").string() +
                   q + " --out-dir " + q + dir("c") + q + " --threads 2"),
           "re-run from the manifest failed");
  for (const char* file :
       {"per_user.csv", "per_network_slot.csv", "manifest.json"}) {
    t.expect(slurp(base / "a" / file) == slurp(base / "c" / file),
             std::string(file) + " differed when re-run from the manifest");
  }

  t.expect(run_cmd(cli_q + " auction " + sc_q + " --slot 5 --out-dir " + q +
                   dir("d1") + q + " --threads 1"),
           "single-round resolution failed");
  t.expect(run_cmd(cli_q + " auction " + sc_q + " --slot 5 --out-dir " + q +
                   dir("d2") + q + " --threads 4"),
           "single-round resolution failed");
  t.expect(slurp(base / "d1" / "auction.json") ==
               slurp(base / "d2" / "auction.json"),
           "auction.json differed across thread counts");

  t.expect(run_cmd(cli_q + " oracle-check " + sc_q +
                   " --samples 15 --out-dir " + q + dir("e1") + q +
                   " --threads 1"),
           "charge audit failed");
  t.expect(run_cmd(cli_q + " oracle-check " + sc_q +
                   " --samples 15 --out-dir " + q + dir("e2") + q +
                   " --threads 4"),
           "charge audit failed");
  t.expect(slurp(base / "e1" / "oracle_check.json") ==
               slurp(base / "e2" / "oracle_check.json"),
           "oracle_check.json differed across thread counts");

  const std::string bench_args =
      " bench --users 16 --users 32 --repetitions 3 --warmup 1 --seed 5";
  t.expect(run_cmd(cli_q + bench_args + " --out-dir " + q + dir("f1") + q +
                   " --threads 1"),
           "bench run failed");
  t.expect(run_cmd(cli_q + bench_args + " --out-dir " + q + dir("f2") + q +
                   " --threads 4"),
           "bench run failed");
  t.expect(slurp(base / "f1" / "bench.json") ==
               slurp(base / "f2" / "bench.json"),
           "bench.json differed across thread counts");

  fs::remove_all(base);
  std::ostringstream os;
  os << t.checks << " byte-level comparisons and command checks";
  detail = os.str() + (t.note.empty() ? "" : "; " + t.note);
  return t.ok();
}

}  // namespace
}  // namespace tierbid

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Match the CLI's allocator policy: without it the allocator returns
  // each round's scratch to the kernel and the timing criterion measures
  // page-fault service instead of engine work.
  mallopt(M_TRIM_THRESHOLD, 64 << 20);
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
#endif
  using namespace tierbid;
  const std::string cli = argc > 1 ? argv[1] : "";

  struct Criterion {
    int id;
    const char* label;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "local charges equal counterfactual reruns", criterion1},
      {2, "truthful bidding is a dominant declaration", criterion2},
      {3, "winners out-rank survivors at every network", criterion3},
      {4, "hierarchical allocation matches the exhaustive optimum",
       criterion4},
      {5, "group bids out-price members and never lower welfare",
       criterion5},
      {6, "city-scale episodes: decisive completions, rare handoffs",
       criterion6},
      {7, "truthful bidding wins the payoff experiment", criterion7},
      {8, "round time scales linearithmically", criterion8},
      {9, "the auction dominates cooperative policies on welfare",
       criterion9},
      {10, "byte-identical outputs across threads and re-runs",
       [&cli](std::string& d) { return criterion10(cli, d); }},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    bool ok = false;
    std::string detail;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    failures += !ok;
    std::printf("[%s] C%d %s (%s)\n", ok ? "PASS" : "FAIL", c.id, c.label,
                detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}

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

#include "tierbid/scenario.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "tierbid/errors.hpp"
#include "tierbid/multicast.hpp"
#include "tierbid/oracle.hpp"
#include "tierbid/rng.hpp"
#include "tierbid/util.hpp"

namespace tierbid {
namespace {

using nlohmann::json;

// Seed substream tags used by the batch drivers. Distinct from the
// episode-internal streams, which hang off each replication's derived seed.
enum : std::uint64_t {
  kStreamRunReplication = 21,
  kStreamOracleSample = 22,
};

// ---- strict JSON helpers ----------------------------------------------

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
  throw ValidationError(ctx + ": " + msg);
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& ctx) {
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      fail(ctx, "unknown key '" + item.key() + "'");
    }
  }
}

const json* find(const json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::int64_t as_int(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) fail(ctx, "expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t get_int(const json& j, const std::string& key,
                     std::int64_t fallback, const std::string& ctx) {
  const json* v = find(j, key);
  return v == nullptr ? fallback : as_int(*v, ctx + "." + key);
}

std::int64_t require_int(const json& j, const std::string& key,
                         const std::string& ctx) {
  const json* v = find(j, key);
  if (v == nullptr) fail(ctx, "missing key '" + key + "'");
  return as_int(*v, ctx + "." + key);
}

std::uint64_t get_uint(const json& j, const std::string& key,
                       std::uint64_t fallback, const std::string& ctx) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_unsigned() &&
      !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
    fail(ctx + "." + key, "expected a non-negative integer");
  }
  return v->get<std::uint64_t>();
}

std::string require_string(const json& j, const std::string& key,
                           const std::string& ctx) {
  const json* v = find(j, key);
  if (v == nullptr) fail(ctx, "missing key '" + key + "'");
  if (!v->is_string()) fail(ctx + "." + key, "expected a string");
  return v->get<std::string>();
}

std::string get_string(const json& j, const std::string& key,
                       const std::string& fallback, const std::string& ctx) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) fail(ctx + "." + key, "expected a string");
  return v->get<std::string>();
}

bool get_bool(const json& j, const std::string& key, bool fallback,
              const std::string& ctx) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) fail(ctx + "." + key, "expected a boolean");
  return v->get<bool>();
}

const json& require_array(const json& j, const std::string& key,
                          const std::string& ctx) {
  const json* v = find(j, key);
  if (v == nullptr) fail(ctx, "missing key '" + key + "'");
  if (!v->is_array()) fail(ctx + "." + key, "expected an array");
  return *v;
}

// ---- enum <-> string ----------------------------------------------------

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kAuction:
      return "auction";
    case Mode::kMulticast:
      return "multicast";
    case Mode::kCooperative:
      return "cooperative";
  }
  throw InternalError("unhandled mode");
}

Mode mode_from(const std::string& s, const std::string& ctx) {
  if (s == "auction") return Mode::kAuction;
  if (s == "multicast") return Mode::kMulticast;
  if (s == "cooperative") return Mode::kCooperative;
  fail(ctx, "unknown mode '" + s + "'");
}

std::string class_name(ValueClass c) {
  switch (c) {
    case ValueClass::kLow:
      return "low";
    case ValueClass::kMedium:
      return "medium";
    case ValueClass::kHigh:
      return "high";
  }
  throw InternalError("unhandled value class");
}

ValueClass class_from(const std::string& s, const std::string& ctx) {
  if (s == "low") return ValueClass::kLow;
  if (s == "medium") return ValueClass::kMedium;
  if (s == "high") return ValueClass::kHigh;
  fail(ctx, "unknown value class '" + s + "'");
}

std::string policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::kStaticService:
      return "static-service";
    case PolicyKind::kTimeOfDay:
      return "time-of-day";
    case PolicyKind::kAging:
      return "aging";
    case PolicyKind::kRoundRobin:
      return "round-robin";
    case PolicyKind::kFcfs:
      return "fcfs";
  }
  throw InternalError("unhandled policy kind");
}

PolicyKind policy_from(const std::string& s, const std::string& ctx) {
  if (s == "static-service") return PolicyKind::kStaticService;
  if (s == "time-of-day") return PolicyKind::kTimeOfDay;
  if (s == "aging") return PolicyKind::kAging;
  if (s == "round-robin") return PolicyKind::kRoundRobin;
  if (s == "fcfs") return PolicyKind::kFcfs;
  fail(ctx, "unknown policy kind '" + s + "'");
}

// ---- sub-object parse/emit ----------------------------------------------

std::map<std::string, Fixed> parse_weight_map(const json& j,
                                              const std::string& ctx) {
  if (!j.is_object()) fail(ctx, "expected an object of service -> micros");
  std::map<std::string, Fixed> out;
  for (const auto& item : j.items()) {
    out[item.key()] =
        Fixed::from_raw(as_int(item.value(), ctx + "." + item.key()));
  }
  return out;
}

json emit_weight_map(const std::map<std::string, Fixed>& m) {
  json j = json::object();
  for (const auto& [service, w] : m) j[service] = w.raw();
  return j;
}

WeightPolicy parse_policy(const json& j, const std::string& ctx) {
  check_keys(j, {"kind", "service_weights", "buckets", "aging_gamma_micro"},
             ctx);
  WeightPolicy p;
  p.kind = policy_from(require_string(j, "kind", ctx), ctx + ".kind");
  if (const json* w = find(j, "service_weights")) {
    p.service_weights = parse_weight_map(*w, ctx + ".service_weights");
  }
  if (const json* buckets = find(j, "buckets")) {
    if (!buckets->is_array()) fail(ctx + ".buckets", "expected an array");
    int i = 0;
    for (const json& b : *buckets) {
      const std::string bctx = ctx + ".buckets[" + std::to_string(i++) + "]";
      check_keys(b, {"from_slot", "to_slot", "service_weights"}, bctx);
      TimeOfDayBucket bucket;
      bucket.from_slot = static_cast<int>(require_int(b, "from_slot", bctx));
      bucket.to_slot = static_cast<int>(require_int(b, "to_slot", bctx));
      if (const json* w = find(b, "service_weights")) {
        bucket.service_weights =
            parse_weight_map(*w, bctx + ".service_weights");
      }
      p.buckets.push_back(std::move(bucket));
    }
  }
  p.aging_gamma = Fixed::from_raw(
      get_int(j, "aging_gamma_micro", p.aging_gamma.raw(), ctx));
  return p;
}

json emit_policy(const WeightPolicy& p) {
  json j;
  j["kind"] = policy_name(p.kind);
  if (!p.service_weights.empty()) {
    j["service_weights"] = emit_weight_map(p.service_weights);
  }
  if (!p.buckets.empty()) {
    json buckets = json::array();
    for (const TimeOfDayBucket& b : p.buckets) {
      json bj;
      bj["from_slot"] = b.from_slot;
      bj["to_slot"] = b.to_slot;
      bj["service_weights"] = emit_weight_map(b.service_weights);
      buckets.push_back(std::move(bj));
    }
    j["buckets"] = std::move(buckets);
  }
  j["aging_gamma_micro"] = p.aging_gamma.raw();
  return j;
}

ValueInterval parse_interval(const json& j, const std::string& ctx) {
  check_keys(j, {"lo_micro", "hi_micro"}, ctx);
  ValueInterval iv;
  iv.lo = Fixed::from_raw(require_int(j, "lo_micro", ctx));
  iv.hi = Fixed::from_raw(require_int(j, "hi_micro", ctx));
  return iv;
}

json emit_interval(const ValueInterval& iv) {
  return json{{"lo_micro", iv.lo.raw()}, {"hi_micro", iv.hi.raw()}};
}

}  // namespace

ScenarioSpec parse_scenario(const json& root) {
  if (!root.is_object()) {
    throw ValidationError("scenario: expected a JSON object at top level");
  }
  // A manifest embeds the scenario it ran under "config"; accept it so any
  // run can be reproduced straight from its own manifest.
  const json& j =
      (find(root, "config") != nullptr && (*find(root, "config")).is_object())
          ? *find(root, "config")
          : root;
  const std::string ctx = "scenario";
  check_keys(j,
             {"scale", "name", "seed", "mode", "prefix_winners",
              "replications", "horizon", "capacity_half_width_ppm",
              "value_classes", "services", "networks", "cohorts", "users",
              "multicast_thresholds", "policy", "per_slot_values",
              "continuation_bonus_micro"},
             ctx);

  const std::int64_t scale = get_int(j, "scale", Fixed::kScale, ctx);
  if (scale != Fixed::kScale) {
    fail(ctx + ".scale",
         "this build uses a fixed scale of " + std::to_string(Fixed::kScale));
  }

  ScenarioSpec spec;
  spec.name = get_string(j, "name", spec.name, ctx);
  spec.seed = get_uint(j, "seed", spec.seed, ctx);
  spec.mode = mode_from(get_string(j, "mode", "auction", ctx), ctx + ".mode");
  spec.prefix_winners = get_bool(j, "prefix_winners", false, ctx);
  spec.replications =
      static_cast<int>(get_int(j, "replications", spec.replications, ctx));
  if (spec.replications < 1) {
    fail(ctx + ".replications", "must be at least 1");
  }
  spec.per_slot_values = get_bool(j, "per_slot_values", false, ctx);
  spec.continuation_bonus =
      Fixed::from_raw(get_int(j, "continuation_bonus_micro", 0, ctx));

  spec.workload.horizon =
      static_cast<int>(get_int(j, "horizon", spec.workload.horizon, ctx));
  spec.workload.seed = spec.seed;
  spec.workload.capacity_half_width = Fixed::from_raw(
      get_int(j, "capacity_half_width_ppm",
              spec.workload.capacity_half_width.raw(), ctx));
  if (const json* vc = find(j, "value_classes")) {
    const std::string vctx = ctx + ".value_classes";
    check_keys(*vc, {"low", "medium", "high"}, vctx);
    if (const json* v = find(*vc, "low")) {
      spec.workload.low = parse_interval(*v, vctx + ".low");
    }
    if (const json* v = find(*vc, "medium")) {
      spec.workload.medium = parse_interval(*v, vctx + ".medium");
    }
    if (const json* v = find(*vc, "high")) {
      spec.workload.high = parse_interval(*v, vctx + ".high");
    }
  }

  int i = 0;
  for (const json& s : require_array(j, "services", ctx)) {
    const std::string sctx = ctx + ".services[" + std::to_string(i++) + "]";
    check_keys(s, {"id", "rate_micro", "label"}, sctx);
    ServiceClass svc;
    svc.id = require_string(s, "id", sctx);
    svc.mean_rate = Fixed::from_raw(require_int(s, "rate_micro", sctx));
    svc.label = get_string(s, "label", "", sctx);
    spec.services.push_back(std::move(svc));
  }
  i = 0;
  for (const json& nj : require_array(j, "networks", ctx)) {
    const std::string nctx = ctx + ".networks[" + std::to_string(i++) + "]";
    check_keys(nj, {"id", "tier", "capacity_micro", "parent"}, nctx);
    NetworkNode node;
    node.id = require_string(nj, "id", nctx);
    node.tier = static_cast<int>(require_int(nj, "tier", nctx));
    node.capacity = Fixed::from_raw(require_int(nj, "capacity_micro", nctx));
    node.parent = get_string(nj, "parent", "", nctx);
    spec.networks.push_back(std::move(node));
  }
  if (const json* cohorts = find(j, "cohorts")) {
    if (!cohorts->is_array()) fail(ctx + ".cohorts", "expected an array");
    i = 0;
    for (const json& c : *cohorts) {
      const std::string cctx = ctx + ".cohorts[" + std::to_string(i++) + "]";
      check_keys(c, {"leaf", "service", "value_class", "count"}, cctx);
      CohortSpec cohort;
      cohort.leaf = require_string(c, "leaf", cctx);
      cohort.service = require_string(c, "service", cctx);
      cohort.value_class = class_from(
          get_string(c, "value_class", "medium", cctx), cctx + ".value_class");
      cohort.count = static_cast<int>(require_int(c, "count", cctx));
      spec.workload.cohorts.push_back(std::move(cohort));
    }
  }
  if (const json* users = find(j, "users")) {
    if (!users->is_array()) fail(ctx + ".users", "expected an array");
    i = 0;
    for (const json& u : *users) {
      const std::string uctx = ctx + ".users[" + std::to_string(i) + "]";
      check_keys(u, {"user_id", "service", "value_micro", "path",
                     "arrival_seq", "start_slot"},
                 uctx);
      ExplicitUser user;
      user.user_id = require_string(u, "user_id", uctx);
      user.service_id = require_string(u, "service", uctx);
      user.value = Fixed::from_raw(require_int(u, "value_micro", uctx));
      for (const json& hop : require_array(u, "path", uctx)) {
        if (!hop.is_string()) fail(uctx + ".path", "expected network ids");
        user.path.push_back(hop.get<std::string>());
      }
      user.arrival_seq = get_uint(u, "arrival_seq",
                                  static_cast<std::uint64_t>(i), uctx);
      spec.users.push_back(std::move(user));
      ++i;
    }
  }
  if (const json* th = find(j, "multicast_thresholds")) {
    if (!th->is_array()) {
      fail(ctx + ".multicast_thresholds", "expected an array");
    }
    for (const json& t : *th) {
      spec.multicast_thresholds.push_back(
          static_cast<int>(as_int(t, ctx + ".multicast_thresholds")));
    }
  }
  if (const json* p = find(j, "policy")) {
    spec.policy = parse_policy(*p, ctx + ".policy");
  }

  if (spec.mode == Mode::kMulticast && spec.multicast_thresholds.empty()) {
    fail(ctx, "multicast mode requires multicast_thresholds");
  }
  return spec;
}

json emit_scenario(const ScenarioSpec& spec) {
  json j;
  j["scale"] = Fixed::kScale;
  j["name"] = spec.name;
  j["seed"] = spec.seed;
  j["mode"] = mode_name(spec.mode);
  j["prefix_winners"] = spec.prefix_winners;
  j["replications"] = spec.replications;
  j["horizon"] = spec.workload.horizon;
  j["capacity_half_width_ppm"] = spec.workload.capacity_half_width.raw();
  j["per_slot_values"] = spec.per_slot_values;
  j["continuation_bonus_micro"] = spec.continuation_bonus.raw();
  j["value_classes"] = json{{"low", emit_interval(spec.workload.low)},
                            {"medium", emit_interval(spec.workload.medium)},
                            {"high", emit_interval(spec.workload.high)}};
  json services = json::array();
  for (const ServiceClass& s : spec.services) {
    json sj;
    sj["id"] = s.id;
    sj["rate_micro"] = s.mean_rate.raw();
    if (!s.label.empty()) sj["label"] = s.label;
    services.push_back(std::move(sj));
  }
  j["services"] = std::move(services);
  json networks = json::array();
  for (const NetworkNode& n : spec.networks) {
    json nj;
    nj["id"] = n.id;
    nj["tier"] = n.tier;
    nj["capacity_micro"] = n.capacity.raw();
    if (!n.parent.empty()) nj["parent"] = n.parent;
    networks.push_back(std::move(nj));
  }
  j["networks"] = std::move(networks);
  if (!spec.workload.cohorts.empty()) {
    json cohorts = json::array();
    for (const CohortSpec& c : spec.workload.cohorts) {
      cohorts.push_back(json{{"leaf", c.leaf},
                             {"service", c.service},
                             {"value_class", class_name(c.value_class)},
                             {"count", c.count}});
    }
    j["cohorts"] = std::move(cohorts);
  }
  if (!spec.users.empty()) {
    json users = json::array();
    for (const ExplicitUser& u : spec.users) {
      json uj;
      uj["user_id"] = u.user_id;
      uj["service"] = u.service_id;
      uj["value_micro"] = u.value.raw();
      uj["path"] = u.path;
      uj["arrival_seq"] = u.arrival_seq;
      users.push_back(std::move(uj));
    }
    j["users"] = std::move(users);
  }
  if (!spec.multicast_thresholds.empty()) {
    j["multicast_thresholds"] = spec.multicast_thresholds;
  }
  if (spec.mode == Mode::kCooperative) {
    j["policy"] = emit_policy(spec.policy);
  }
  return j;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open scenario file '" + path + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario file '" + path +
                          "' is not valid JSON: " + e.what());
  }
  return parse_scenario(j);
}

std::uint64_t config_hash(const ScenarioSpec& spec) {
  return fnv1a(emit_scenario(spec).dump());
}

Topology scenario_topology(const ScenarioSpec& spec) {
  return Topology(spec.networks);
}

ServiceCatalog scenario_catalog(const ScenarioSpec& spec) {
  return ServiceCatalog(spec.services);
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write '" + path + "'");
  }
  out << j.dump(2) << '\n';
  if (!out) {
    throw IoError("failed while writing '" + path + "'");
  }
}

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016" PRIx64, h);
  return buf;
}

std::string csv_preamble(const ScenarioSpec& spec) {
  std::ostringstream out;
  out << "# seed=" << spec.seed << " config_hash=" << hash_hex(config_hash(spec))
      << "\n";
  return out.str();
}

EpisodeConfig episode_config(const ScenarioSpec& spec, int threads) {
  EpisodeConfig config;
  config.mode = spec.mode;
  config.multicast_thresholds = spec.multicast_thresholds;
  config.policy = spec.policy;
  config.prefix_winners = spec.prefix_winners;
  config.threads = threads;
  config.per_slot_values = spec.per_slot_values;
  config.continuation_bonus = spec.continuation_bonus;
  return config;
}

}  // namespace

json run_scenario(const ScenarioSpec& spec, const std::string& out_dir,
                  int threads) {
  if (spec.workload.cohorts.empty()) {
    throw ValidationError(
        "scenario.cohorts: running an episode needs a cohort workload");
  }
  const Topology topology = scenario_topology(spec);
  const ServiceCatalog catalog = scenario_catalog(spec);
  const EpisodeConfig config = episode_config(spec, threads);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + out_dir + "'");
  }
  const std::string user_path = out_dir + "/per_user.csv";
  const std::string net_path = out_dir + "/per_network_slot.csv";
  std::ofstream users_csv(user_path, std::ios::binary | std::ios::trunc);
  std::ofstream nets_csv(net_path, std::ios::binary | std::ios::trunc);
  if (!users_csv || !nets_csv) {
    throw IoError("cannot write metric files under '" + out_dir + "'");
  }
  users_csv << csv_preamble(spec)
            << "rep,user_id,class,service,start_slot,duration,"
               "completion_ppm,handoffs,charge_micro,served_slots,"
               "payoff_micro\n";
  nets_csv << csv_preamble(spec)
           << "rep,slot,network,demand_micro,supply_micro,winners,"
              "revenue_micro,welfare_micro\n";

  Currency total_welfare;
  Currency total_revenue;
  Currency total_weight;
  json rep_seeds = json::array();
  for (int r = 0; r < spec.replications; ++r) {
    WorkloadSpec wl = spec.workload;
    wl.seed = Rng::substream(
        Rng::substream(spec.seed, kStreamRunReplication),
        static_cast<std::uint64_t>(r));
    rep_seeds.push_back(wl.seed);
    const std::vector<BiddingAgent> agents =
        generate_workload(wl, topology, catalog);
    const EpisodeMetrics metrics =
        run_episode(topology, catalog, agents, wl, config);

    for (std::size_t u = 0; u < agents.size(); ++u) {
      const BiddingAgent& a = agents[u];
      const AgentEpisode& ep = metrics.agents[u];
      users_csv << r << ',' << a.user_id << ',' << class_name(a.value_class)
                << ',' << a.service_id << ',' << a.start_slot << ','
                << a.duration << ',' << ep.completion_ppm << ','
                << ep.handoffs << ',' << ep.total_charge.raw() << ','
                << ep.served_slots << ',' << ep.payoff.raw() << '\n';
    }
    for (const NetworkSlotRecord& row : metrics.network_slots) {
      nets_csv << r << ',' << row.slot << ',' << topology[row.network].id
               << ',' << row.demand.raw() << ',' << row.supply.raw() << ','
               << row.winners << ',' << row.revenue.raw() << ','
               << row.welfare.raw() << '\n';
    }
    total_welfare += metrics.total_welfare;
    total_revenue += metrics.total_revenue;
    total_weight += metrics.weight_total;
  }
  users_csv.flush();
  nets_csv.flush();
  if (!users_csv || !nets_csv) {
    throw IoError("failed while writing metric files under '" + out_dir +
                  "'");
  }

  json manifest;
  manifest["config"] = emit_scenario(spec);
  manifest["config_hash"] = hash_hex(config_hash(spec));
  manifest["seed"] = spec.seed;
  manifest["scale"] = Fixed::kScale;
  manifest["outputs"] = json::array({"per_user.csv", "per_network_slot.csv"});
  manifest["replication_seeds"] = std::move(rep_seeds);
  manifest["totals"] = json{{"welfare_micro", total_welfare.raw()},
                            {"revenue_micro", total_revenue.raw()},
                            {"weight_micro", total_weight.raw()}};
  write_json_file(manifest, out_dir + "/manifest.json");
  return manifest;
}

namespace {

json emit_entry(const AuctionEntry& e, const Instance& instance) {
  json out;
  out["unit_price_micro"] = e.unit_price.raw();
  out["rate_micro"] = e.rate.raw();
  out["value_micro"] = e.value.raw();
  out["service"] = instance.catalog()[e.service].id;
  if (e.is_group()) {
    out["kind"] = "group";
    json members = json::array();
    for (const GroupMember& m : e.members) {
      members.push_back(instance.flows()[m.user].user_id);
    }
    out["members"] = std::move(members);
  } else {
    out["kind"] = "unicast";
    out["user_id"] = instance.flows()[e.user].user_id;
  }
  return out;
}

json emit_round(const Instance& instance, const AuctionOutcome& outcome,
                const std::vector<Bandwidth>& caps) {
  json users = json::array();
  for (std::uint32_t u = 0; u < instance.user_count(); ++u) {
    const UserOutcome& res = outcome.users[u];
    json uj;
    uj["user_id"] = instance.flows()[u].user_id;
    uj["served"] = res.served;
    if (res.served) {
      uj["network"] = instance.topology()[res.network].id;
      uj["tier"] = res.tier;
    }
    uj["charge_micro"] = res.charge.raw();
    uj["value_micro"] = instance.flows()[u].willingness_to_pay.raw();
    users.push_back(std::move(uj));
  }
  json networks = json::array();
  for (std::uint32_t k = 0; k < instance.topology().size(); ++k) {
    const NetworkRoundState& st = outcome.networks[k];
    json nj;
    nj["id"] = instance.topology()[k].id;
    nj["tier"] = instance.topology()[k].tier;
    nj["capacity_micro"] = caps[k].raw();
    nj["residual_micro"] = st.residual.raw();
    nj["demand_micro"] = st.demand.raw();
    nj["users_served"] = st.users_served;
    nj["welfare_micro"] = st.welfare.raw();
    nj["revenue_micro"] = st.revenue.raw();
    json winners = json::array();
    for (const AuctionEntry& e : st.winners) {
      winners.push_back(emit_entry(e, instance));
    }
    nj["winners"] = std::move(winners);
    json losing = json::array();
    for (const AuctionEntry& e : st.losing_index) {
      losing.push_back(emit_entry(e, instance));
    }
    nj["losing_index"] = std::move(losing);
    networks.push_back(std::move(nj));
  }
  json out;
  out["users"] = std::move(users);
  out["networks"] = std::move(networks);
  out["social_welfare_micro"] = outcome.social_welfare.raw();
  out["revenue_micro"] = outcome.revenue.raw();
  out["weight_micro"] = outcome.weight_total.raw();
  return out;
}

}  // namespace

json resolve_single_round(const ScenarioSpec& spec, int slot, int threads) {
  const Topology topology = scenario_topology(spec);
  const ServiceCatalog catalog = scenario_catalog(spec);

  std::vector<UserFlow> flows;
  std::vector<int> start_slots;
  std::vector<Bandwidth> caps;
  int resolved_slot = slot;
  if (spec.users.empty() && !spec.workload.cohorts.empty()) {
    if (slot < 1 || slot > spec.workload.horizon) {
      throw ValidationError("slot is outside the scenario horizon");
    }
    const std::vector<BiddingAgent> agents =
        generate_workload(spec.workload, topology, catalog);
    for (const BiddingAgent& a : agents) {
      if (!a.active_in(slot)) continue;
      flows.push_back(UserFlow{a.user_id, a.service_id, a.true_value,
                               a.attachment_path, a.arrival_seq});
      start_slots.push_back(a.start_slot);
    }
    caps = draw_slot_capacities(topology, spec.workload, slot);
  } else {
    // Literal bid list (possibly empty: zero bids resolve to an empty
    // outcome). Audits resolve against nominal capacities so the result
    // does not depend on a fluctuation draw.
    for (const ExplicitUser& u : spec.users) {
      flows.push_back(
          UserFlow{u.user_id, u.service_id, u.value, u.path, u.arrival_seq});
      start_slots.push_back(1);
    }
    caps.reserve(topology.size());
    for (std::uint32_t k = 0; k < topology.size(); ++k) {
      caps.push_back(topology[k].capacity);
    }
    resolved_slot = 1;
  }

  Instance instance(topology, catalog, std::move(flows));
  EngineConfig engine;
  engine.prefix_winners = spec.prefix_winners;
  engine.threads = threads;

  AuctionOutcome outcome;
  if (spec.mode == Mode::kCooperative) {
    std::vector<FlowScheduleState> states(instance.user_count());
    for (std::uint32_t u = 0; u < instance.user_count(); ++u) {
      states[u].service_id = instance.flows()[u].service_id;
      states[u].t_init = start_slots[u];
    }
    outcome = run_cooperative_round(instance, states, spec.policy,
                                    resolved_slot, engine, &caps);
  } else {
    if (spec.mode == Mode::kMulticast) {
      engine.multicast_thresholds = spec.multicast_thresholds;
    }
    outcome = run_hierarchical_auction(topology, instance.build_bid_sets(),
                                       instance.user_count(), engine, &caps);
  }

  json out = emit_round(instance, outcome, caps);
  out["mode"] = mode_name(spec.mode);
  out["slot"] = resolved_slot;
  out["seed"] = spec.seed;
  out["config_hash"] = hash_hex(config_hash(spec));
  out["scale"] = Fixed::kScale;
  return out;
}

json oracle_check_scenario(const ScenarioSpec& spec, int samples,
                           int threads) {
  if (samples < 1) {
    throw ValidationError("oracle check needs at least one sample");
  }
  if (spec.mode != Mode::kAuction) {
    throw ValidationError(
        "oracle check compares per-user charges; run it in auction mode");
  }
  if (spec.workload.cohorts.empty()) {
    throw ValidationError("oracle check draws instances from cohorts");
  }
  const Topology topology = scenario_topology(spec);
  const ServiceCatalog catalog = scenario_catalog(spec);

  EngineConfig engine;
  engine.prefix_winners = spec.prefix_winners;
  engine.threads = threads;

  std::int64_t winners_checked = 0;
  std::int64_t matches = 0;
  std::int64_t max_abs_diff = 0;
  int slots_checked = 0;
  json mismatches = json::array();

  for (int i = 0; i < samples; ++i) {
    WorkloadSpec wl = spec.workload;
    wl.seed = Rng::substream(Rng::substream(spec.seed, kStreamOracleSample),
                             static_cast<std::uint64_t>(i));
    const std::vector<BiddingAgent> agents =
        generate_workload(wl, topology, catalog);

    Rng slot_rng(Rng::substream(wl.seed, 1));
    int slot = static_cast<int>(slot_rng.range(1, wl.horizon));
    std::vector<std::uint32_t> active;
    for (int probe = 0; probe < wl.horizon; ++probe) {
      const int candidate = 1 + (slot - 1 + probe) % wl.horizon;
      active.clear();
      for (std::uint32_t u = 0; u < agents.size(); ++u) {
        if (agents[u].active_in(candidate)) active.push_back(u);
      }
      if (!active.empty()) {
        slot = candidate;
        break;
      }
    }
    if (active.empty()) continue;
    ++slots_checked;

    std::vector<UserFlow> flows;
    flows.reserve(active.size());
    for (std::uint32_t u : active) {
      const BiddingAgent& a = agents[u];
      flows.push_back(UserFlow{a.user_id, a.service_id, a.true_value,
                               a.attachment_path, a.arrival_seq});
    }
    const std::vector<Bandwidth> caps =
        draw_slot_capacities(topology, wl, slot);
    Instance instance(topology, catalog, std::move(flows));
    const std::vector<std::vector<Bid>> sets = instance.build_bid_sets();
    const AuctionOutcome outcome = run_hierarchical_auction(
        topology, sets, instance.user_count(), engine, &caps);

    for (std::uint32_t u = 0; u < instance.user_count(); ++u) {
      if (!outcome.users[u].served) continue;
      ++winners_checked;
      const Currency oracle = vcg_oracle_charge(
          topology, sets, instance.user_count(), u, engine, &caps, &outcome);
      const Currency local = outcome.users[u].charge;
      if (local == oracle) {
        ++matches;
        continue;
      }
      const std::int64_t diff = std::abs(local.raw() - oracle.raw());
      max_abs_diff = std::max(max_abs_diff, diff);
      if (mismatches.size() < 5) {
        // Dump a literal-user scenario that replays this exact round,
        // with the drawn capacities frozen in as nominal.
        ScenarioSpec replay;
        replay.name = spec.name + "-mismatch-" + std::to_string(i);
        replay.seed = wl.seed;
        replay.mode = Mode::kAuction;
        replay.prefix_winners = spec.prefix_winners;
        replay.services = spec.services;
        replay.networks = spec.networks;
        for (std::uint32_t k = 0; k < topology.size(); ++k) {
          replay.networks[k].capacity = caps[k];
        }
        for (std::uint32_t v = 0; v < instance.user_count(); ++v) {
          const UserFlow& f = instance.flows()[v];
          replay.users.push_back(ExplicitUser{f.user_id, f.service_id,
                                              f.willingness_to_pay,
                                              f.attachment_path,
                                              f.arrival_seq});
        }
        json m;
        m["sample"] = i;
        m["slot"] = slot;
        m["user_id"] = instance.flows()[u].user_id;
        m["engine_micro"] = local.raw();
        m["oracle_micro"] = oracle.raw();
        m["replay"] = emit_scenario(replay);
        mismatches.push_back(std::move(m));
      }
    }
  }

  json report;
  report["seed"] = spec.seed;
  report["config_hash"] = hash_hex(config_hash(spec));
  report["scale"] = Fixed::kScale;
  report["samples"] = samples;
  report["slots_checked"] = slots_checked;
  report["winners_checked"] = winners_checked;
  report["matches"] = matches;
  report["match_rate_ppm"] =
      winners_checked == 0 ? 1'000'000
                           : matches * 1'000'000 / winners_checked;
  report["max_abs_diff_micro"] = max_abs_diff;
  report["mismatches"] = std::move(mismatches);
  return report;
}

}  // namespace tierbid

/*
 * Copyright 2026 The cram Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cram/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cram/evaluate.hpp"

namespace cram {
namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing '" + key + "'");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) throw InputError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number(obj, key, where);
}

std::string text(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) throw InputError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

const json& array(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_array()) throw InputError(where + "." + key + ": expected an array");
  return v;
}

Eigen::MatrixXd square_matrix(const json& v, std::size_t n, const std::string& where) {
  Eigen::MatrixXd m(n, n);
  if (!v.is_array()) throw InputError(where + ": expected an array");
  const bool nested = !v.empty() && v.front().is_array();
  if (nested) {
    if (v.size() != n) throw InputError(where + ": expected " + std::to_string(n) + " rows");
    for (std::size_t i = 0; i < n; ++i) {
      if (!v[i].is_array() || v[i].size() != n)
        throw InputError(where + "[" + std::to_string(i) + "]: expected " + std::to_string(n) +
                         " entries");
      for (std::size_t j = 0; j < n; ++j) {
        if (!v[i][j].is_number())
          throw InputError(where + "[" + std::to_string(i) + "][" + std::to_string(j) +
                           "]: expected a number");
        m(i, j) = v[i][j].get<double>();
      }
    }
  } else {
    if (v.size() != n * n)
      throw InputError(where + ": expected " + std::to_string(n * n) + " row-major entries");
    for (std::size_t k = 0; k < n * n; ++k) {
      if (!v[k].is_number())
        throw InputError(where + "[" + std::to_string(k) + "]: expected a number");
      m(k / n, k % n) = v[k].get<double>();
    }
  }
  return m;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string endpoint_text(const Endpoint& e, const Instance& instance) {
  return e.is_participant() ? "participant:" + instance.participants()[e.index].id
                            : "vm:" + std::to_string(e.index);
}

Endpoint endpoint_from(const std::string& s, const std::map<std::string, std::size_t>& ids,
                       std::size_t vms, const std::string& where) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw InputError(where + ": endpoint '" + s + "' lacks a kind");
  const std::string kind = s.substr(0, colon);
  const std::string rest = s.substr(colon + 1);
  if (kind == "participant") {
    auto it = ids.find(rest);
    if (it == ids.end()) throw InputError(where + ": unknown participant '" + rest + "'");
    return Endpoint::participant(it->second);
  }
  if (kind == "vm") {
    std::size_t idx = 0;
    std::size_t used = 0;
    try {
      idx = std::stoul(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != rest.size() || rest.empty()) throw InputError(where + ": bad vm index '" + rest + "'");
    if (idx >= vms) throw InputError(where + ": vm " + rest + " does not exist");
    return Endpoint::vm(idx);
  }
  throw InputError(where + ": unknown endpoint kind '" + kind + "'");
}

}  // namespace

DelayModel parse_delay_model(std::string_view t) {
  if (t == "algorithm1") return DelayModel::kForkJoin;
  if (t == "ilp") return DelayModel::kIlp;
  throw InputError("unknown delay model '" + std::string(t) + "' (expected algorithm1 or ilp)");
}

CostMode parse_cost_mode(std::string_view t) {
  if (t == "per-mb") return CostMode::kPerMb;
  if (t == "per-vm") return CostMode::kPerVm;
  throw InputError("unknown cost mode '" + std::string(t) + "' (expected per-mb or per-vm)");
}

Instance instance_from_json(const json& doc) {
  const json& net = field(doc, "network", "instance");
  const json& site_list = array(net, "sites", "network");
  std::vector<Site> sites;
  for (std::size_t i = 0; i < site_list.size(); ++i) {
    const std::string where = "network.sites[" + std::to_string(i) + "]";
    Site s;
    if (site_list[i].is_string()) {
      s.name = site_list[i].get<std::string>();
    } else {
      s.name = text(site_list[i], "name", where);
      s.longitude = number_or(site_list[i], "longitude", 0.0, where);
    }
    sites.push_back(std::move(s));
  }
  const std::size_t n = sites.size();
  Eigen::MatrixXd time = square_matrix(field(net, "time_ms", "network"), n, "network.time_ms");

  try {
    NetworkMatrix network;
    if (net.contains("cost")) {
      network = NetworkMatrix(sites, time, square_matrix(net["cost"], n, "network.cost"));
    } else {
      network = NetworkMatrix::with_linear_cost(sites, time,
                                                number_or(net, "cost_per_ms", 0.01, "network"));
    }

    std::vector<ServerSpec> servers;
    const json& sv = array(doc, "servers", "instance");
    for (std::size_t i = 0; i < sv.size(); ++i) {
      const std::string where = "servers[" + std::to_string(i) + "]";
      ServerSpec s;
      s.site = network.index_of(text(sv[i], "site", where));
      s.capacity_mb = number_or(sv[i], "capacity_mb", s.capacity_mb, where);
      s.cost_per_mb = number_or(sv[i], "cost_per_mb", s.cost_per_mb, where);
      servers.push_back(s);
    }

    std::vector<Participant> participants;
    const json& pv = array(doc, "participants", "instance");
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const std::string where = "participants[" + std::to_string(i) + "]";
      participants.push_back({text(pv[i], "id", where), network.index_of(text(pv[i], "site", where))});
    }

    MediaCostModel media;
    if (doc.contains("media")) {
      const json& m = doc["media"];
      media.time_per_stream_ms = number_or(m, "time_per_stream_ms", media.time_per_stream_ms, "media");
      media.resource_per_stream_mb =
          number_or(m, "resource_per_stream_mb", media.resource_per_stream_mb, "media");
      media.vm_overhead_mb = number_or(m, "vm_overhead_mb", media.vm_overhead_mb, "media");
      media.max_compression_rate =
          number_or(m, "max_compression_rate", media.max_compression_rate, "media");
      media.fixed_gamma = number_or(m, "fixed_gamma", media.fixed_gamma, "media");
    }
    QosSpec qos;
    if (doc.contains("qos")) qos.max_delay_ms = number_or(doc["qos"], "max_delay_ms", qos.max_delay_ms, "qos");
    CostMode mode = CostMode::kPerMb;
    if (doc.contains("cost_mode")) mode = parse_cost_mode(text(doc, "cost_mode", "instance"));
    return Instance(std::move(servers), std::move(participants), std::move(network), media, qos, mode);
  } catch (const InstanceError& e) {
    throw InputError(std::string("instance: ") + e.what());
  }
}

json instance_to_json(const Instance& instance) {
  const NetworkMatrix& net = instance.network();
  json sites = json::array();
  for (const Site& s : net.sites()) sites.push_back({{"name", s.name}, {"longitude", s.longitude}});
  json servers = json::array();
  for (const ServerSpec& s : instance.servers())
    servers.push_back({{"site", net.sites()[s.site].name},
                       {"capacity_mb", s.capacity_mb},
                       {"cost_per_mb", s.cost_per_mb}});
  json participants = json::array();
  for (const Participant& p : instance.participants())
    participants.push_back({{"id", p.id}, {"site", net.sites()[p.site].name}});
  const MediaCostModel& m = instance.media();
  return {{"servers", servers},
          {"participants", participants},
          {"network", {{"sites", sites}, {"time_ms", matrix_json(net.time())}, {"cost", matrix_json(net.cost())}}},
          {"media",
           {{"time_per_stream_ms", m.time_per_stream_ms},
            {"resource_per_stream_mb", m.resource_per_stream_mb},
            {"vm_overhead_mb", m.vm_overhead_mb},
            {"max_compression_rate", m.max_compression_rate},
            {"fixed_gamma", m.fixed_gamma}}},
          {"qos", {{"max_delay_ms", instance.qos().max_delay_ms}}},
          {"cost_mode", std::string(to_string(instance.cost_mode()))}};
}

Plan plan_from_json(const json& doc, const Instance& instance) {
  Plan plan;
  if (doc.contains("delay_model")) plan.delay_model = parse_delay_model(text(doc, "delay_model", "plan"));
  if (doc.contains("feasible")) {
    if (!doc["feasible"].is_boolean()) throw InputError("plan.feasible: expected a boolean");
    plan.feasible = doc["feasible"].get<bool>();
  }
  const json& vms = array(doc, "vms", "plan");
  for (std::size_t i = 0; i < vms.size(); ++i) {
    const std::string where = "plan.vms[" + std::to_string(i) + "]";
    VmInstance vm;
    const std::string kind = text(vms[i], "kind", where);
    if (kind == "mixer")
      vm.kind = VmKind::kMixer;
    else if (kind == "compressor")
      vm.kind = VmKind::kCompressor;
    else
      throw InputError(where + ".kind: expected mixer or compressor");
    const double server = number(vms[i], "server", where);
    if (server < 0 || server != std::floor(server)) throw InputError(where + ".server: expected an index");
    vm.server = static_cast<std::size_t>(server);
    const double inputs = number(vms[i], "input_count", where);
    if (inputs < 0 || inputs != std::floor(inputs))
      throw InputError(where + ".input_count: expected a non-negative integer");
    vm.input_count = static_cast<int>(inputs);
    plan.vms.push_back(vm);
  }
  std::map<std::string, std::size_t> ids;
  for (std::size_t u = 0; u < instance.participant_count(); ++u) ids[instance.participants()[u].id] = u;
  const json& edges = array(doc, "edges", "plan");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "plan.edges[" + std::to_string(i) + "]";
    StreamEdge e;
    e.head = endpoint_from(text(edges[i], "head", where), ids, plan.vms.size(), where + ".head");
    e.tail = endpoint_from(text(edges[i], "tail", where), ids, plan.vms.size(), where + ".tail");
    e.compression_rate = number_or(edges[i], "compression_rate", 0.0, where);
    plan.edges.push_back(e);
  }
  if (doc.contains("per_participant_delay")) {
    plan.per_participant_delay.assign(instance.participant_count(), 0.0);
    const json& d = doc["per_participant_delay"];
    if (!d.is_object()) throw InputError("plan.per_participant_delay: expected an object");
    for (auto it = d.begin(); it != d.end(); ++it) {
      auto id = ids.find(it.key());
      if (id == ids.end()) throw InputError("plan.per_participant_delay: unknown participant '" + it.key() + "'");
      if (!it.value().is_number()) throw InputError("plan.per_participant_delay." + it.key() + ": expected a number");
      plan.per_participant_delay[id->second] = it.value().get<double>();
    }
  }
  return plan;
}

json metrics_to_json(const PlanMetrics& m) {
  return {{"server_cost", round_to(m.server_cost, 4)},
          {"network_cost", round_to(m.network_cost, 4)},
          {"total_cost", round_to(m.total_cost, 4)},
          {"max_delay_ms", round_to(m.max_delay, 3)},
          {"vm_count", m.vm_count},
          {"allocated_mb", round_to(m.allocated_memory, 3)},
          {"compressed_streams", m.compression_rates.size()},
          {"mean_compression_rate", round_to(mean(m.compression_rates), 4)},
          {"median_compression_rate", round_to(median(m.compression_rates), 4)}};
}

json plan_to_json(const Plan& plan, const Instance& instance) {
  json vms = json::array();
  for (std::size_t v = 0; v < plan.vms.size(); ++v)
    vms.push_back({{"id", v},
                   {"kind", std::string(to_string(plan.vms[v].kind))},
                   {"server", plan.vms[v].server},
                   {"site", instance.network().sites()[instance.server_site(plan.vms[v].server)].name},
                   {"input_count", plan.vms[v].input_count}});
  json edges = json::array();
  for (const StreamEdge& e : plan.edges)
    edges.push_back({{"head", endpoint_text(e.head, instance)},
                     {"tail", endpoint_text(e.tail, instance)},
                     {"compression_rate", e.compression_rate}});
  json delays = json::object();
  for (std::size_t u = 0; u < plan.per_participant_delay.size(); ++u)
    delays[instance.participants()[u].id] = plan.per_participant_delay[u];
  return {{"delay_model", std::string(to_string(plan.delay_model))},
          {"feasible", plan.feasible},
          {"vms", vms},
          {"edges", edges},
          {"per_participant_delay", delays},
          {"metrics", metrics_to_json(metrics(plan, instance))}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path + ": cannot write");
  out << contents;
  if (!out) throw InputError(path + ": write failed");
}

json parse_json(std::string_view t, const std::string& origin) {
  try {
    return json::parse(t);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": " + e.what());
  }
}

Instance load_instance(const std::string& path) {
  try {
    return instance_from_json(parse_json(read_file(path), path));
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw InputError(path + ": " + msg);
  }
}

Plan load_plan(const std::string& path, const Instance& instance) {
  try {
    return plan_from_json(parse_json(read_file(path), path), instance);
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw InputError(path + ": " + msg);
  }
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double round_to(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double r = std::round(x * scale) / scale;
  return r == 0.0 ? 0.0 : r;
}

}  // namespace cram

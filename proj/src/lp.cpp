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

#include "cram/lp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace cram {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kLineWidth = 200;

std::string num(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

bool starts_with_prefix(std::string_view name, std::string_view prefix) {
  return name.size() > prefix.size() && name.substr(0, prefix.size()) == prefix &&
         name[prefix.size()] == '_';
}

/// Appends whitespace-separated pieces, wrapping long lines.
class LineWriter {
 public:
  explicit LineWriter(std::ostringstream& os) : os_(os) {}
  void begin(const std::string& head) {
    os_ << ' ' << head;
    width_ = head.size() + 1;
  }
  void piece(const std::string& p) {
    if (width_ + p.size() + 1 > kLineWidth) {
      os_ << "\n ";
      width_ = 1;
    }
    os_ << ' ' << p;
    width_ += p.size() + 1;
  }
  void end() { os_ << '\n'; }

 private:
  std::ostringstream& os_;
  std::size_t width_ = 0;
};

void write_terms(LineWriter& w, const std::vector<LpTerm>& terms) {
  for (const LpTerm& t : terms) {
    w.piece(t.coef < 0 ? "-" : "+");
    w.piece(num(std::abs(t.coef)));
    w.piece(t.var);
  }
}

}  // namespace

void LpDocument::add_variable(LpVariable v) {
  if (index_.count(v.name)) throw std::logic_error("duplicate LP variable " + v.name);
  index_.emplace(v.name, variables_.size());
  variables_.push_back(std::move(v));
}

const LpVariable& LpDocument::variable(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown LP variable " + std::string(name));
  return variables_[it->second];
}

void LpDocument::add_row(LpRow row) {
  for (const LpTerm& t : row.terms)
    if (!index_.count(t.var)) throw std::logic_error("row " + row.name + " uses undeclared " + t.var);
  rows_.push_back(std::move(row));
}

std::size_t LpDocument::count(LpVarType type) const {
  return static_cast<std::size_t>(std::count_if(variables_.begin(), variables_.end(),
                                                [&](const LpVariable& v) { return v.type == type; }));
}

std::size_t LpDocument::count_prefix(std::string_view prefix) const {
  return static_cast<std::size_t>(std::count_if(variables_.begin(), variables_.end(), [&](const LpVariable& v) {
    return starts_with_prefix(v.name, prefix);
  }));
}

std::size_t LpDocument::count_rows_prefix(std::string_view prefix) const {
  return static_cast<std::size_t>(std::count_if(rows_.begin(), rows_.end(), [&](const LpRow& r) {
    return r.name == prefix || starts_with_prefix(r.name, prefix);
  }));
}

std::string LpDocument::to_text() const {
  std::ostringstream os;
  LineWriter w(os);
  os << "\\ cram media allocation program\n";
  os << "Minimize\n";
  w.begin("cost:");
  if (objective_.empty() && !variables_.empty())
    write_terms(w, {{0.0, variables_.front().name}});
  else
    write_terms(w, objective_);
  w.end();
  os << "Subject To\n";
  for (const LpRow& r : rows_) {
    w.begin(r.name + ":");
    write_terms(w, r.terms);
    w.piece(r.sense == LpSense::kLessEqual ? "<=" : r.sense == LpSense::kGreaterEqual ? ">=" : "=");
    w.piece(num(r.rhs));
    w.end();
  }
  os << "Bounds\n";
  for (const LpVariable& v : variables_) {
    if (v.type == LpVarType::kBinary) continue;
    if (v.lower == 0.0 && v.upper == kInf) continue;
    if (v.upper == kInf)
      os << ' ' << v.name << " >= " << num(v.lower) << '\n';
    else
      os << ' ' << num(v.lower) << " <= " << v.name << " <= " << num(v.upper) << '\n';
  }
  for (auto [type, title] : {std::pair{LpVarType::kBinary, "Binaries"}, std::pair{LpVarType::kInteger, "Generals"}}) {
    if (count(type) == 0) continue;
    os << title << '\n';
    w.begin("");
    for (const LpVariable& v : variables_)
      if (v.type == type) w.piece(v.name);
    w.end();
  }
  os << "End\n";
  return os.str();
}

LpDocument export_lp(const Instance& instance) {
  const MediaCostModel& media = instance.media();
  const NetworkMatrix& net = instance.network();
  const std::size_t users = instance.participant_count();
  const std::size_t servers = instance.server_count();
  const std::size_t mixers = users - 1;
  const std::size_t compressors = 2 * users - 1;
  const std::size_t vms = mixers + compressors;
  const std::size_t nodes = users + vms;
  const double keep = 1.0 - media.gamma_rate();
  const double tau = media.time_per_stream_ms;
  const double beta = static_cast<double>(users + vms + 1);

  double max_time = 0.0;
  for (std::size_t a = 0; a < net.size(); ++a)
    for (std::size_t b = 0; b < net.size(); ++b) max_time = std::max(max_time, net.time(a, b));
  const double y_max = static_cast<double>(vms + 1) * (max_time + tau * beta);
  const double big_m = 2.0 * y_max;

  // Node n: participants, then mixer slots, then compressor slots.
  auto node = [&](std::size_t n) {
    if (n < users) return "u" + std::to_string(n);
    if (n < users + mixers) return "m" + std::to_string(n - users);
    return "c" + std::to_string(n - users - mixers);
  };
  auto is_participant = [&](std::size_t n) { return n < users; };
  auto is_compressor = [&](std::size_t n) { return n >= users + mixers; };
  auto srv = [](std::size_t s) { return "s" + std::to_string(s); };
  auto d = [&](std::size_t a, std::size_t b) { return "d_" + node(a) + "_" + node(b); };
  auto e = [&](std::size_t u, std::size_t v) { return "e_" + node(u) + "_" + node(v); };
  auto f = [&](std::size_t u, std::size_t i, std::size_t v) {
    return "f_" + node(u) + "_" + node(i) + "_" + node(v);
  };
  auto x = [&](std::size_t s, std::size_t v) { return "x_" + srv(s) + "_" + node(v); };
  auto y = [&](std::size_t u, std::size_t v) { return "y_" + node(u) + "_" + node(v); };
  auto z = [&](std::size_t s, std::size_t v) { return "z_" + srv(s) + "_" + node(v); };
  auto g = [&](std::size_t v) { return "g_" + node(v); };
  auto h = [&](std::size_t m) { return "h_" + node(m); };
  // Stream a->b carried between the hosts of its endpoints.
  auto j1 = [&](std::size_t a, std::size_t b, std::size_t s) {
    return "j_" + node(a) + "_" + node(b) + "_" + srv(s);
  };
  auto j2 = [&](std::size_t a, std::size_t b, std::size_t s1, std::size_t s2) {
    return "j_" + node(a) + "_" + node(b) + "_" + srv(s1) + "_" + srv(s2);
  };
  auto psite = [&](std::size_t u) { return instance.participant_site(u); };
  auto ssite = [&](std::size_t s) { return instance.server_site(s); };
  auto out_factor = [&](std::size_t n) { return is_compressor(n) ? keep : 1.0; };
  // VM-to-VM pairs that may carry a stream.
  auto vm_link = [&](std::size_t a, std::size_t b) {
    return a != b && !(is_compressor(a) && is_compressor(b));
  };

  LpDocument doc;
  auto binary = [&](const std::string& n) { doc.add_variable({n, LpVarType::kBinary, 0.0, 1.0}); };

  for (std::size_t a = 0; a < nodes; ++a)
    for (std::size_t b = 0; b < nodes; ++b) binary(d(a, b));
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t v = users; v < nodes; ++v) binary(e(u, v));
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t i = users; i < nodes; ++i)
      for (std::size_t v = users; v < nodes; ++v) binary(f(u, i, v));
  for (std::size_t s = 0; s < servers; ++s)
    for (std::size_t v = users; v < nodes; ++v) binary(x(s, v));
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t v = users; v < nodes; ++v)
      doc.add_variable({y(u, v), LpVarType::kContinuous, 0.0, y_max});
  for (std::size_t s = 0; s < servers; ++s)
    for (std::size_t v = users; v < nodes; ++v)
      doc.add_variable({z(s, v), LpVarType::kInteger, 0.0, beta});
  for (std::size_t v = users; v < nodes; ++v) doc.add_variable({g(v), LpVarType::kInteger, 0.0, beta});
  for (std::size_t m = users; m < users + mixers; ++m) binary(h(m));
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t v = users; v < nodes; ++v)
      for (std::size_t s = 0; s < servers; ++s) {
        binary(j1(u, v, s));
        binary(j1(v, u, s));
      }
  for (std::size_t a = users; a < nodes; ++a)
    for (std::size_t b = users; b < nodes; ++b)
      if (vm_link(a, b))
        for (std::size_t s1 = 0; s1 < servers; ++s1)
          for (std::size_t s2 = 0; s2 < servers; ++s2) binary(j2(a, b, s1, s2));

  auto row = [&](std::string name, std::vector<LpTerm> terms, LpSense sense, double rhs) {
    doc.add_row({std::move(name), std::move(terms), sense, rhs});
  };
  const LpSense le = LpSense::kLessEqual;
  const LpSense ge = LpSense::kGreaterEqual;
  const LpSense eq = LpSense::kEqual;
  auto in_terms = [&](std::size_t v, double coef) {
    std::vector<LpTerm> t;
    for (std::size_t k = 0; k < nodes; ++k) t.push_back({coef, d(k, v)});
    return t;
  };
  auto out_terms = [&](std::size_t v, double coef) {
    std::vector<LpTerm> t;
    for (std::size_t k = 0; k < nodes; ++k) t.push_back({coef, d(v, k)});
    return t;
  };
  auto hosted_terms = [&](std::size_t v, double coef) {
    std::vector<LpTerm> t;
    for (std::size_t s = 0; s < servers; ++s) t.push_back({coef, x(s, v)});
    return t;
  };
  auto join = [](std::vector<LpTerm> a, const std::vector<LpTerm>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };

  // Objective: VM memory or flat VM price, plus per-stream network cost.
  std::vector<LpTerm> obj;
  for (std::size_t s = 0; s < servers; ++s) {
    const double p = instance.servers()[s].cost_per_mb;
    for (std::size_t v = users; v < nodes; ++v) {
      if (instance.cost_mode() == CostMode::kPerMb) {
        obj.push_back({media.vm_overhead_mb * p, x(s, v)});
        obj.push_back({media.resource_per_stream_mb * p, z(s, v)});
      } else {
        obj.push_back({p, x(s, v)});
      }
    }
  }
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t v = users; v < nodes; ++v)
      for (std::size_t s = 0; s < servers; ++s) {
        const double c = net.cost(psite(u), ssite(s));
        if (c != 0.0) obj.push_back({c, j1(u, v, s)});
        if (c * out_factor(v) != 0.0) obj.push_back({c * out_factor(v), j1(v, u, s)});
      }
  for (std::size_t a = users; a < nodes; ++a)
    for (std::size_t b = users; b < nodes; ++b)
      if (vm_link(a, b))
        for (std::size_t s1 = 0; s1 < servers; ++s1)
          for (std::size_t s2 = 0; s2 < servers; ++s2) {
            const double c = net.cost(ssite(s1), ssite(s2)) * out_factor(a);
            if (c != 0.0) obj.push_back({c, j2(a, b, s1, s2)});
          }
  doc.set_objective(std::move(obj));

  // One upstream and one downstream stream per participant.
  for (std::size_t u = 0; u < users; ++u) {
    std::vector<LpTerm> send, recv;
    for (std::size_t v = users; v < nodes; ++v) {
      send.push_back({1.0, d(u, v)});
      recv.push_back({1.0, d(v, u)});
    }
    row("send_" + node(u), send, eq, 1.0);
    row("recv_" + node(u), recv, eq, 1.0);
  }
  {
    std::vector<LpTerm> pp, cc;
    for (std::size_t a = 0; a < nodes; ++a)
      for (std::size_t b = 0; b < nodes; ++b) {
        if (is_participant(a) && is_participant(b)) pp.push_back({1.0, d(a, b)});
        if (is_compressor(a) && is_compressor(b)) cc.push_back({1.0, d(a, b)});
      }
    row("no_participant_link", pp, eq, 0.0);
    row("no_compressor_link", cc, eq, 0.0);
  }
  for (std::size_t m = users; m < users + mixers; ++m) row("no_self_" + node(m), {{1.0, d(m, m)}}, eq, 0.0);

  // Reachability of VMs from each participant.
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t v = users; v < nodes; ++v) {
      for (std::size_t i = users; i < nodes; ++i) {
        if (i != v)
          row("reach_via_" + node(u) + "_" + node(i) + "_" + node(v),
              {{1.0, e(u, v)}, {-1.0, d(i, v)}, {-1.0, e(u, i)}}, ge, -1.0);
        row("through_" + node(u) + "_" + node(i) + "_" + node(v),
            {{2.0, f(u, i, v)}, {-1.0, d(i, v)}, {-1.0, e(u, i)}}, le, 0.0);
      }
      row("reach_direct_" + node(u) + "_" + node(v), {{1.0, e(u, v)}, {-1.0, d(u, v)}}, ge, 0.0);
      row("reach_fed_" + node(u) + "_" + node(v), join({{1.0, e(u, v)}}, in_terms(v, -1.0)), le, 0.0);
      std::vector<LpTerm> support{{1.0, e(u, v)}, {-1.0, d(u, v)}};
      for (std::size_t i = users; i < nodes; ++i) support.push_back({-1.0, f(u, i, v)});
      row("reach_support_" + node(u) + "_" + node(v), support, le, 0.0);
    }

  // Final streams leave VMs that every participant reaches.
  for (std::size_t v = users; v < nodes; ++v)
    for (std::size_t u = 0; u < users; ++u) {
      std::vector<LpTerm> t{{static_cast<double>(users), d(v, u)}};
      for (std::size_t p = 0; p < users; ++p) t.push_back({-1.0, e(p, v)});
      row("final_stream_" + node(v) + "_" + node(u), t, le, 0.0);
    }

  for (std::size_t c = users + mixers; c < nodes; ++c)
  {
    std::vector<LpTerm> t;
    for (std::size_t k = 0; k < nodes; ++k) {
      if (k == c) continue;
      t.push_back({1.0, d(k, c)});
      t.push_back({-1.0, d(c, k)});
    }
    row("compressor_balance_" + node(c), t, eq, 0.0);
  }

  {
    std::vector<LpTerm> t;
    for (std::size_t m = users; m < users + mixers; ++m) t.push_back({1.0, h(m)});
    row("mixer_complete", t, ge, 1.0);
    for (std::size_t m = users; m < users + mixers; ++m) {
      std::vector<LpTerm> r{{static_cast<double>(users), h(m)}};
      for (std::size_t u = 0; u < users; ++u) r.push_back({-1.0, e(u, m)});
      row("mixer_reach_" + node(m), r, le, 0.0);
    }
  }

  // Placement.
  for (std::size_t v = users; v < nodes; ++v) {
    row("one_server_" + node(v), hosted_terms(v, 1.0), le, 1.0);
    row("in_placed_" + node(v), join(in_terms(v, 1.0), hosted_terms(v, -beta)), le, 0.0);
    row("in_host_" + node(v), join(in_terms(v, 1.0), hosted_terms(v, -1.0)), ge, 0.0);
    row("out_placed_" + node(v), join(out_terms(v, 1.0), hosted_terms(v, -beta)), le, 0.0);
    row("out_host_" + node(v), join(out_terms(v, 1.0), hosted_terms(v, -1.0)), ge, 0.0);
    std::vector<LpTerm> fed;
    for (std::size_t u = 0; u < users; ++u) fed.push_back({1.0, e(u, v)});
    row("fed_" + node(v), join(fed, hosted_terms(v, -1.0)), ge, 0.0);
  }

  // Load and capacity.
  for (std::size_t v = users; v < nodes; ++v)
    row("load_" + node(v), join({{1.0, g(v)}}, in_terms(v, -1.0)), eq, 0.0);
  for (std::size_t s = 0; s < servers; ++s) {
    for (std::size_t v = users; v < nodes; ++v) {
      const std::string tag = srv(s) + "_" + node(v);
      row("load_host_" + tag, {{1.0, z(s, v)}, {-beta, x(s, v)}}, le, 0.0);
      row("load_upper_" + tag, {{1.0, z(s, v)}, {-1.0, g(v)}}, le, 0.0);
      row("load_lower_" + tag, {{1.0, z(s, v)}, {-1.0, g(v)}, {-beta, x(s, v)}}, ge, -beta);
    }
    std::vector<LpTerm> t;
    for (std::size_t v = users; v < nodes; ++v) {
      t.push_back({media.vm_overhead_mb, x(s, v)});
      t.push_back({media.resource_per_stream_mb, z(s, v)});
    }
    row("capacity_" + srv(s), t, le, instance.servers()[s].capacity_mb);
  }

  // Stream-to-host products.
  auto link1 = [&](std::size_t a, std::size_t b, std::size_t vm, std::size_t s) {
    const std::string jn = j1(a, b, s);
    row("link_edge_" + jn.substr(2), {{1.0, jn}, {-1.0, d(a, b)}}, le, 0.0);
    row("link_host_" + jn.substr(2), {{1.0, jn}, {-1.0, x(s, vm)}}, le, 0.0);
    row("link_both_" + jn.substr(2), {{1.0, jn}, {-1.0, d(a, b)}, {-1.0, x(s, vm)}}, ge, -1.0);
  };
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t v = users; v < nodes; ++v)
      for (std::size_t s = 0; s < servers; ++s) {
        link1(u, v, v, s);
        link1(v, u, v, s);
      }
  for (std::size_t a = users; a < nodes; ++a)
    for (std::size_t b = users; b < nodes; ++b)
      if (vm_link(a, b))
        for (std::size_t s1 = 0; s1 < servers; ++s1)
          for (std::size_t s2 = 0; s2 < servers; ++s2) {
            const std::string jn = j2(a, b, s1, s2);
            const std::string tag = jn.substr(2);
            row("link_edge_" + tag, {{1.0, jn}, {-1.0, d(a, b)}}, le, 0.0);
            row("link_head_" + tag, {{1.0, jn}, {-1.0, x(s1, a)}}, le, 0.0);
            row("link_tail_" + tag, {{1.0, jn}, {-1.0, x(s2, b)}}, le, 0.0);
            row("link_all_" + tag, {{1.0, jn}, {-1.0, d(a, b)}, {-1.0, x(s1, a)}, {-1.0, x(s2, b)}}, ge,
                -2.0);
          }

  // Arrival times, active only along streams the participant's video takes.
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t v = users; v < nodes; ++v) {
      std::vector<LpTerm> t{{1.0, y(u, v)}, {-tau, g(v)}, {-big_m, d(u, v)}};
      for (std::size_t s = 0; s < servers; ++s) {
        const double tt = net.time(psite(u), ssite(s));
        if (tt != 0.0) t.push_back({-tt, j1(u, v, s)});
      }
      row("arrive_" + node(u) + "_" + node(v), t, ge, -big_m);
      for (std::size_t i = users; i < nodes; ++i) {
        if (!vm_link(i, v)) continue;
        std::vector<LpTerm> r{{1.0, y(u, v)}, {-1.0, y(u, i)}, {-tau, g(v)}, {-big_m, d(i, v)}, {-big_m, e(u, i)}};
        for (std::size_t s1 = 0; s1 < servers; ++s1)
          for (std::size_t s2 = 0; s2 < servers; ++s2) {
            const double tt = net.time(ssite(s1), ssite(s2)) * out_factor(i);
            if (tt != 0.0) r.push_back({-tt, j2(i, v, s1, s2)});
          }
        row("arrive_" + node(u) + "_" + node(i) + "_" + node(v), r, ge, -2.0 * big_m);
      }
      std::vector<LpTerm> dl{{1.0, y(u, v)}, {big_m, d(v, u)}};
      for (std::size_t s = 0; s < servers; ++s) {
        const double tt = net.time(ssite(s), psite(u)) * out_factor(v);
        if (tt != 0.0) dl.push_back({tt, j1(v, u, s)});
      }
      row("deadline_" + node(u) + "_" + node(v), dl, le, instance.qos().max_delay_ms + big_m);
    }
  return doc;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  const std::string t = lower(tok);
  if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity") {
    out = kInf;
    return true;
  }
  if (t == "-inf" || t == "-infinity") {
    out = -kInf;
    return true;
  }
  const char* first = tok.data();
  if (*first == '+') ++first;
  auto [end, ec] = std::from_chars(first, tok.data() + tok.size(), out);
  return ec == std::errc() && end == tok.data() + tok.size();
}

bool is_sense(const std::string& t) { return t == "<=" || t == ">=" || t == "=" || t == "<" || t == ">" || t == "=<" || t == "=>"; }

LpSense to_sense(const std::string& t) {
  if (t == "<=" || t == "<" || t == "=<") return LpSense::kLessEqual;
  if (t == ">=" || t == ">" || t == "=>") return LpSense::kGreaterEqual;
  return LpSense::kEqual;
}

}  // namespace

LpDocument parse_lp(std::string_view text) {
  enum class Section { kNone, kObjective, kRows, kBounds, kBinary, kGeneral, kEnd };
  Section section = Section::kNone;
  std::vector<std::pair<Section, std::vector<std::string>>> blocks;

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t comment = line.find('\\');
    if (comment != std::string::npos) line.erase(comment);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    const std::string head = lower(toks[0]);
    const std::string two = toks.size() > 1 ? head + " " + lower(toks[1]) : head;
    Section next = section;
    std::size_t skip = 0;
    if (toks.size() == 1 && (head == "minimize" || head == "minimise" || head == "min")) {
      next = Section::kObjective;
      skip = 1;
    } else if (two == "subject to" || two == "such that") {
      next = Section::kRows;
      skip = 2;
    } else if (toks.size() == 1 && (head == "st" || head == "s.t." || head == "st.")) {
      next = Section::kRows;
      skip = 1;
    } else if (toks.size() == 1 && (head == "bounds" || head == "bound")) {
      next = Section::kBounds;
      skip = 1;
    } else if (toks.size() == 1 && (head == "binaries" || head == "binary" || head == "bin")) {
      next = Section::kBinary;
      skip = 1;
    } else if (toks.size() == 1 && (head == "generals" || head == "general" || head == "gen")) {
      next = Section::kGeneral;
      skip = 1;
    } else if (toks.size() == 1 && head == "end") {
      next = Section::kEnd;
      skip = 1;
    } else if (toks.size() == 1 && (head == "maximize" || head == "maximise" || head == "max")) {
      throw LpParseError("only minimisation programs are supported");
    }
    if (next != section || blocks.empty()) {
      section = next;
      blocks.push_back({section, {}});
    }
    if (section == Section::kEnd) break;
    if (section == Section::kNone) throw LpParseError("text before the objective section: " + line);
    auto& toks_out = blocks.back().second;
    toks_out.insert(toks_out.end(), toks.begin() + static_cast<std::ptrdiff_t>(skip), toks.end());
    if (section == Section::kBounds && skip == 0) toks_out.push_back(";");
  }
  if (section != Section::kEnd) throw LpParseError("missing End");

  LpDocument doc;
  std::map<std::string, LpVariable> pending;
  std::vector<std::string> order;
  auto ensure = [&](const std::string& name) -> LpVariable& {
    auto it = pending.find(name);
    if (it == pending.end()) {
      order.push_back(name);
      it = pending.emplace(name, LpVariable{name, LpVarType::kContinuous, 0.0, kInf}).first;
    }
    return it->second;
  };

  // Reads "[sign] [coef] var" terms until a sense token or a new row name.
  auto read_terms = [&](const std::vector<std::string>& t, std::size_t& p) {
    std::vector<LpTerm> terms;
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    while (p < t.size() && !is_sense(t[p]) && t[p].back() != ':') {
      const std::string& tok = t[p++];
      double value;
      if (tok == "+") continue;
      if (tok == "-") {
        sign = -sign;
        continue;
      }
      if (parse_number(tok, value)) {
        coef = value;
        have_coef = true;
        continue;
      }
      ensure(tok);
      terms.push_back({sign * (have_coef ? coef : 1.0), tok});
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
    if (have_coef) throw LpParseError("dangling coefficient");
    return terms;
  };

  std::vector<LpRow> rows;
  std::vector<LpTerm> objective;
  for (auto& [sec, t] : blocks) {
    std::size_t p = 0;
    switch (sec) {
      case Section::kObjective:
        if (p < t.size() && t[p].back() == ':') ++p;
        objective = read_terms(t, p);
        if (p != t.size()) throw LpParseError("unexpected token in objective: " + t[p]);
        break;
      case Section::kRows:
        while (p < t.size()) {
          LpRow r;
          if (t[p].back() == ':') {
            r.name = t[p].substr(0, t[p].size() - 1);
            ++p;
          } else {
            r.name = "r" + std::to_string(rows.size());
          }
          r.terms = read_terms(t, p);
          if (p + 1 >= t.size() || !is_sense(t[p])) throw LpParseError("row " + r.name + " lacks a sense");
          r.sense = to_sense(t[p++]);
          if (!parse_number(t[p++], r.rhs)) throw LpParseError("row " + r.name + " has a bad right-hand side");
          rows.push_back(std::move(r));
        }
        break;
      case Section::kBounds: {
        std::vector<std::string> stmt;
        for (const std::string& tok : t) {
          if (tok != ";") {
            stmt.push_back(tok);
            continue;
          }
          double a, b;
          if (stmt.size() == 5 && parse_number(stmt[0], a) && parse_number(stmt[4], b)) {
            LpVariable& v = ensure(stmt[2]);
            v.lower = a;
            v.upper = b;
          } else if (stmt.size() == 3 && parse_number(stmt[2], a)) {
            LpVariable& v = ensure(stmt[0]);
            const LpSense s = to_sense(stmt[1]);
            if (s != LpSense::kLessEqual) v.lower = a;
            if (s != LpSense::kGreaterEqual) v.upper = a;
          } else if (stmt.size() == 2 && lower(stmt[1]) == "free") {
            LpVariable& v = ensure(stmt[0]);
            v.lower = -kInf;
            v.upper = kInf;
          } else if (!stmt.empty()) {
            throw LpParseError("unsupported bound statement");
          }
          stmt.clear();
        }
        break;
      }
      case Section::kBinary:
        for (const std::string& name : t) {
          LpVariable& v = ensure(name);
          v.type = LpVarType::kBinary;
          v.lower = 0.0;
          v.upper = 1.0;
        }
        break;
      case Section::kGeneral:
        for (const std::string& name : t) ensure(name).type = LpVarType::kInteger;
        break;
      default:
        break;
    }
  }
  for (const std::string& name : order) doc.add_variable(pending.at(name));
  doc.set_objective(std::move(objective));
  for (LpRow& r : rows) doc.add_row(std::move(r));
  return doc;
}

}  // namespace cram

// Copyright 2026 The CEPP Authors
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

#include "cepp/rewrite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "cepp/error.hpp"

namespace cepp {

namespace {

constexpr std::array<std::pair<RuleId, std::string_view>, 4> kRuleNames = {{
    {RuleId::kShToNonsh, "SH_TO_NONSH"},
    {RuleId::kNonshToSh, "NONSH_TO_SH"},
    {RuleId::kCombineNeighbors, "COMBINE_NEIGHBORS"},
    {RuleId::kRouterToRoutingSlip, "ROUTER_TO_ROUTING_SLIP"},
}};

constexpr std::string_view kDecomposeLabel = "DECOMPOSE";

const std::vector<std::string> kNoIds;

// Mutable working copy of a graph. Ipcg itself is immutable, so rewrites
// edit a draft and rebuild.
struct Draft {
  std::string id;
  std::string tenant;
  std::vector<PatternNode> nodes;
  std::vector<Edge> edges;

  explicit Draft(const Ipcg& g)
      : id(g.id()), tenant(g.tenant()), nodes(g.nodes()), edges(g.edges()) {}

  Ipcg build() const { return Ipcg(id, tenant, nodes, edges); }

  bool has_node(const std::string& nid) const {
    return std::any_of(nodes.begin(), nodes.end(),
                       [&](const PatternNode& n) { return n.id == nid; });
  }

  std::string fresh_id(const std::string& base) const {
    if (!has_node(base)) return base;
    for (int k = 2;; ++k) {
      std::string cand = base + "." + std::to_string(k);
      if (!has_node(cand)) return cand;
    }
  }

  void erase_nodes(const std::set<std::string>& ids) {
    std::erase_if(nodes, [&](const PatternNode& n) { return ids.count(n.id) > 0; });
  }
};

PatternNode plumbing_node(std::string id, std::string name, PatternType type,
                          std::string_view kind) {
  PatternNode n;
  n.id = std::move(id);
  n.name = std::move(name);
  n.type = type;
  n.kind = std::string(kind);
  n.chars.cap_mb = kPlumbingCapacityMb;
  n.chars.shareable = true;
  switch (type) {
    case PatternType::kStart:
      n.chars.mc_in = 0;
      n.chars.mc_out = 1;
      n.chars.message_generating = true;
      n.out_contracts = {Contract::pass_through()};
      break;
    case PatternType::kEnd:
      n.chars.mc_in = 1;
      n.chars.mc_out = 0;
      n.in_contracts = {Contract::pass_through()};
      break;
    default:
      n.in_contracts = {Contract::pass_through()};
      n.out_contracts = {Contract::pass_through()};
      break;
  }
  return n;
}

struct CutEnds {
  std::string caller;
  std::string receiver;
};

// Replaces the edge from -> to by from -> call -> call-end on the caller side
// and receiver -> to on the callee side. Edge positions are kept so that the
// contract lists of `from` and `to` stay aligned.
CutEnds cut_edge(Draft& d, const std::string& from, const std::string& to,
                 RewriteStats& stats) {
  auto it = std::find(d.edges.begin(), d.edges.end(), Edge{from, to});
  if (it == d.edges.end()) {
    throw Error(ErrorCode::kMatchStale, "edge " + from + "->" + to + " is gone");
  }
  const std::string suffix = from + "." + to;
  std::string xc = d.fresh_id("xc." + suffix);
  PatternNode call = plumbing_node(xc, "call " + to, PatternType::kExternalCall,
                                   kRemoteCallKind);
  d.nodes.push_back(call);
  std::string xe = d.fresh_id("xe." + suffix);
  d.nodes.push_back(plumbing_node(xe, "end of call " + to, PatternType::kEnd,
                                  kRemoteCallEndKind));
  std::string rc = d.fresh_id("rc." + suffix);
  d.nodes.push_back(plumbing_node(rc, "receive from " + from, PatternType::kStart,
                                  kEventReceiverKind));
  for (auto& n : d.nodes) {
    if (n.id == xc) n.remote_link = rc;
    if (n.id == rc) n.remote_link = xc;
  }

  std::size_t k = static_cast<std::size_t>(it - d.edges.begin());
  d.edges[k] = {from, xc};
  d.edges.insert(d.edges.begin() + static_cast<std::ptrdiff_t>(k + 1), Edge{rc, to});
  d.edges.emplace_back(xc, xe);

  stats.nodes_added += 3;
  stats.capacity_added_mb += 3 * kPlumbingCapacityMb;
  return {xc, rc};
}

// Splits a draft into its connected components, ordered by smallest node id.
std::vector<Ipcg> split_components(const Draft& d,
                                   std::unordered_map<std::string, std::string>& owner) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < d.nodes.size(); ++i) index[d.nodes[i].id] = i;
  std::vector<std::size_t> parent(d.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : d.edges) parent[find(index[a])] = find(index[b]);

  std::map<std::size_t, std::string> smallest;
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    auto root = find(i);
    auto [it, inserted] = smallest.emplace(root, d.nodes[i].id);
    if (!inserted && d.nodes[i].id < it->second) it->second = d.nodes[i].id;
  }
  std::vector<std::pair<std::string, std::size_t>> order;
  for (const auto& [root, id] : smallest) order.emplace_back(id, root);
  std::sort(order.begin(), order.end());

  const std::string base = d.id.empty() ? "ipcg" : d.id;
  std::vector<Ipcg> out;
  for (std::size_t c = 0; c < order.size(); ++c) {
    std::size_t root = order[c].second;
    std::string gid = order.size() == 1 ? base : base + "/" + std::to_string(c);
    std::vector<PatternNode> nodes;
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      if (find(i) == root) {
        nodes.push_back(d.nodes[i]);
        owner[d.nodes[i].id] = gid;
      }
    }
    std::vector<Edge> edges;
    for (const auto& e : d.edges) {
      if (find(index[e.first]) == root) edges.push_back(e);
    }
    out.emplace_back(gid, d.tenant, std::move(nodes), std::move(edges));
  }
  return out;
}

void sort_matches(std::vector<Match>& ms) {
  std::sort(ms.begin(), ms.end(), [](const Match& a, const Match& b) {
    auto sa = a.smallest_id();
    auto sb = b.smallest_id();
    if (sa != sb) return sa < sb;
    return a.bindings < b.bindings;
  });
}

// ---------------------------------------------------------------------------
// Decomposition rules

std::vector<Match> crossing_matches(RuleId rule, const Ipcg& g) {
  const auto& nodes = g.nodes();
  auto hard = [](const PatternNode& n) { return !n.chars.shareable && !is_plumbing(n); };

  // Connected components of the non-shareable pattern nodes.
  std::unordered_map<std::string, std::string> parent;
  for (const auto& n : nodes) {
    if (hard(n)) parent[n.id] = n.id;
  }
  std::function<std::string(const std::string&)> find = [&](const std::string& x) {
    std::string r = x;
    while (parent[r] != r) r = parent[r];
    return r;
  };
  for (const auto& [a, b] : g.edges()) {
    if (parent.count(a) && parent.count(b)) parent[find(a)] = find(b);
  }
  std::map<std::string, std::vector<std::string>> clouds;
  for (const auto& n : nodes) {
    if (hard(n)) clouds[find(n.id)].push_back(n.id);
  }
  for (auto& [root, ids] : clouds) std::sort(ids.begin(), ids.end());

  std::vector<Match> out;
  for (const auto& [a, b] : g.edges()) {
    const auto& na = g.node(a);
    const auto& nb = g.node(b);
    if (is_plumbing(na) || is_plumbing(nb)) continue;
    Match m;
    m.rule = rule;
    if (rule == RuleId::kShToNonsh && na.chars.shareable && hard(nb)) {
      m.bindings["p1"] = {a};
      m.bindings["entry"] = {b};
      m.bindings["cloud"] = clouds[find(b)];
    } else if (rule == RuleId::kNonshToSh && hard(na) && nb.chars.shareable) {
      m.bindings["p1"] = {b};
      m.bindings["exit"] = {a};
      m.bindings["cloud"] = clouds[find(a)];
    } else {
      continue;
    }
    out.push_back(std::move(m));
  }
  sort_matches(out);
  return out;
}

Edge crossing_edge(const Match& m) {
  if (m.rule == RuleId::kShToNonsh) return {m.role("p1").at(0), m.role("entry").at(0)};
  return {m.role("exit").at(0), m.role("p1").at(0)};
}

// ---------------------------------------------------------------------------
// COMBINE_NEIGHBORS

bool combinable_kind(const PatternNode& n) {
  return n.type == PatternType::kMessageProcessor &&
         (n.kind == "content-enricher" || n.kind == "message-translator") &&
         n.in_contracts.size() == 1 && n.out_contracts.size() == 1;
}

using ElementMap = std::map<ElementKey, std::set<std::string>>;

struct ElementAccess {
  ElementMap reads;
  ElementMap writes;
  ElementMap deletes;
};

ElementAccess element_access(const PatternNode& n) {
  ElementAccess acc;
  const Contract& in = n.in_contracts.front();
  const Contract& out = n.out_contracts.front();
  for (ElementKey key : kAllElementKeys) {
    auto i = in.elements.find(key);
    auto o = out.elements.find(key);
    bool in_concrete = i != in.elements.end() && !i->second.any;
    bool out_concrete = o != out.elements.end() && !o->second.any;
    if (in_concrete) acc.reads[key] = i->second.ids;
    if (out_concrete) {
      auto& w = acc.writes[key];
      for (const auto& id : o->second.ids) {
        if (!in_concrete || !i->second.ids.count(id)) w.insert(id);
      }
    }
    if (in_concrete && out_concrete) {
      auto& del = acc.deletes[key];
      for (const auto& id : i->second.ids) {
        if (!o->second.ids.count(id)) del.insert(id);
      }
    }
  }
  return acc;
}

bool intersects(const ElementMap& a, const ElementMap& b) {
  for (const auto& [key, ids] : a) {
    auto it = b.find(key);
    if (it == b.end()) continue;
    for (const auto& id : ids) {
      if (it->second.count(id)) return true;
    }
  }
  return false;
}

// An earlier node in a run conflicts with a later one if it writes or
// deletes anything the later one reads.
bool conflicts(const ElementAccess& earlier, const ElementAccess& later) {
  return intersects(earlier.writes, later.reads) ||
         intersects(earlier.deletes, later.reads);
}

Contract merged_in_contract(const Ipcg& g, const std::vector<std::string>& run) {
  Contract c;
  c.concepts = g.node(run.front()).in_contracts.front().concepts;
  for (ElementKey key : kAllElementKeys) {
    bool concrete = false;
    bool present = false;
    std::set<std::string> ids;
    for (const auto& id : run) {
      const Contract& in = g.node(id).in_contracts.front();
      auto it = in.elements.find(key);
      if (it == in.elements.end()) continue;
      present = true;
      if (!it->second.any) {
        concrete = true;
        ids.insert(it->second.ids.begin(), it->second.ids.end());
      }
    }
    if (concrete) {
      c.elements[key] = ElementSet::of(std::move(ids));
    } else if (present) {
      c.elements[key] = ElementSet::wildcard();
    }
  }
  return c;
}

bool run_fits_predecessor(const Ipcg& g, const std::vector<std::string>& run) {
  auto preds = g.predecessors(run.front());
  if (preds.size() != 1) return false;
  const Contract* have = g.out_contract_on(preds.front(), run.front());
  if (have == nullptr) return false;
  Contract want = merged_in_contract(g, run);
  return match_contracts(want, std::span<const Contract>(have, 1));
}

std::vector<Match> combine_matches(const Ipcg& g) {
  auto linked = [&](const std::string& u, const std::string& v) {
    const auto& a = g.node(u);
    const auto& b = g.node(v);
    return combinable_kind(a) && combinable_kind(b) && a.kind == b.kind &&
           g.out_degree(u) == 1 && g.in_degree(v) == 1;
  };
  std::vector<Match> out;
  for (const auto& n : g.nodes()) {
    if (!combinable_kind(n)) continue;
    auto preds = g.predecessors(n.id);
    if (preds.size() == 1 && linked(preds.front(), n.id)) continue;  // not a head

    std::vector<std::string> chain = {n.id};
    std::set<std::string> seen = {n.id};
    while (true) {
      auto succ = g.successors(chain.back());
      if (succ.size() != 1 || seen.count(succ.front()) ||
          !linked(chain.back(), succ.front())) {
        break;
      }
      seen.insert(succ.front());
      chain.push_back(succ.front());
    }

    std::vector<std::string> run;
    std::vector<ElementAccess> access;
    auto flush = [&] {
      if (run.size() >= 2 && run_fits_predecessor(g, run)) {
        Match m;
        m.rule = RuleId::kCombineNeighbors;
        m.bindings["run"] = run;
        out.push_back(std::move(m));
      }
      run.clear();
      access.clear();
    };
    for (const auto& id : chain) {
      ElementAccess acc = element_access(g.node(id));
      bool clash = std::any_of(access.begin(), access.end(), [&](const ElementAccess& e) {
        return conflicts(e, acc);
      });
      if (clash) flush();
      run.push_back(id);
      access.push_back(std::move(acc));
    }
    flush();
  }
  sort_matches(out);
  return out;
}

RewriteResult apply_combine(const Match& m, const Ipcg& g) {
  const auto& run = m.role("run");
  Draft d(g);
  RewriteStats stats;

  PatternNode merged = g.node(run.front());
  const PatternNode& last = g.node(run.back());
  std::vector<std::string> names;
  std::vector<std::string> programs;
  merged.chars.conditions.clear();
  merged.chars.cap_mb = 0.0;
  merged.chars.shareable = true;
  merged.chars.message_generating = false;
  for (const auto& id : run) {
    const auto& n = g.node(id);
    names.push_back(n.name.empty() ? n.id : n.name);
    if (n.chars.program) programs.push_back(*n.chars.program);
    merged.chars.conditions.insert(merged.chars.conditions.end(),
                                   n.chars.conditions.begin(), n.chars.conditions.end());
    merged.chars.cap_mb = std::max(merged.chars.cap_mb, n.chars.cap_mb);
    merged.chars.shareable = merged.chars.shareable && n.chars.shareable;
    merged.chars.message_generating =
        merged.chars.message_generating || n.chars.message_generating;
    if (n.chars.access == Access::kReadWrite) merged.chars.access = Access::kReadWrite;
    stats.nodes_removed += 1;
    stats.capacity_removed_mb += n.chars.cap_mb;
  }
  merged.name.clear();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) merged.name += ", ";
    merged.name += names[i];
  }
  if (programs.empty()) {
    merged.chars.program.reset();
  } else {
    std::string p;
    for (std::size_t i = 0; i < programs.size(); ++i) {
      if (i) p += "; ";
      p += programs[i];
    }
    merged.chars.program = p;
  }
  merged.in_contracts = {merged_in_contract(g, run)};
  merged.out_contracts = last.out_contracts;
  stats.nodes_added = 1;
  stats.capacity_added_mb = merged.chars.cap_mb;

  std::set<std::string> dropped(run.begin() + 1, run.end());
  std::set<std::string> in_run(run.begin(), run.end());
  std::vector<Edge> edges;
  for (const auto& e : d.edges) {
    if (in_run.count(e.first) && in_run.count(e.second)) continue;
    if (e.first == run.back()) {
      edges.emplace_back(run.front(), e.second);
    } else {
      edges.push_back(e);
    }
  }
  d.edges = std::move(edges);
  for (auto& n : d.nodes) {
    if (n.id == run.front()) n = merged;
  }
  d.erase_nodes(dropped);
  return RewriteResult{{d.build()}, {}, stats};
}

// ---------------------------------------------------------------------------
// ROUTER_TO_ROUTING_SLIP

std::optional<Match> routing_slip_match(const Ipcg& g, const PatternNode& router) {
  if (router.type != PatternType::kCondition) return std::nullopt;
  std::vector<std::string> calls;
  std::vector<std::string> ends;
  for (const auto& s : g.successors(router.id)) {
    const auto& n = g.node(s);
    if (n.type == PatternType::kExternalCall && g.out_degree(s) == 1 &&
        g.in_degree(s) == 1 && n.in_contracts.size() == 1 &&
        n.out_contracts.size() == 1) {
      calls.push_back(s);
    } else if (n.type == PatternType::kEnd && g.in_degree(s) == 1) {
      ends.push_back(s);
    } else {
      return std::nullopt;
    }
  }
  if (calls.empty()) return std::nullopt;
  const auto& first = g.node(calls.front());
  if (first.receiver.empty()) return std::nullopt;
  for (const auto& c : calls) {
    const auto& n = g.node(c);
    if (n.receiver != first.receiver || n.in_contracts != first.in_contracts) {
      return std::nullopt;
    }
  }

  std::optional<std::string> join;
  if (calls.size() > 1) {
    std::string j = g.successors(calls.front()).front();
    for (const auto& c : calls) {
      if (g.successors(c).front() != j) return std::nullopt;
    }
    const auto& jn = g.node(j);
    auto preds = g.predecessors(j);
    std::set<std::string> pred_set(preds.begin(), preds.end());
    std::set<std::string> call_set(calls.begin(), calls.end());
    if (jn.type != PatternType::kStructuralJoin || pred_set != call_set ||
        g.out_degree(j) != 1 || jn.out_contracts.size() != 1) {
      return std::nullopt;
    }
    join = j;
  }

  std::set<std::string> removed_ends(ends.begin(), ends.end());
  bool end_left = std::any_of(g.nodes().begin(), g.nodes().end(), [&](const PatternNode& n) {
    return n.type == PatternType::kEnd && !removed_ends.count(n.id);
  });
  if (!end_left) return std::nullopt;

  Match m;
  m.rule = RuleId::kRouterToRoutingSlip;
  m.bindings["router"] = {router.id};
  m.bindings["calls"] = calls;
  m.bindings["ends"] = ends;
  if (join) m.bindings["join"] = {*join};
  return m;
}

std::vector<Match> routing_slip_matches(const Ipcg& g) {
  std::vector<Match> out;
  for (const auto& n : g.nodes()) {
    if (auto m = routing_slip_match(g, n)) out.push_back(std::move(*m));
  }
  sort_matches(out);
  return out;
}

RewriteResult apply_routing_slip(const Match& m, const Ipcg& g) {
  const std::string& rid = m.role("router").at(0);
  const auto& calls = m.role("calls");
  const auto& ends = m.role("ends");
  const auto& join_role = m.role("join");
  const PatternNode& router = g.node(rid);
  const PatternNode& call = g.node(calls.front());
  const std::string tail = join_role.empty() ? calls.front() : join_role.front();
  const std::string succ = g.successors(tail).front();

  RewriteStats stats;
  std::set<std::string> removed = {rid};
  removed.insert(calls.begin(), calls.end());
  removed.insert(ends.begin(), ends.end());
  removed.insert(join_role.begin(), join_role.end());
  for (const auto& id : removed) {
    stats.nodes_removed += 1;
    stats.capacity_removed_mb += g.node(id).chars.cap_mb;
  }

  // Enricher that writes the routing slip header.
  PatternNode slip;
  slip.id = rid;
  slip.name = (router.name.empty() ? rid : router.name) + " (routing slip)";
  slip.type = PatternType::kMessageProcessor;
  slip.kind = "content-enricher";
  slip.chars.cap_mb = router.chars.cap_mb;
  slip.chars.shareable = router.chars.shareable;
  slip.chars.access = Access::kReadWrite;
  std::string selectors;
  auto succs = g.successors(rid);
  for (std::size_t k = 0; k < succs.size(); ++k) {
    const auto& n = g.node(succs[k]);
    if (n.type != PatternType::kExternalCall) continue;
    std::string cond = k < router.chars.conditions.size() ? router.chars.conditions[k]
                                                          : "branch " + std::to_string(k);
    if (!selectors.empty()) selectors += "; ";
    selectors += cond + " => " + (n.remote_link ? *n.remote_link : n.id);
  }
  slip.chars.program = selectors;
  slip.in_contracts = router.in_contracts;
  Contract slip_out = *g.out_contract_on(rid, calls.front());
  auto hdr = slip_out.elements.find(ElementKey::kHeader);
  if (hdr == slip_out.elements.end()) {
    slip_out.elements[ElementKey::kHeader] =
        ElementSet::of({std::string(kRoutingSlipHeader)});
  } else if (!hdr->second.any) {
    hdr->second.ids.insert(std::string(kRoutingSlipHeader));
  }
  slip.out_contracts = {slip_out};

  // The single remaining call, addressed through the slip.
  PatternNode target = call;
  target.name = call.receiver + " (routing slip)";
  target.remote_link = call.receiver;
  Contract target_in = call.in_contracts.front();
  auto slip_hdr = slip_out.elements.find(ElementKey::kHeader);
  if (slip_hdr != slip_out.elements.end() && !slip_hdr->second.any) {
    target_in.elements[ElementKey::kHeader] = slip_hdr->second;
  }
  target.in_contracts = {target_in};
  target.out_contracts = g.node(tail).out_contracts;

  stats.nodes_added = 2;
  stats.capacity_added_mb = slip.chars.cap_mb + target.chars.cap_mb;

  std::set<std::string> erase = removed;
  erase.erase(rid);
  erase.erase(target.id);

  Draft d(g);
  std::vector<Edge> edges;
  bool slip_edge_done = false;
  for (const auto& e : d.edges) {
    if (e.first == rid) {
      if (!slip_edge_done) {
        edges.emplace_back(rid, target.id);
        slip_edge_done = true;
      }
      continue;
    }
    if (e.first == tail && e.second == succ) {
      edges.emplace_back(target.id, succ);
      continue;
    }
    if (removed.count(e.first) || erase.count(e.second)) continue;
    edges.push_back(e);
  }
  d.edges = std::move(edges);
  d.erase_nodes(erase);
  for (auto& n : d.nodes) {
    if (n.id == rid) n = slip;
    if (n.id == target.id) n = target;
  }
  return RewriteResult{{d.build()}, {}, stats};
}

RewriteResult apply_decomposition(const Match& m, const Ipcg& g) {
  Draft d(g);
  RewriteStats stats;
  Edge e = crossing_edge(m);
  CutEnds ends = cut_edge(d, e.first, e.second, stats);
  std::unordered_map<std::string, std::string> owner;
  RewriteResult r;
  r.graphs = split_components(d, owner);
  r.remote_links.push_back({ends.caller, owner.at(ends.receiver), ends.receiver});
  r.stats = stats;
  return r;
}

void check_post(const RewriteResult& r, std::string_view what) {
  for (const auto& g : r.graphs) {
    auto report = validate_ipcg(g);
    if (!report.is_correct()) {
      const auto& v = report.violations.front();
      throw Error(ErrorCode::kPostConditionViolated,
                  std::string(what) + " produced an invalid graph " + g.id() + ": " +
                      v.code + " at " + v.ref + " (" + v.message + ")");
    }
  }
}

std::string join_names(const Ipcg& g, const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    const auto& n = g.node(ids[i]);
    out += n.name.empty() ? n.id : n.name;
  }
  return out;
}

std::string describe(const Match& m, const Ipcg& g) {
  switch (m.rule) {
    case RuleId::kCombineNeighbors:
      return "Combine " + join_names(g, m.role("run")) + " into one " +
             g.node(m.role("run").front()).kind;
    case RuleId::kRouterToRoutingSlip:
      return "Replace router " + join_names(g, m.role("router")) + " and " +
             std::to_string(m.role("calls").size()) +
             " external call(s) with a routing slip";
    case RuleId::kShToNonsh:
    case RuleId::kNonshToSh: {
      Edge e = crossing_edge(m);
      return "Cut edge " + e.first + " -> " + e.second;
    }
  }
  return {};
}

}  // namespace

std::string_view to_string(RuleId rule) {
  for (const auto& [r, name] : kRuleNames) {
    if (r == rule) return name;
  }
  return "UNKNOWN";
}

std::optional<RuleId> parse_rule_id(std::string_view text) {
  for (const auto& [r, name] : kRuleNames) {
    if (name == text) return r;
  }
  return std::nullopt;
}

const std::vector<std::string>& Match::role(const std::string& name) const {
  auto it = bindings.find(name);
  return it == bindings.end() ? kNoIds : it->second;
}

std::string Match::smallest_id() const {
  std::string best;
  bool first = true;
  for (const auto& [role, ids] : bindings) {
    for (const auto& id : ids) {
      if (first || id < best) best = id;
      first = false;
    }
  }
  return best;
}

RewriteStats& RewriteStats::operator+=(const RewriteStats& o) {
  nodes_removed += o.nodes_removed;
  nodes_added += o.nodes_added;
  capacity_removed_mb += o.capacity_removed_mb;
  capacity_added_mb += o.capacity_added_mb;
  return *this;
}

std::vector<Match> find_matches(RuleId rule, const Ipcg& g) {
  switch (rule) {
    case RuleId::kShToNonsh:
    case RuleId::kNonshToSh:
      return crossing_matches(rule, g);
    case RuleId::kCombineNeighbors:
      return combine_matches(g);
    case RuleId::kRouterToRoutingSlip:
      return routing_slip_matches(g);
  }
  return {};
}

RewriteResult apply_rule(const Match& m, const Ipcg& g) {
  for (const auto& [role, ids] : m.bindings) {
    for (const auto& id : ids) {
      if (!g.contains(id)) {
        throw Error(ErrorCode::kMatchStale, "node " + id + " no longer exists");
      }
    }
  }
  auto current = find_matches(m.rule, g);
  if (std::find(current.begin(), current.end(), m) == current.end()) {
    throw Error(ErrorCode::kMatchStale,
                std::string(to_string(m.rule)) + " match at " + m.smallest_id() +
                    " no longer applies");
  }
  RewriteResult r;
  switch (m.rule) {
    case RuleId::kShToNonsh:
    case RuleId::kNonshToSh:
      r = apply_decomposition(m, g);
      break;
    case RuleId::kCombineNeighbors:
      r = apply_combine(m, g);
      break;
    case RuleId::kRouterToRoutingSlip:
      r = apply_routing_slip(m, g);
      break;
  }
  check_post(r, to_string(m.rule));
  return r;
}

RewriteResult decompose(const Ipcg& g) {
  Draft d(g);
  RewriteStats stats;
  std::vector<CutEnds> cuts;
  for (RuleId rule : {RuleId::kShToNonsh, RuleId::kNonshToSh}) {
    while (true) {
      auto ms = crossing_matches(rule, d.build());
      if (ms.empty()) break;
      Edge e = crossing_edge(ms.front());
      cuts.push_back(cut_edge(d, e.first, e.second, stats));
    }
  }
  std::unordered_map<std::string, std::string> owner;
  RewriteResult r;
  r.graphs = split_components(d, owner);
  if (cuts.empty()) r.graphs = {g};
  for (const auto& c : cuts) {
    r.remote_links.push_back({c.caller, owner.at(c.receiver), c.receiver});
  }
  r.stats = stats;
  check_post(r, "decomposition");
  return r;
}

bool verify_rewrite(const Ipcg& before, const RewriteResult& after) {
  if (after.graphs.empty()) return false;
  double cap_after = 0.0;
  std::size_t nodes_after = 0;
  std::map<std::string, const Ipcg*> by_id;
  for (const auto& g : after.graphs) {
    if (!validate_ipcg(g).is_correct()) return false;
    if (g.tenant() != before.tenant()) return false;
    cap_after += process_capacity(g);
    nodes_after += g.size();
    by_id[g.id()] = &g;
  }
  for (const auto& link : after.remote_links) {
    bool caller_ok = std::any_of(after.graphs.begin(), after.graphs.end(), [&](const Ipcg& g) {
      return g.contains(link.caller_node) &&
             g.node(link.caller_node).type == PatternType::kExternalCall;
    });
    auto it = by_id.find(link.callee_graph);
    bool receiver_ok = it != by_id.end() && it->second->contains(link.receiver_node) &&
                       it->second->node(link.receiver_node).type == PatternType::kStart;
    if (!caller_ok || !receiver_ok) return false;
  }
  const auto& s = after.stats;
  double expected = process_capacity(before) + s.capacity_added_mb - s.capacity_removed_mb;
  if (std::abs(cap_after - expected) > 1e-6) return false;
  return nodes_after + s.nodes_removed == before.size() + s.nodes_added;
}

std::string Proposal::rule_label() const {
  return rule ? std::string(to_string(*rule)) : std::string(kDecomposeLabel);
}

namespace {

Cents price(const Pricer& pricer, const std::vector<Ipcg>& graphs) {
  try {
    return pricer(graphs);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kPricingUnavailable, std::string("pricing failed: ") + e.what());
  }
}

int rule_rank(const Proposal& p) {
  return p.rule ? static_cast<int>(*p.rule) : static_cast<int>(kAllRules.size());
}

}  // namespace

std::vector<Proposal> enumerate_proposals(const Ipcg& g, const Pricer& pricer) {
  const Cents before = price(pricer, {g});
  std::vector<Proposal> out;
  for (RuleId rule : {RuleId::kCombineNeighbors, RuleId::kRouterToRoutingSlip}) {
    for (const auto& m : find_matches(rule, g)) {
      Proposal p;
      p.rule = rule;
      p.match = m;
      p.preview = apply_rule(m, g);
      p.cost_before = before;
      p.cost_after = price(pricer, p.preview.graphs);
      p.nodes_removed = p.preview.stats.net_nodes_removed();
      p.description = describe(m, g);
      if (p.cost_after <= p.cost_before) out.push_back(std::move(p));
    }
  }
  RewriteResult parts = decompose(g);
  if (parts.graphs.size() > 1) {
    Proposal p;
    p.cost_before = before;
    p.cost_after = price(pricer, parts.graphs);
    p.nodes_removed = parts.stats.net_nodes_removed();
    std::size_t shareable = 0;
    for (const auto& part : parts.graphs) shareable += process_shareable(part) ? 1 : 0;
    p.description = "Cut into " + std::to_string(parts.graphs.size()) + " processes (" +
                    std::to_string(shareable) + " shareable, " +
                    std::to_string(parts.graphs.size() - shareable) + " non-shareable)";
    p.preview = std::move(parts);
    if (p.cost_after <= p.cost_before) out.push_back(std::move(p));
  }
  std::stable_sort(out.begin(), out.end(), [](const Proposal& a, const Proposal& b) {
    if (a.savings() != b.savings()) return a.savings() > b.savings();
    if (a.nodes_removed != b.nodes_removed) return a.nodes_removed < b.nodes_removed;
    return rule_rank(a) < rule_rank(b);
  });
  for (std::size_t k = 0; k < out.size(); ++k) out[k].id = "p" + std::to_string(k + 1);
  return out;
}

ImproveResult improve(const Ipcg& g, const Pricer& pricer) {
  ImproveResult result{g, {}};
  while (true) {
    std::optional<Match> next;
    for (RuleId rule : {RuleId::kCombineNeighbors, RuleId::kRouterToRoutingSlip}) {
      auto ms = find_matches(rule, result.graph);
      if (!ms.empty()) {
        next = ms.front();
        break;
      }
    }
    if (!next) break;
    Proposal p;
    p.rule = next->rule;
    p.match = *next;
    p.description = describe(*next, result.graph);
    p.preview = apply_rule(*next, result.graph);
    p.nodes_removed = p.preview.stats.net_nodes_removed();
    if (pricer) {
      p.cost_before = price(pricer, {result.graph});
      p.cost_after = price(pricer, p.preview.graphs);
    }
    p.id = "i" + std::to_string(result.applied.size() + 1);
    result.graph = p.preview.graphs.front();
    result.applied.push_back(std::move(p));
  }
  return result;
}

}  // namespace cepp

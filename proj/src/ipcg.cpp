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

#include "cepp/ipcg.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "cepp/error.hpp"

namespace cepp {

namespace {

constexpr std::array<std::pair<PatternType, std::string_view>, 8> kTypeNames = {{
    {PatternType::kStart, "start"},
    {PatternType::kEnd, "end"},
    {PatternType::kMessageProcessor, "message-processor"},
    {PatternType::kFork, "fork"},
    {PatternType::kStructuralJoin, "structural-join"},
    {PatternType::kCondition, "condition"},
    {PatternType::kMerge, "merge"},
    {PatternType::kExternalCall, "external-call"},
}};

std::string edge_ref(std::string_view from, std::string_view to) {
  std::string ref(from);
  ref += "->";
  ref += to;
  return ref;
}

}  // namespace

std::string_view to_string(PatternType type) {
  for (const auto& [t, name] : kTypeNames) {
    if (t == type) return name;
  }
  return "unknown";
}

std::optional<PatternType> parse_pattern_type(std::string_view text) {
  for (const auto& [t, name] : kTypeNames) {
    if (name == text) return t;
  }
  return std::nullopt;
}

std::string_view to_string(ConceptValue value) {
  switch (value) {
    case ConceptValue::kYes:
      return "yes";
    case ConceptValue::kNo:
      return "no";
    case ConceptValue::kAny:
      return "any";
  }
  return "any";
}

std::string_view to_string(ElementKey key) {
  switch (key) {
    case ElementKey::kHeader:
      return "hdr";
    case ElementKey::kPayload:
      return "pl";
    case ElementKey::kAttachment:
      return "attch";
  }
  return "hdr";
}

Contract Contract::pass_through() {
  Contract c;
  for (ElementKey key : kAllElementKeys) c.elements[key] = ElementSet::wildcard();
  return c;
}

bool is_plumbing(const PatternNode& node) {
  return node.kind == kRemoteCallKind || node.kind == kRemoteCallEndKind ||
         node.kind == kEventReceiverKind;
}

// ---------------------------------------------------------------------------
// Ipcg

Ipcg::Ipcg(std::string id, std::string tenant, std::vector<PatternNode> nodes,
           std::vector<Edge> edges)
    : id_(std::move(id)),
      tenant_(std::move(tenant)),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)) {
  reindex();
  std::set<Edge> seen;
  for (const auto& [from, to] : edges_) {
    if (!contains(from) || !contains(to)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge " + edge_ref(from, to) + " references an unknown node");
    }
    if (from == to) {
      throw Error(ErrorCode::kInvalidArgument, "self-loop on node " + from);
    }
    if (!seen.insert({from, to}).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate edge " + edge_ref(from, to));
    }
  }
}

void Ipcg::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "node with empty id");
    }
    if (!index_.emplace(nodes_[i].id, i).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate node id " + nodes_[i].id);
    }
  }
}

bool Ipcg::contains(std::string_view node_id) const {
  return index_.count(std::string(node_id)) > 0;
}

std::optional<std::size_t> Ipcg::index_of(std::string_view node_id) const {
  auto it = index_.find(std::string(node_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const PatternNode& Ipcg::node(std::string_view node_id) const {
  auto idx = index_of(node_id);
  if (!idx) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown node " + std::string(node_id));
  }
  return nodes_[*idx];
}

std::vector<std::string> Ipcg::successors(std::string_view node_id) const {
  std::vector<std::string> out;
  for (const auto& [from, to] : edges_) {
    if (from == node_id) out.push_back(to);
  }
  return out;
}

std::vector<std::string> Ipcg::predecessors(std::string_view node_id) const {
  std::vector<std::string> out;
  for (const auto& [from, to] : edges_) {
    if (to == node_id) out.push_back(from);
  }
  return out;
}

std::size_t Ipcg::in_degree(std::string_view node_id) const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(),
                    [&](const Edge& e) { return e.second == node_id; }));
}

std::size_t Ipcg::out_degree(std::string_view node_id) const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(),
                    [&](const Edge& e) { return e.first == node_id; }));
}

std::optional<std::size_t> Ipcg::out_position(std::string_view from,
                                              std::string_view to) const {
  std::size_t pos = 0;
  for (const auto& e : edges_) {
    if (e.first != from) continue;
    if (e.second == to) return pos;
    ++pos;
  }
  return std::nullopt;
}

std::optional<std::size_t> Ipcg::in_position(std::string_view from,
                                             std::string_view to) const {
  std::size_t pos = 0;
  for (const auto& e : edges_) {
    if (e.second != to) continue;
    if (e.first == from) return pos;
    ++pos;
  }
  return std::nullopt;
}

const Contract* Ipcg::out_contract_on(std::string_view from,
                                      std::string_view to) const {
  auto pos = out_position(from, to);
  if (!pos) return nullptr;
  const auto& list = node(from).out_contracts;
  return *pos < list.size() ? &list[*pos] : nullptr;
}

const Contract* Ipcg::in_contract_on(std::string_view from,
                                     std::string_view to) const {
  auto pos = in_position(from, to);
  if (!pos) return nullptr;
  const auto& list = node(to).in_contracts;
  return *pos < list.size() ? &list[*pos] : nullptr;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::has(std::string_view code) const {
  return count(code) > 0;
}

std::size_t ValidationReport::count(std::string_view code) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(),
                    [&](const Violation& v) { return v.code == code; }));
}

namespace {

void sort_violations(std::vector<Violation>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.ref, a.code) < std::tie(b.ref, b.code);
  });
}

std::string expect_text(std::size_t in, std::string_view in_want,
                        std::size_t out, std::string_view out_want) {
  return "in=" + std::to_string(in) + " (want " + std::string(in_want) +
         "), out=" + std::to_string(out) + " (want " + std::string(out_want) +
         ")";
}

void check_cardinality(const Ipcg& g, const PatternNode& n,
                       std::vector<Violation>& out) {
  const std::size_t in = g.in_degree(n.id);
  std::size_t deg_out = g.out_degree(n.id);
  bool ok = true;
  std::string_view in_want = "any";
  std::string_view out_want = "any";
  switch (n.type) {
    case PatternType::kStart:
    case PatternType::kEnd:
      break;
    case PatternType::kFork:
    case PatternType::kCondition:
      ok = in == 1 && deg_out > 1;
      in_want = "1";
      out_want = ">1";
      break;
    case PatternType::kStructuralJoin:
      ok = in > 1 && deg_out == 1;
      in_want = ">1";
      out_want = "1";
      break;
    case PatternType::kMessageProcessor:
    case PatternType::kMerge:
      ok = in == 1 && deg_out == 1;
      in_want = "1";
      out_want = "1";
      break;
    case PatternType::kExternalCall:
      // The remote link stands in for the second outgoing edge.
      if (n.remote_link) ++deg_out;
      ok = in == 1 && deg_out == 2;
      in_want = "1";
      out_want = "2 (remote link counts)";
      break;
  }
  if (!ok) {
    out.push_back({std::string(violation::kCardinality), n.id,
                   std::string(to_string(n.type)) + " " +
                       expect_text(in, in_want, deg_out, out_want)});
  }
}

}  // namespace

ValidationReport validate_iptg(const Ipcg& g) {
  std::vector<Violation> v;
  const auto& nodes = g.nodes();
  auto has_type = [&](PatternType t) {
    return std::any_of(nodes.begin(), nodes.end(),
                       [&](const PatternNode& n) { return n.type == t; });
  };
  if (!has_type(PatternType::kStart)) {
    v.push_back({std::string(violation::kMissingStart), "", "no start pattern"});
  }
  if (!has_type(PatternType::kEnd)) {
    v.push_back({std::string(violation::kMissingEnd), "", "no end pattern"});
  }
  for (const auto& n : nodes) check_cardinality(g, n, v);

  if (!nodes.empty()) {
    const std::size_t n = nodes.size();
    std::vector<std::vector<std::size_t>> adj(n), undirected(n);
    std::vector<std::size_t> indeg(n, 0);
    for (const auto& [from, to] : g.edges()) {
      std::size_t a = *g.index_of(from);
      std::size_t b = *g.index_of(to);
      adj[a].push_back(b);
      undirected[a].push_back(b);
      undirected[b].push_back(a);
      ++indeg[b];
    }

    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack = {0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      std::size_t cur = stack.back();
      stack.pop_back();
      for (std::size_t nb : undirected[cur]) {
        if (!seen[nb]) {
          seen[nb] = true;
          ++reached;
          stack.push_back(nb);
        }
      }
    }
    if (reached != n) {
      std::string unreached;
      for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) {
          if (!unreached.empty()) unreached += ", ";
          unreached += nodes[i].id;
        }
      }
      v.push_back({std::string(violation::kDisconnected), "",
                   "not connected to " + nodes[0].id + ": " + unreached});
    }

    // Kahn's algorithm; whatever is left over lies on or behind a cycle.
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i) {
      if (indeg[i] == 0) queue.push_back(i);
    }
    std::size_t removed = 0;
    while (!queue.empty()) {
      std::size_t cur = queue.back();
      queue.pop_back();
      ++removed;
      for (std::size_t nb : adj[cur]) {
        if (--indeg[nb] == 0) queue.push_back(nb);
      }
    }
    if (removed != n) {
      std::string members;
      std::string first;
      for (std::size_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) continue;
        if (first.empty() || nodes[i].id < first) first = nodes[i].id;
        if (!members.empty()) members += ", ";
        members += nodes[i].id;
      }
      v.push_back({std::string(violation::kCycle), first,
                   "on or behind a cycle: " + members});
    }
  }

  sort_violations(v);
  return ValidationReport{std::move(v)};
}

bool match_contracts(const Contract& required,
                     std::span<const Contract> predecessors) {
  for (Concept c : kAllConcepts) {
    ConceptValue want = required.concept_value(c);
    if (want == ConceptValue::kAny) continue;
    for (const auto& p : predecessors) {
      ConceptValue got = p.concept_value(c);
      if (got != want && got != ConceptValue::kAny) return false;
    }
  }
  for (const auto& [key, want] : required.elements) {
    if (want.any) continue;
    std::set<std::string> produced;
    bool wildcard = false;
    for (const auto& p : predecessors) {
      auto it = p.elements.find(key);
      if (it == p.elements.end()) continue;
      if (it->second.any) {
        wildcard = true;
        break;
      }
      produced.insert(it->second.ids.begin(), it->second.ids.end());
    }
    if (wildcard) continue;
    if (produced != want.ids) return false;
  }
  return true;
}

ValidationReport validate_ipcg(const Ipcg& g) {
  ValidationReport report = validate_iptg(g);
  auto& v = report.violations;
  for (const auto& n : g.nodes()) {
    const std::size_t in = g.in_degree(n.id);
    const std::size_t out = g.out_degree(n.id);
    if (n.in_contracts.size() != in || n.out_contracts.size() != out) {
      v.push_back({std::string(violation::kContractArity), n.id,
                   "contracts in=" + std::to_string(n.in_contracts.size()) +
                       " out=" + std::to_string(n.out_contracts.size()) +
                       " for degree in=" + std::to_string(in) +
                       " out=" + std::to_string(out)});
    }
  }
  for (const auto& n : g.nodes()) {
    if (n.type == PatternType::kStart) continue;
    std::vector<std::string> failing;
    bool arity_ok = true;
    for (const auto& pred : g.predecessors(n.id)) {
      const Contract* want = g.in_contract_on(pred, n.id);
      const Contract* have = g.out_contract_on(pred, n.id);
      if (want == nullptr || have == nullptr) {
        arity_ok = false;
        break;
      }
      if (!match_contracts(*want, std::span<const Contract>(have, 1))) {
        failing.push_back(pred);
      }
    }
    if (!arity_ok || failing.empty()) continue;
    std::string msg = "in-contract does not match output of ";
    for (std::size_t i = 0; i < failing.size(); ++i) {
      if (i) msg += ", ";
      msg += failing[i];
    }
    v.push_back({std::string(violation::kContractMismatch), n.id, msg});
  }
  sort_violations(v);
  return report;
}

double process_capacity(const Ipcg& g) {
  if (g.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "process capacity of a graph without patterns");
  }
  double sum = 0.0;
  for (const auto& n : g.nodes()) sum += n.chars.cap_mb;
  return sum;
}

bool process_shareable(const Ipcg& g) {
  return std::all_of(g.nodes().begin(), g.nodes().end(),
                     [](const PatternNode& n) { return n.chars.shareable; });
}

// ---------------------------------------------------------------------------
// Isomorphism

namespace {

bool same_label(const Ipcg& a, const PatternNode& x, const Ipcg& b,
                const PatternNode& y) {
  return x.type == y.type && x.chars == y.chars && x.kind == y.kind &&
         x.receiver == y.receiver &&
         x.in_contracts.size() == y.in_contracts.size() &&
         x.out_contracts.size() == y.out_contracts.size() &&
         a.in_degree(x.id) == b.in_degree(y.id) &&
         a.out_degree(x.id) == b.out_degree(y.id);
}

bool same_contract(const Contract* x, const Contract* y) {
  if (x == nullptr || y == nullptr) return x == y;
  return *x == *y;
}

class IsoSearch {
 public:
  IsoSearch(const Ipcg& a, const Ipcg& b) : a_(a), b_(b) {
    const std::size_t n = a.size();
    adj_a_.assign(n, std::vector<bool>(n, false));
    adj_b_.assign(n, std::vector<bool>(n, false));
    for (const auto& [f, t] : a.edges()) adj_a_[*a.index_of(f)][*a.index_of(t)] = true;
    for (const auto& [f, t] : b.edges()) adj_b_[*b.index_of(f)][*b.index_of(t)] = true;
    candidates_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (same_label(a, a.nodes()[i], b, b.nodes()[j])) candidates_[i].push_back(j);
      }
    }
    // Visit nodes in BFS order over the undirected graph so that each newly
    // mapped node is usually adjacent to an already mapped one.
    std::vector<bool> seen(n, false);
    for (std::size_t root = 0; root < n; ++root) {
      if (seen[root]) continue;
      seen[root] = true;
      std::size_t head = order_.size();
      order_.push_back(root);
      while (head < order_.size()) {
        std::size_t cur = order_[head++];
        for (std::size_t k = 0; k < n; ++k) {
          if (!seen[k] && (adj_a_[cur][k] || adj_a_[k][cur])) {
            seen[k] = true;
            order_.push_back(k);
          }
        }
      }
    }
  }

  bool run() {
    for (const auto& c : candidates_) {
      if (c.empty()) return false;
    }
    map_.assign(a_.size(), kUnmapped);
    used_.assign(a_.size(), false);
    return extend(0);
  }

 private:
  static constexpr std::size_t kUnmapped = static_cast<std::size_t>(-1);

  bool consistent(std::size_t i, std::size_t j) const {
    const auto& an = a_.nodes();
    const auto& bn = b_.nodes();
    for (std::size_t k = 0; k < a_.size(); ++k) {
      std::size_t m = map_[k];
      if (m == kUnmapped) continue;
      if (adj_a_[i][k] != adj_b_[j][m] || adj_a_[k][i] != adj_b_[m][j]) return false;
      if (adj_a_[i][k]) {
        if (!same_contract(a_.out_contract_on(an[i].id, an[k].id),
                           b_.out_contract_on(bn[j].id, bn[m].id)) ||
            !same_contract(a_.in_contract_on(an[i].id, an[k].id),
                           b_.in_contract_on(bn[j].id, bn[m].id))) {
          return false;
        }
      }
      if (adj_a_[k][i]) {
        if (!same_contract(a_.out_contract_on(an[k].id, an[i].id),
                           b_.out_contract_on(bn[m].id, bn[j].id)) ||
            !same_contract(a_.in_contract_on(an[k].id, an[i].id),
                           b_.in_contract_on(bn[m].id, bn[j].id))) {
          return false;
        }
      }
    }
    return true;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) return true;
    std::size_t i = order_[depth];
    for (std::size_t j : candidates_[i]) {
      if (used_[j] || !consistent(i, j)) continue;
      map_[i] = j;
      used_[j] = true;
      if (extend(depth + 1)) return true;
      map_[i] = kUnmapped;
      used_[j] = false;
    }
    return false;
  }

  const Ipcg& a_;
  const Ipcg& b_;
  std::vector<std::vector<bool>> adj_a_;
  std::vector<std::vector<bool>> adj_b_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> map_;
  std::vector<bool> used_;
};

}  // namespace

bool isomorphic(const Ipcg& a, const Ipcg& b) {
  if (a.size() != b.size() || a.edges().size() != b.edges().size()) return false;
  if (a.empty()) return true;
  return IsoSearch(a, b).run();
}

// ---------------------------------------------------------------------------
// Data-element usage

std::map<std::string, std::set<std::string>> analyze_unused_elements(
    const Ipcg& g) {
  std::map<std::string, std::set<std::string>> result;
  for (const auto& n : g.nodes()) {
    std::set<std::string> emitted;
    for (const auto& c : n.out_contracts) {
      for (const auto& [key, set] : c.elements) {
        if (!set.any) emitted.insert(set.ids.begin(), set.ids.end());
      }
    }
    auto& unused = result[n.id];
    if (emitted.empty()) continue;

    std::set<std::string> consumed;
    bool consumes_all = false;
    std::set<std::string> visited;
    std::vector<std::string> stack = g.successors(n.id);
    while (!stack.empty() && !consumes_all) {
      std::string cur = stack.back();
      stack.pop_back();
      if (!visited.insert(cur).second) continue;
      const auto& node = g.node(cur);
      if (node.chars.program) {
        consumes_all = true;
        break;
      }
      for (const auto& c : node.in_contracts) {
        for (const auto& [key, set] : c.elements) {
          if (!set.any) consumed.insert(set.ids.begin(), set.ids.end());
        }
      }
      for (auto& s : g.successors(cur)) stack.push_back(std::move(s));
    }
    if (consumes_all) continue;
    for (const auto& id : emitted) {
      if (!consumed.count(id)) unused.insert(id);
    }
  }
  return result;
}

}  // namespace cepp

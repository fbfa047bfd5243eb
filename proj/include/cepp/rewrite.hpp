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

// Graph rewriting over IPCGs: decomposition into shareable and non-shareable
// parts, and the two simplification rules used by the modeling loop.

#ifndef CEPP_REWRITE_HPP
#define CEPP_REWRITE_HPP

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cepp/ipcg.hpp"
#include "cepp/money.hpp"

namespace cepp {

enum class RuleId {
  kShToNonsh,
  kNonshToSh,
  kCombineNeighbors,
  kRouterToRoutingSlip,
};

inline constexpr std::array<RuleId, 4> kAllRules = {
    RuleId::kShToNonsh, RuleId::kNonshToSh, RuleId::kCombineNeighbors,
    RuleId::kRouterToRoutingSlip};

std::string_view to_string(RuleId rule);
std::optional<RuleId> parse_rule_id(std::string_view text);

/// Capacity given to every node that decomposition inserts.
inline constexpr double kPlumbingCapacityMb = 64.0;

/// Element id of the header the routing-slip enricher adds.
inline constexpr std::string_view kRoutingSlipHeader = "routing_slip";

/// Role names per rule:
///   SH_TO_NONSH            p1 (shareable source), entry, cloud
///   NONSH_TO_SH            p1 (shareable target), exit, cloud
///   COMBINE_NEIGHBORS      run (in sequence order)
///   ROUTER_TO_ROUTING_SLIP router, calls, ends, join (optional)
struct Match {
  RuleId rule = RuleId::kShToNonsh;
  std::map<std::string, std::vector<std::string>> bindings;

  const std::vector<std::string>& role(const std::string& name) const;
  std::string smallest_id() const;

  friend bool operator==(const Match&, const Match&) = default;
};

struct RemoteLink {
  std::string caller_node;
  std::string callee_graph;
  std::string receiver_node;

  friend bool operator==(const RemoteLink&, const RemoteLink&) = default;
};

struct RewriteStats {
  std::size_t nodes_removed = 0;
  std::size_t nodes_added = 0;
  double capacity_removed_mb = 0.0;
  double capacity_added_mb = 0.0;

  /// Net reduction in pattern count (negative when a rewrite grows the
  /// process, as decomposition does).
  long net_nodes_removed() const {
    return static_cast<long>(nodes_removed) - static_cast<long>(nodes_added);
  }
  RewriteStats& operator+=(const RewriteStats& o);
};

struct RewriteResult {
  std::vector<Ipcg> graphs;
  std::vector<RemoteLink> remote_links;
  RewriteStats stats;
};

/// All matches of `rule` in `g`, ordered by smallest bound node id and then
/// by bindings.
std::vector<Match> find_matches(RuleId rule, const Ipcg& g);

/// Throws Error(kMatchStale) if `m` is not a current match of `g`, and
/// Error(kPostConditionViolated) if a produced graph fails validate_ipcg.
RewriteResult apply_rule(const Match& m, const Ipcg& g);

/// Both decomposition rules to fixpoint. A graph without crossing edges is
/// returned unchanged as the single result graph.
RewriteResult decompose(const Ipcg& g);

/// Independent check of a rewrite: validity of every graph, intact remote
/// links, preserved tenant and consistent capacity bookkeeping.
bool verify_rewrite(const Ipcg& before, const RewriteResult& after);

/// Prices a set of graphs that together replace one process.
using Pricer = std::function<Cents(const std::vector<Ipcg>&)>;

struct Proposal {
  std::string id;
  /// Empty for the decomposition bundle.
  std::optional<RuleId> rule;
  Match match;
  Cents cost_before = 0;
  Cents cost_after = 0;
  long nodes_removed = 0;
  std::string description;
  RewriteResult preview;

  std::string rule_label() const;
  Cents savings() const { return cost_before - cost_after; }
};

/// One proposal per applicable simplification match plus the decomposition
/// bundle, keeping only those that do not raise the cost. Sorted by
/// savings, then fewer nodes removed, then rule order. Pricer failures are
/// reported as Error(kPricingUnavailable).
std::vector<Proposal> enumerate_proposals(const Ipcg& g, const Pricer& pricer);

struct ImproveResult {
  Ipcg graph;
  std::vector<Proposal> applied;
};

/// COMBINE_NEIGHBORS, then ROUTER_TO_ROUTING_SLIP, repeatedly until no match
/// is left. With a pricer the applied proposals carry costs.
ImproveResult improve(const Ipcg& g, const Pricer& pricer = nullptr);

}  // namespace cepp

#endif  // CEPP_REWRITE_HPP

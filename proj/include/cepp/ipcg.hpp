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

// Integration pattern contract graphs: typed, contract-annotated process
// graphs together with their structural correctness checks.

#ifndef CEPP_IPCG_HPP
#define CEPP_IPCG_HPP

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cepp {

enum class PatternType {
  kStart,
  kEnd,
  kMessageProcessor,
  kFork,
  kStructuralJoin,
  kCondition,
  kMerge,
  kExternalCall,
};

std::string_view to_string(PatternType type);
std::optional<PatternType> parse_pattern_type(std::string_view text);

enum class Access { kReadOnly, kReadWrite };

struct Characteristics {
  int mc_in = 1;
  int mc_out = 1;
  Access access = Access::kReadOnly;
  bool message_generating = false;
  std::vector<std::string> conditions;
  std::optional<std::string> program;
  double cap_mb = 64.0;
  bool shareable = true;

  friend bool operator==(const Characteristics&,
                         const Characteristics&) = default;
};

enum class Concept : std::size_t { kSigned = 0, kEncrypted = 1, kEncoded = 2 };
enum class ConceptValue { kYes, kNo, kAny };
enum class ElementKey { kHeader, kPayload, kAttachment };

inline constexpr std::array<Concept, 3> kAllConcepts = {
    Concept::kSigned, Concept::kEncrypted, Concept::kEncoded};
inline constexpr std::array<ElementKey, 3> kAllElementKeys = {
    ElementKey::kHeader, ElementKey::kPayload, ElementKey::kAttachment};

std::string_view to_string(ConceptValue value);
std::string_view to_string(ElementKey key);

/// Data elements a contract names for one message part. `any` marks a
/// pass-through position that neither constrains nor describes the part.
struct ElementSet {
  bool any = false;
  std::set<std::string> ids;

  static ElementSet wildcard() { return ElementSet{true, {}}; }
  static ElementSet of(std::set<std::string> ids) {
    return ElementSet{false, std::move(ids)};
  }

  friend bool operator==(const ElementSet&, const ElementSet&) = default;
};

struct Contract {
  std::array<ConceptValue, 3> concepts = {ConceptValue::kAny, ConceptValue::kAny,
                                          ConceptValue::kAny};
  /// Keys absent from the map are unconstrained.
  std::map<ElementKey, ElementSet> elements;

  ConceptValue concept_value(Concept c) const {
    return concepts[static_cast<std::size_t>(c)];
  }
  void set_concept(Concept c, ConceptValue v) {
    concepts[static_cast<std::size_t>(c)] = v;
  }

  /// Contract of the pass-through plumbing patterns: every concept and every
  /// message part is `any`.
  static Contract pass_through();

  friend bool operator==(const Contract&, const Contract&) = default;
};

struct PatternNode {
  std::string id;
  std::string name;
  PatternType type = PatternType::kMessageProcessor;
  Characteristics chars;
  std::vector<Contract> in_contracts;
  std::vector<Contract> out_contracts;
  std::optional<std::string> remote_link;
  /// Pattern kind within its type, e.g. "content-enricher".
  std::string kind;
  /// Receiver-system tag of external calls.
  std::string receiver;
};

/// Kinds assigned to the nodes that decomposition inserts.
inline constexpr std::string_view kRemoteCallKind = "remote-call";
inline constexpr std::string_view kRemoteCallEndKind = "remote-call-end";
inline constexpr std::string_view kEventReceiverKind = "event-receiver";

bool is_plumbing(const PatternNode& node);

using Edge = std::pair<std::string, std::string>;

/// A process graph. Construction enforces referential integrity (unique node
/// ids, edges between existing nodes, no self-loops or duplicate edges);
/// connectivity, acyclicity and contracts are checked by the validators.
///
/// The position of an edge among a node's outgoing (incoming) edges, in
/// `edges()` order, selects the matching entry of `out_contracts`
/// (`in_contracts`).
class Ipcg {
 public:
  Ipcg() = default;
  Ipcg(std::string id, std::string tenant, std::vector<PatternNode> nodes,
       std::vector<Edge> edges);

  const std::string& id() const { return id_; }
  const std::string& tenant() const { return tenant_; }
  const std::vector<PatternNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }

  bool contains(std::string_view node_id) const;
  const PatternNode& node(std::string_view node_id) const;
  std::optional<std::size_t> index_of(std::string_view node_id) const;

  /// Successor / predecessor ids in edge order.
  std::vector<std::string> successors(std::string_view node_id) const;
  std::vector<std::string> predecessors(std::string_view node_id) const;
  std::size_t in_degree(std::string_view node_id) const;
  std::size_t out_degree(std::string_view node_id) const;

  /// Position of edge `from -> to` among `from`'s outgoing and `to`'s
  /// incoming edges.
  std::optional<std::size_t> out_position(std::string_view from,
                                          std::string_view to) const;
  std::optional<std::size_t> in_position(std::string_view from,
                                         std::string_view to) const;

  /// Contracts attached to one edge, if the node lists are long enough.
  const Contract* out_contract_on(std::string_view from,
                                  std::string_view to) const;
  const Contract* in_contract_on(std::string_view from,
                                 std::string_view to) const;

  void set_id(std::string id) { id_ = std::move(id); }
  void set_tenant(std::string tenant) { tenant_ = std::move(tenant); }

 private:
  void reindex();

  std::string id_;
  std::string tenant_;
  std::vector<PatternNode> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Violation {
  std::string code;
  /// Node id, or "from->to" for edge-level findings; empty for graph-level.
  std::string ref;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool is_correct() const { return violations.empty(); }
  bool has(std::string_view code) const;
  std::size_t count(std::string_view code) const;
};

namespace violation {
inline constexpr std::string_view kMissingStart = "MISSING_START";
inline constexpr std::string_view kMissingEnd = "MISSING_END";
inline constexpr std::string_view kCardinality = "CARDINALITY";
inline constexpr std::string_view kDisconnected = "DISCONNECTED";
inline constexpr std::string_view kCycle = "CYCLE";
inline constexpr std::string_view kContractArity = "CONTRACT_ARITY";
inline constexpr std::string_view kContractMismatch = "CONTRACT_MISMATCH";
}  // namespace violation

/// Structural (typed-graph) correctness: start/end presence, per-type
/// cardinalities, connectivity and acyclicity.
ValidationReport validate_iptg(const Ipcg& g);

/// Whether `required` accepts messages described by `predecessors`.
bool match_contracts(const Contract& required,
                     std::span<const Contract> predecessors);

/// validate_iptg plus contract arity and per-edge contract matching.
ValidationReport validate_ipcg(const Ipcg& g);

/// Sum of pattern capacities. Throws Error(kInvalidArgument) on a graph
/// without nodes.
double process_capacity(const Ipcg& g);

bool process_shareable(const Ipcg& g);

/// Pattern-level isomorphism preserving edges, types, characteristics, kinds
/// and contracts. Node ids and names are not compared.
bool isomorphic(const Ipcg& a, const Ipcg& b);

/// Per node, the concrete out-contract data elements that no reachable
/// successor requires.
std::map<std::string, std::set<std::string>> analyze_unused_elements(
    const Ipcg& g);

}  // namespace cepp

#endif  // CEPP_IPCG_HPP

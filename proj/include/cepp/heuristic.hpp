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

// Placement heuristic: first-fit-decreasing over variable-size bins with
// per-tenant sub-problems, followed by hill climbing over move, swap and
// shrink transformations.

#ifndef CEPP_HEURISTIC_HPP
#define CEPP_HEURISTIC_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cepp/model.hpp"

namespace cepp {

/// splitmix64. Deterministic and platform independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [0, 1).
  double unit();

 private:
  std::uint64_t state_;
};

/// Positive-capacity variants, cheapest per MB first; ties by smaller
/// capacity, then id. Throws Error(kEmptyCatalog) if there are none.
std::vector<ContainerVariant> efficiency_order(const std::vector<ContainerVariant>& variants);

/// Drops every variant that another one beats on capacity and cost. Exact
/// duplicates keep the first by id. The zero variant is always kept.
std::vector<ContainerVariant> prune_dominated_variants(
    const std::vector<ContainerVariant>& variants);

/// Indices into `variants` of the pruned set in ascending capacity, with
/// the zero variant first. After this order capacity is strictly
/// increasing and cost strictly increasing.
std::vector<std::size_t> normalized_variant_order(const std::vector<ContainerVariant>& variants);

/// Copy of `inst` whose variants are normalized. `original` receives, per
/// normalized variant, its index in inst.variants.
ProblemInstance normalized_instance(const ProblemInstance& inst,
                                    std::vector<std::size_t>* original = nullptr);

enum class Transformation { kMove, kSwap, kShrink };

std::string_view to_string(Transformation t);
std::optional<Transformation> parse_transformation(std::string_view text);

struct SearchContainer {
  int variant = 0;
  bool shareable = true;
  /// Tenant index for tenant-exclusive containers, -1 otherwise.
  int tenant = -1;
  std::int64_t load_mb = 0;
  std::size_t count = 0;
};

/// A proposed change. Capacity is not checked when proposing.
struct Candidate {
  Transformation kind = Transformation::kMove;
  bool noop = true;
  std::size_t item = 0;
  std::size_t other_item = 0;
  std::size_t container = 0;
  std::size_t target = 0;
  int new_variant = 0;
};

/// Search representation over an instance with normalized variants
/// (index 0 is the zero variant, capacities ascending). Every container is
/// either shareable or exclusive to one tenant for its whole life.
class SearchState {
 public:
  explicit SearchState(const ProblemInstance& normalized);

  const ProblemInstance& instance() const { return *inst_; }
  const std::vector<SearchContainer>& containers() const { return containers_; }
  const std::vector<std::size_t>& shareable_containers() const { return shareable_; }
  const std::vector<std::size_t>& tenant_containers(int tenant) const;
  int tenant_index(const std::string& tenant) const;
  std::size_t tenant_count() const { return tenant_names_.size(); }
  std::size_t container_of(std::size_t item) const { return item_container_[item]; }
  bool placed(std::size_t item) const { return item_container_[item] != kNone; }
  Cents cost() const { return cost_; }
  std::int64_t capacity_of(std::size_t container) const;

  std::size_t open_container(int variant, bool shareable, int tenant);
  /// Initial placement of an unplaced item.
  void place(std::size_t item, std::size_t container);

  Candidate propose(Transformation kind, Rng& rng) const;
  Candidate propose_move(Rng& rng) const;
  Candidate propose_swap(Rng& rng) const;
  Candidate propose_shrink(Rng& rng) const;
  /// Capacity, item-limit and sharing constraints after the change.
  bool feasible(const Candidate& c) const;
  Cents cost_after(const Candidate& c) const;
  void apply(const Candidate& c);

  /// Placement with one container per search container, padded with zero
  /// variant containers up to `containers` entries. Variant indices refer
  /// to the normalized instance.
  Placement to_placement(std::size_t containers = 0) const;

  /// Recomputes cost and loads from scratch and compares with the caches.
  bool caches_consistent() const;

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

 private:
  int group_of(std::size_t container) const;
  void group_insert(int group, std::size_t item);
  void group_erase(int group, std::size_t item);

  const ProblemInstance* inst_;
  std::vector<int> item_tenant_;
  std::vector<std::string> tenant_names_;
  std::unordered_map<std::string, int> tenant_ids_;

  std::vector<SearchContainer> containers_;
  std::vector<std::size_t> item_container_;
  std::vector<std::size_t> shareable_;
  std::vector<std::vector<std::size_t>> tenant_exclusive_;
  // Position of each container inside shareable_ or its tenant list.
  std::vector<std::size_t> container_slot_;

  // Items per swap group: group 0 holds items in shareable containers,
  // group 1 + t items in containers exclusive to tenant t.
  std::vector<std::vector<std::size_t>> group_items_;
  std::vector<std::size_t> item_slot_;
  Cents cost_ = 0;
};

/// FFD over the normalized instance: one sub-problem per tenant for its
/// non-shareable items plus one for all shareable items. Throws
/// Error(kItemTooLarge) if an item exceeds every variant.
SearchState ffd_initial(const ProblemInstance& normalized);

/// Copy-returning wrappers over propose + apply. No feasibility check.
SearchState transform_move(const SearchState& s, Rng& rng);
SearchState transform_swap(const SearchState& s, Rng& rng);
SearchState transform_shrink(const SearchState& s, Rng& rng);

struct SearchConfig {
  std::uint64_t max_transformations = 10000;
  std::uint64_t rng_seed = 1;
  std::vector<Transformation> cycle = {Transformation::kMove, Transformation::kSwap,
                                       Transformation::kShrink};
  /// Re-checks caches and feasibility after every accepted step and throws
  /// std::logic_error on a mismatch.
  bool verify_each_step = false;
  std::function<void(const SearchState&, Transformation)> on_accept;
};

struct SearchStats {
  std::uint64_t attempted = 0;
  std::uint64_t noops = 0;
  std::uint64_t accepted = 0;
  Cents initial_cost = 0;
};

struct SearchResult {
  /// Variant indices refer to the caller's instance.
  Placement placement;
  Cents cost = 0;
  SearchStats stats;
};

/// Hill climbing from the FFD solution. Accepts feasible candidates that do
/// not raise the cost. Every attempt, no-ops included, counts towards
/// max_transformations. Throws Error(kInfeasible) if FFD needs more than
/// inst.max_containers containers.
SearchResult local_search(const ProblemInstance& inst, const SearchConfig& cfg = {});

}  // namespace cepp

#endif  // CEPP_HEURISTIC_HPP

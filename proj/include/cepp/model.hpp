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

// The placement problem: processes with capacity, tenant and shareability
// go into containers, each container is assigned one vendor variant, and
// the bill is the sum of the variant prices.

#ifndef CEPP_MODEL_HPP
#define CEPP_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cepp/ipcg.hpp"
#include "cepp/ipcg_json.hpp"
#include "cepp/money.hpp"

namespace cepp {

struct ContainerVariant {
  std::string id;
  std::string vendor;
  std::int64_t cap_mb = 0;
  Cents cost = 0;
  /// Parsed and kept, never used for placement.
  std::optional<double> cpu;

  bool is_zero() const { return cap_mb == 0 && cost == 0; }

  friend bool operator==(const ContainerVariant&, const ContainerVariant&) = default;
};

inline constexpr std::string_view kZeroVariantId = "zero";

ContainerVariant zero_variant();

struct PlacementItem {
  std::string id;
  std::int64_t cap_mb = 0;
  std::string tenant;
  bool shareable = true;
  std::optional<std::string> origin;

  friend bool operator==(const PlacementItem&, const PlacementItem&) = default;
};

struct ProblemInstance {
  std::vector<PlacementItem> items;
  std::vector<ContainerVariant> variants;
  /// C. Filled by make_instance when not given.
  std::size_t max_containers = 0;
  /// Q. Defaults to the item count.
  std::size_t max_items_per_container = 0;
};

/// Appends the zero variant if absent and resolves C and Q defaults. Throws
/// Error(kInvalidArgument) for non-positive item capacities, negative
/// variants, or a second zero variant.
ProblemInstance make_instance(std::vector<PlacementItem> items,
                              std::vector<ContainerVariant> variants,
                              std::optional<std::size_t> max_containers = std::nullopt,
                              std::optional<std::size_t> max_items = std::nullopt);

/// Index of the zero variant in `variants`, if present.
std::optional<std::size_t> zero_variant_index(const std::vector<ContainerVariant>& variants);

bool conflicts(const PlacementItem& a, const PlacementItem& b);

/// x as item -> container and y as container -> variant; -1 marks a missing
/// assignment. container_variant has one entry per container 0..C-1.
struct Placement {
  std::vector<int> item_container;
  std::vector<int> container_variant;

  friend bool operator==(const Placement&, const Placement&) = default;
};

namespace placement_violation {
inline constexpr std::string_view kUnplacedItem = "UNPLACED_ITEM";
inline constexpr std::string_view kInvalidContainer = "INVALID_CONTAINER";
inline constexpr std::string_view kMissingVariant = "MISSING_VARIANT";
inline constexpr std::string_view kCapacityExceeded = "CAPACITY_EXCEEDED";
inline constexpr std::string_view kTenantConflict = "TENANT_CONFLICT";
inline constexpr std::string_view kItemLimitExceeded = "ITEM_LIMIT_EXCEEDED";
}  // namespace placement_violation

ValidationReport check_feasible(const Placement& p, const ProblemInstance& inst);

/// Sum of the assigned variants' costs; unassigned containers count as zero.
Cents total_cost(const Placement& p, const ProblemInstance& inst);

/// Containers used by FFD on the instance plus one.
std::size_t default_container_bound(const ProblemInstance& inst);

struct PricedPlacement {
  Placement placement;
  Cents cost = 0;
};

/// Traditional hosting: every tenant gets its own container(s), sized with
/// the cheapest variant that fits, with no co-location across tenants.
PricedPlacement hosting_baseline(const ProblemInstance& inst);

/// CPLEX LP text of the linearized model.
std::string export_lp(const ProblemInstance& inst);

struct LpStats {
  std::size_t binaries = 0;
  std::size_t constraints = 0;
};
LpStats lp_stats(const ProblemInstance& inst);

Json item_to_json(const PlacementItem& it);
PlacementItem item_from_json(const Json& j, const std::string& where);
Json variant_to_json(const ContainerVariant& v);
/// Capacities are floored to whole MB, costs rounded to cents.
ContainerVariant variant_from_json(const Json& j, const std::string& where);

Json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const Json& j);

/// Canonical placement document: containers that hold items, numbered in
/// order of their first item, with totals. Contains no timing data.
Json placement_to_json(const Placement& p, const ProblemInstance& inst);

}  // namespace cepp

#endif  // CEPP_MODEL_HPP

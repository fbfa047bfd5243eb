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


// Workloads: the processes to place, given either as graphs or as
// pre-flattened items, plus a seeded generator and region scoping.

#ifndef CEPP_WORKLOAD_HPP
#define CEPP_WORKLOAD_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cepp/catalog.hpp"
#include "cepp/ipcg.hpp"
#include "cepp/model.hpp"

namespace cepp {

using WorkloadEntry = std::variant<PlacementItem, Ipcg>;

struct Workload {
  std::optional<std::string> region;
  std::vector<WorkloadEntry> entries;

  std::set<std::string> tenants() const;
  std::size_t size() const { return entries.size(); }
};

const std::string& entry_tenant(const WorkloadEntry& e);

Workload workload_from_json(const Json& j);
Json workload_to_json(const Workload& w);
Workload load_workload(const std::filesystem::path& path);

struct GeneratorSpec {
  std::size_t tenant_count = 1;
  /// Processes per tenant drawn uniformly from [min, max].
  std::size_t processes_min = 1;
  std::size_t processes_max = 1;
  /// Overrides the range with an explicit count per tenant.
  std::vector<std::size_t> processes_per_tenant;
  double cap_mean_mb = 640;
  double cap_spread_mb = 0;
  /// Used in order instead of drawing, cycling if shorter than the
  /// workload; values are multiplied by cap_unit_mb.
  std::vector<std::int64_t> fixed_caps;
  std::int64_t cap_unit_mb = 1;
  double non_shareable_ratio = 0;
  std::uint64_t seed = 1;
  std::optional<std::string> region;
};

/// Throws Error(kInvalidArgument) if the ratio is outside [0, 1].
GeneratorSpec generator_spec_from_json(const Json& j);
Json generator_spec_to_json(const GeneratorSpec& spec);

/// Tenants are "t1".."tN", item ids "t<k>.p<m>". Capacities are whole MB
/// and at least 64. Each item is shareable with probability
/// 1 - non_shareable_ratio.
Workload generate(const GeneratorSpec& spec);

using RegionMap = std::map<std::string, std::string>;

RegionMap region_map_from_json(const Json& j);

/// One workload per region, in region name order. Throws
/// Error(kUnassignedTenant) if a tenant has no region.
std::map<std::string, Workload> partition_by_region(const Workload& w, const RegionMap& assignment);

/// One item per entry. Graphs must be valid; their item id is the graph id
/// (or "process<k>" when empty).
PlacementItem flatten_graph(const Ipcg& g, std::size_t index = 0);

/// Items of `w` against the normalized catalog with the default container
/// bound. Capacities are scaled by the catalog's item unit. Throws Error(kInvalidArgument) listing the violations of the first
/// invalid graph.
ProblemInstance flatten(const Workload& w, const Catalog& catalog);

struct WorkloadCut {
  Workload workload;
  std::size_t cut_graphs = 0;
  std::size_t cut_edges = 0;
};

/// Replaces every graph entry by its decomposition.
WorkloadCut decompose_workload(const Workload& w);

/// Every "<name>.workload.json" in `dir`, keyed by its region label or, if
/// absent, by <name>.
std::map<std::string, Workload> load_workload_dir(const std::filesystem::path& dir);

}  // namespace cepp

#endif  // CEPP_WORKLOAD_HPP

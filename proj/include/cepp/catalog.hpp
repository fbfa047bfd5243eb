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


// Container-variant catalogs as loaded from disk.

#ifndef CEPP_CATALOG_HPP
#define CEPP_CATALOG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cepp/model.hpp"

namespace cepp {

inline constexpr std::string_view kCurrency = "EUR/mo";

struct Catalog {
  std::string source;
  /// Holds exactly one zero variant after loading.
  std::vector<ContainerVariant> variants;
  /// MB per capacity unit of the items priced against this catalog. 1 for
  /// catalogs whose workloads state capacities in MB.
  std::int64_t item_unit_mb = 1;
};

/// Throws Error(kParseError) for schema errors and Error(kDuplicateVariantId).
Catalog catalog_from_json(const Json& j, const std::string& where = "catalog");
Json catalog_to_json(const Catalog& c);
Catalog load_catalog(const std::filesystem::path& path);

/// Dominated variants pruned, capacity ascending, zero variant first.
Catalog normalize(const Catalog& c);

/// Every "<name>.catalog.json" in `dir`, keyed by <name>. A missing
/// directory yields an empty map.
std::map<std::string, Catalog> load_catalog_dir(const std::filesystem::path& dir);

}  // namespace cepp

#endif  // CEPP_CATALOG_HPP

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


// Loaders for the bundled data fixtures.

#ifndef CEPP_TESTS_FIXTURES_HPP
#define CEPP_TESTS_FIXTURES_HPP

#include <string>

#include "cepp/catalog.hpp"
#include "cepp/model.hpp"
#include "cepp/workload.hpp"
#include "support/gen.hpp"

namespace cepp::testing {

inline Catalog example1_catalog() { return load_catalog(data_path("catalogs/example1.catalog.json")); }

inline ProblemInstance example1_instance() {
  return flatten(load_workload(data_path("workloads/example1.workload.json")), example1_catalog());
}

inline int find_item(const ProblemInstance& inst, const std::string& id) {
  for (std::size_t i = 0; i < inst.items.size(); ++i) {
    if (inst.items[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

inline int find_variant(const ProblemInstance& inst, const std::string& id) {
  for (std::size_t n = 0; n < inst.variants.size(); ++n) {
    if (inst.variants[n].id == id) return static_cast<int>(n);
  }
  return -1;
}

/// The known optimum of the Example 1 fixture: the shareable processes on
/// the 3200 MB variant, t1's non-shareable ones on the 6400 MB variant.
inline Placement example1_optimum(const ProblemInstance& inst) {
  Placement p;
  p.item_container.assign(inst.items.size(), -1);
  for (const char* id : {"t1.p1", "t2.p1", "t3.p1"}) p.item_container[find_item(inst, id)] = 0;
  for (const char* id : {"t1.p2", "t1.p3"}) p.item_container[find_item(inst, id)] = 1;
  p.container_variant.assign(inst.max_containers, find_variant(inst, "zero"));
  p.container_variant[0] = find_variant(inst, "n-3200");
  p.container_variant[1] = find_variant(inst, "aws-6400");
  return p;
}

}  // namespace cepp::testing

#endif  // CEPP_TESTS_FIXTURES_HPP

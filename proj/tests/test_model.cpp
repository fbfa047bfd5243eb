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


#include <sstream>

#include "cepp/error.hpp"
#include "cepp/exact.hpp"
#include "cepp/model.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace cepp;
using namespace cepp::testing;

namespace {

PlacementItem item(const std::string& id, std::int64_t cap, const std::string& tenant, bool sh) {
  return PlacementItem{id, cap, tenant, sh, std::nullopt};
}

// Objective value of the exported LP evaluated at the placement's y
// variables, in cents.
Cents lp_objective(const std::string& lp, const Placement& p) {
  auto start = lp.find("obj:");
  auto stop = lp.find("Subject To");
  REQUIRE(start != std::string::npos);
  std::istringstream in(lp.substr(start + 4, stop - start - 4));
  std::string tok;
  std::string coef;
  int sign = 1;
  Cents total = 0;
  while (in >> tok) {
    if (tok == "+" || tok == "-") {
      sign = tok == "-" ? -1 : 1;
      continue;
    }
    if (tok.rfind("y_", 0) == 0) {
      std::size_t n = 0;
      std::size_t j = 0;
      REQUIRE(std::sscanf(tok.c_str(), "y_%zu_%zu", &n, &j) == 2);
      if (p.container_variant[j] == static_cast<int>(n)) total += sign * cents_from_eur(std::stod(coef));
      coef.clear();
      sign = 1;
      continue;
    }
    coef = tok;
  }
  return total;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("conflicts") {
  CHECK(conflicts(item("a", 1, "t1", false), item("b", 1, "t2", true)));
  CHECK_FALSE(conflicts(item("a", 1, "t1", false), item("b", 1, "t1", false)));
  CHECK_FALSE(conflicts(item("a", 1, "t1", true), item("b", 1, "t3", true)));
}

TEST_CASE("make_instance appends the zero variant and resolves defaults") {
  ProblemInstance inst = make_instance({item("a", 64, "t1", true)},
                                       {ContainerVariant{"v", "A", 3200, 2000, std::nullopt}});
  REQUIRE(inst.variants.size() == 2);
  CHECK(zero_variant_index(inst.variants).has_value());
  CHECK(inst.max_containers == 2);
  CHECK(inst.max_items_per_container == 1);
  CHECK_THROWS_AS(make_instance({item("a", 0, "t1", true)}, {}), Error);
  CHECK_THROWS_AS(make_instance({}, {zero_variant(), zero_variant()}), Error);
}

TEST_CASE("default container bound") {
  CHECK(default_container_bound(example1_instance()) == 3);
  ContainerVariant v{"v", "A", 1000, 100, std::nullopt};
  CHECK(default_container_bound(make_instance({item("a", 64, "t1", true)}, {v})) == 2);
  std::vector<PlacementItem> lonely;
  for (int t = 0; t < 10; ++t) {
    lonely.push_back(item("i" + std::to_string(t), 64, "t" + std::to_string(t), false));
  }
  CHECK(default_container_bound(make_instance(lonely, {v})) == 11);
}

TEST_CASE("Example 1 optimum is feasible and costs 50.00") {
  ProblemInstance inst = example1_instance();
  Placement p = example1_optimum(inst);
  CHECK(check_feasible(p, inst).is_correct());
  CHECK(total_cost(p, inst) == 5000);
}

TEST_CASE("feasibility violations") {
  ProblemInstance inst = example1_instance();
  Placement p = example1_optimum(inst);

  SUBCASE("large group on the small variant") {
    p.container_variant[1] = find_variant(inst, "n-3200");
    auto r = check_feasible(p, inst);
    CHECK(r.count(placement_violation::kCapacityExceeded) == 1);
  }
  SUBCASE("foreign tenant next to a non-shareable process") {
    p.item_container[find_item(inst, "t2.p1")] = 1;
    CHECK(check_feasible(p, inst).has(placement_violation::kTenantConflict));
  }
  SUBCASE("unplaced item") {
    p.item_container[0] = -1;
    CHECK(check_feasible(p, inst).has(placement_violation::kUnplacedItem));
  }
  SUBCASE("missing variant") {
    p.container_variant[0] = -1;
    CHECK(check_feasible(p, inst).has(placement_violation::kMissingVariant));
  }
  SUBCASE("container outside the bound") {
    p.item_container[0] = 7;
    CHECK(check_feasible(p, inst).has(placement_violation::kInvalidContainer));
  }
  SUBCASE("item limit") {
    inst.max_items_per_container = 2;
    CHECK(check_feasible(p, inst).has(placement_violation::kItemLimitExceeded));
  }
}

TEST_CASE("empty placement costs nothing") {
  ProblemInstance inst = make_instance({}, {ContainerVariant{"v", "A", 100, 100, std::nullopt}});
  Placement p;
  p.container_variant.assign(inst.max_containers, *zero_variant_index(inst.variants));
  CHECK(total_cost(p, inst) == 0);
}

TEST_CASE("hosting baseline on Example 1") {
  ProblemInstance inst = example1_instance();
  PricedPlacement base = hosting_baseline(inst);
  CHECK(check_feasible(base.placement, inst).is_correct());
  CHECK(base.cost == total_cost(base.placement, inst));
  CHECK(base.cost >= 6000);
  CHECK(base.cost <= 9000);
}

TEST_CASE("LP export shape") {
  ProblemInstance inst = example1_instance();
  std::string lp = export_lp(inst);
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("Subject To") != std::string::npos);
  CHECK(lp.find("Binary") != std::string::npos);
  CHECK(lp.find("End") != std::string::npos);
  LpStats st = lp_stats(inst);
  const std::size_t c = inst.max_containers;
  CHECK(st.binaries == 5 * c + inst.variants.size() * c);
  CHECK(lp.find("x_4_" + std::to_string(c - 1)) != std::string::npos);
  CHECK(lp.find("y_" + std::to_string(inst.variants.size() - 1) + "_0") != std::string::npos);
}

TEST_CASE("LP export of a single item") {
  ContainerVariant v{"v", "A", 1000, 100, std::nullopt};
  ProblemInstance inst = make_instance({item("a", 64, "t1", true)}, {v}, 3);
  std::string lp = export_lp(inst);
  CHECK(lp.find(" c1_0: x_0_0 + x_0_1 + x_0_2 = 1\n") != std::string::npos);
  CHECK(lp.find("c4_") == std::string::npos);
}

TEST_CASE("LP export has one C4 row per conflicting pair and container") {
  ContainerVariant v{"v", "A", 1000, 100, std::nullopt};
  ProblemInstance inst =
      make_instance({item("a", 64, "t1", false), item("b", 64, "t2", true), item("c", 64, "t1", true)},
                    {v}, 2);
  std::string lp = export_lp(inst);
  std::size_t rows = 0;
  for (auto pos = lp.find(" c4_"); pos != std::string::npos; pos = lp.find(" c4_", pos + 1)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("LP objective over the exact assignment equals total cost") {
  Rng rng(99);
  for (int k = 0; k < 20; ++k) {
    ProblemInstance inst = random_instance(rng, InstanceShape{});
    ExactResult r = solve_exact(inst);
    CHECK(lp_objective(export_lp(inst), r.placement) == r.cost);
    CHECK(total_cost(r.placement, inst) == r.cost);
  }
  ProblemInstance e1 = example1_instance();
  CHECK(lp_objective(export_lp(e1), example1_optimum(e1)) == 5000);
}

TEST_CASE("instance JSON round trip") {
  ProblemInstance inst = example1_instance();
  ProblemInstance back = instance_from_json(instance_to_json(inst));
  CHECK(back.items == inst.items);
  CHECK(back.variants == inst.variants);
  CHECK(back.max_containers == inst.max_containers);
  CHECK(back.max_items_per_container == inst.max_items_per_container);
  CHECK(instance_to_json(back).dump() == instance_to_json(inst).dump());
}

TEST_CASE("variant JSON rounds money to cents") {
  Json j = {{"id", "v"}, {"vendor", "A"}, {"cap_mb", 1024.9}, {"cost_eur_mo", 7.974}};
  ContainerVariant v = variant_from_json(j, "v");
  CHECK(v.cap_mb == 1024);
  CHECK(v.cost == 797);
}

TEST_CASE("placement JSON lists used containers in item order") {
  ProblemInstance inst = example1_instance();
  Json j = placement_to_json(example1_optimum(inst), inst);
  CHECK(j["cost_cents"] == 5000);
  REQUIRE(j["containers"].size() == 2);
  CHECK(j["containers"][0]["variant"] == "n-3200");
  CHECK(j["containers"][1]["variant"] == "aws-6400");
}

}  // TEST_SUITE

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


#include <chrono>
#include <cmath>

#include "cepp/error.hpp"
#include "cepp/exact.hpp"
#include "cepp/heuristic.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

using namespace cepp;
using namespace cepp::testing;

namespace {

PlacementItem item(const std::string& id, std::int64_t cap, const std::string& tenant, bool sh) {
  return PlacementItem{id, cap, tenant, sh, std::nullopt};
}

std::size_t used_containers(const Placement& p) {
  std::set<int> used(p.item_container.begin(), p.item_container.end());
  return used.size();
}

}  // namespace

TEST_SUITE("exact") {

TEST_CASE("Example 1 exact optimum") {
  ProblemInstance inst = example1_instance();
  auto t0 = std::chrono::steady_clock::now();
  ExactResult r = solve_exact(inst);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - t0);
  CHECK(ms.count() < 1000);
  CHECK(r.cost == 5000);
  CHECK(r.proven_optimal);
  CHECK(check_feasible(r.placement, inst).is_correct());
  const auto& x = r.placement.item_container;
  const auto& y = r.placement.container_variant;
  int shared = x[find_item(inst, "t1.p1")];
  int own = x[find_item(inst, "t1.p2")];
  CHECK(x[find_item(inst, "t2.p1")] == shared);
  CHECK(x[find_item(inst, "t3.p1")] == shared);
  CHECK(x[find_item(inst, "t1.p3")] == own);
  CHECK(inst.variants[y[shared]].id == "n-3200");
  CHECK(inst.variants[y[own]].id == "aws-6400");
}

TEST_CASE("single item is forced onto the only variant") {
  ProblemInstance inst = make_instance({item("a", 64, "t1", true)},
                                       {ContainerVariant{"v", "N", 3200, 2000, std::nullopt}});
  ExactResult r = solve_exact(inst);
  CHECK(r.cost == 2000);
  CHECK(r.proven_optimal);
}

TEST_CASE("exact matches the exhaustive oracle") {
  Rng rng(2024);
  for (int k = 0; k < 100; ++k) {
    ProblemInstance inst = random_instance(rng, InstanceShape{});
    auto oracle = oracle_solve(inst);
    REQUIRE(oracle.has_value());
    ExactResult r = solve_exact(inst);
    CAPTURE(k);
    CHECK(r.cost == oracle->cost);
    CHECK(r.proven_optimal);
    CHECK(check_feasible(r.placement, inst).is_correct());
    CHECK(total_cost(r.placement, inst) == r.cost);
  }
}

TEST_CASE("exact matches the oracle with an item limit and a tight container bound") {
  Rng rng(77);
  for (int k = 0; k < 40; ++k) {
    ProblemInstance inst = random_instance(rng, InstanceShape{3, 7});
    inst.max_items_per_container = 2;
    inst.max_containers = (inst.items.size() + 1) / 2 + 1;
    auto oracle = oracle_solve(inst);
    CAPTURE(k);
    if (!oracle) {
      CHECK_THROWS_AS(solve_exact(inst), Error);
      continue;
    }
    ExactResult r = solve_exact(inst);
    CHECK(r.cost == oracle->cost);
    CHECK(check_feasible(r.placement, inst).is_correct());
  }
}

TEST_CASE("no feasible placement cost is below the exact cost") {
  Rng rng(8);
  for (int k = 0; k < 30; ++k) {
    ProblemInstance inst = random_instance(rng, InstanceShape{4, 10});
    ExactResult r = solve_exact(inst);
    SearchConfig cfg;
    cfg.max_transformations = 500;
    cfg.rng_seed = static_cast<std::uint64_t>(k);
    CHECK(local_search(inst, cfg).cost >= r.cost);
    CHECK(hosting_baseline(inst).cost >= r.cost);
  }
}

TEST_CASE("an explicit zero variant changes nothing") {
  Rng rng(12);
  for (int k = 0; k < 20; ++k) {
    ProblemInstance inst = random_instance(rng, InstanceShape{});
    std::vector<ContainerVariant> paid;
    for (const auto& v : inst.variants) {
      if (!v.is_zero()) paid.push_back(v);
    }
    ProblemInstance again = make_instance(inst.items, paid);
    CHECK(solve_exact(again).cost == solve_exact(inst).cost);
  }
}

TEST_CASE("item cap guard") {
  Rng rng(1);
  ProblemInstance inst = random_instance(rng, InstanceShape{25, 25});
  try {
    solve_exact(inst);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooLarge);
  }
  ExactOptions opt;
  opt.override_cap = true;
  opt.budget = std::chrono::milliseconds(200);
  ExactResult r = solve_exact(inst, opt);
  CHECK(check_feasible(r.placement, inst).is_correct());
}

TEST_CASE("budget expiry returns the incumbent unproven") {
  Rng rng(3);
  ProblemInstance inst = random_instance(rng, InstanceShape{60, 60, 4, 4, 0.5, 64, 2000, 6});
  ExactOptions opt;
  opt.override_cap = true;
  opt.budget = std::chrono::milliseconds(1);
  ExactResult r = solve_exact(inst, opt);
  CHECK_FALSE(r.proven_optimal);
  CHECK(check_feasible(r.placement, inst).is_correct());
}

TEST_CASE("infeasible within the container bound") {
  ContainerVariant v{"v", "A", 100, 10, std::nullopt};
  ProblemInstance inst =
      make_instance({item("a", 60, "t1", false), item("b", 60, "t2", false)}, {v}, 1);
  try {
    solve_exact(inst);
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasible);
  }
}

TEST_CASE("FFD container bound on single-variant instances") {
  Rng rng(41);
  for (int k = 0; k < 100; ++k) {
    InstanceShape shape;
    shape.variants = 1;
    shape.cap_lo = 100;
    shape.cap_hi = 1000;
    ProblemInstance inst = random_instance(rng, shape);
    ProblemInstance norm = normalized_instance(inst);
    const std::size_t ffd = ffd_initial(norm).containers().size();
    auto opt = oracle_solve(inst, true);
    REQUIRE(opt.has_value());
    const double bound = std::ceil(11.0 / 9.0 * static_cast<double>(opt->containers) + 2.0 / 3.0);
    CAPTURE(k);
    CHECK(static_cast<double>(ffd) <= bound);
    CHECK(used_containers(solve_exact(inst).placement) == opt->containers);
  }
}

}  // TEST_SUITE

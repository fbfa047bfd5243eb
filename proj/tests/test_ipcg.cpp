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


#include <algorithm>

#include "cepp/error.hpp"
#include "cepp/ipcg.hpp"
#include "cepp/ipcg_json.hpp"
#include "doctest.h"
#include "support/build.hpp"
#include "support/gen.hpp"

using namespace cepp;
using namespace cepp::testing;

namespace {

Contract router_out() {
  Contract c;
  c.set_concept(Concept::kEncrypted, ConceptValue::kNo);
  c.set_concept(Concept::kSigned, ConceptValue::kNo);
  c.elements[ElementKey::kPayload] = ElementSet::of({"ID", "VALUE"});
  return c;
}

Contract multicast_in() {
  Contract c;
  c.set_concept(Concept::kEncrypted, ConceptValue::kNo);
  c.elements[ElementKey::kPayload] = ElementSet::of({"ID", "VALUE"});
  return c;
}

// start -> router -> {multicast -> end, end}
Ipcg router_multicast(const Contract& router_to_mc) {
  const Contract plain = payload({"ID", "VALUE"});
  auto s = make_node("s", PatternType::kStart);
  s.out_contracts = {plain};
  auto r = make_node("r", PatternType::kCondition);
  r.chars.conditions = {"a", "b"};
  r.in_contracts = {plain};
  r.out_contracts = {router_to_mc, plain};
  auto m = make_node("m", PatternType::kFork, 64, false);
  m.in_contracts = {multicast_in()};
  m.out_contracts = {plain, plain};
  auto e1 = make_node("e1", PatternType::kEnd);
  e1.in_contracts = {plain};
  auto e2 = make_node("e2", PatternType::kEnd);
  e2.in_contracts = {plain};
  auto e3 = make_node("e3", PatternType::kEnd);
  e3.in_contracts = {plain};
  return Ipcg("g", "t1", {s, r, m, e1, e2, e3},
              {{"s", "r"}, {"r", "m"}, {"r", "e3"}, {"m", "e1"}, {"m", "e2"}});
}

}  // namespace

TEST_SUITE("ipcg") {

TEST_CASE("router_join fixture is a correct typed graph") {
  Ipcg g = load_ipcg(data_path("graphs/router_join.ipcg.json"));
  CHECK(validate_iptg(g).is_correct());
  CHECK(validate_ipcg(g).is_correct());
  CHECK_FALSE(process_shareable(g));
}

TEST_CASE("empty graph lacks start and end") {
  Ipcg g("empty", "t1", {}, {});
  auto r = validate_iptg(g);
  CHECK(r.has(violation::kMissingStart));
  CHECK(r.has(violation::kMissingEnd));
}

TEST_CASE("two-node loop is a cycle") {
  auto a = make_node("a", PatternType::kMessageProcessor);
  auto b = make_node("b", PatternType::kMessageProcessor);
  Ipcg g("loop", "t1", {a, b}, {{"a", "b"}, {"b", "a"}});
  CHECK(validate_iptg(g).has(violation::kCycle));
}

TEST_CASE("cycle fixture reports CYCLE") {
  Ipcg g = load_ipcg(data_path("graphs/cycle.ipcg.json"));
  CHECK(validate_iptg(g).has(violation::kCycle));
}

TEST_CASE("cardinality per type") {
  SUBCASE("fork with one successor") {
    auto f = make_node("f", PatternType::kFork);
    Ipcg g = with_uniform_contracts("g", "t1",
                                    {make_node("s", PatternType::kStart), f,
                                     make_node("e", PatternType::kEnd)},
                                    {{"s", "f"}, {"f", "e"}});
    auto r = validate_iptg(g);
    CHECK(r.count(violation::kCardinality) == 1);
    CHECK(r.violations.front().ref == "f");
  }
  SUBCASE("external call needs its remote link") {
    auto c = make_node("c", PatternType::kExternalCall);
    Ipcg without = chain({c});
    CHECK(validate_iptg(without).has(violation::kCardinality));
    c.remote_link = "endpoint";
    CHECK(validate_iptg(chain({c})).is_correct());
  }
  SUBCASE("disconnected component") {
    Ipcg g = with_uniform_contracts(
        "g", "t1",
        {make_node("s", PatternType::kStart), make_node("e", PatternType::kEnd),
         make_node("s2", PatternType::kStart), make_node("e2", PatternType::kEnd)},
        {{"s", "e"}, {"s2", "e2"}});
    CHECK(validate_iptg(g).has(violation::kDisconnected));
  }
}

TEST_CASE("violations are ordered by node id then code") {
  auto x = make_node("x", PatternType::kFork);
  auto a = make_node("a", PatternType::kStructuralJoin);
  Ipcg g = with_uniform_contracts("g", "t1",
                                  {make_node("s", PatternType::kStart), x, a,
                                   make_node("e", PatternType::kEnd)},
                                  {{"s", "x"}, {"x", "a"}, {"a", "e"}});
  auto r = validate_iptg(g);
  REQUIRE(r.count(violation::kCardinality) == 2);
  std::vector<std::string> refs;
  for (const auto& v : r.violations) refs.push_back(v.ref);
  CHECK(std::is_sorted(refs.begin(), refs.end()));
}

TEST_CASE("match_contracts clauses") {
  Contract out = router_out();
  CHECK(match_contracts(multicast_in(), std::span<const Contract>(&out, 1)));

  SUBCASE("vacuous concepts, union of elements") {
    std::vector<Contract> preds = {payload({"a"}), payload({"b"})};
    CHECK(match_contracts(payload({"a", "b"}), preds));
    CHECK_FALSE(match_contracts(payload({"a"}), preds));
  }
  SUBCASE("direct concept clash") {
    Contract in;
    in.set_concept(Concept::kEncrypted, ConceptValue::kNo);
    Contract pred;
    pred.set_concept(Concept::kEncrypted, ConceptValue::kYes);
    CHECK_FALSE(match_contracts(in, std::span<const Contract>(&pred, 1)));
  }
  SUBCASE("any predecessor concept is accepted") {
    Contract in;
    in.set_concept(Concept::kSigned, ConceptValue::kYes);
    Contract pred;
    CHECK(match_contracts(in, std::span<const Contract>(&pred, 1)));
  }
  SUBCASE("wildcard element set accepts anything") {
    Contract in;
    in.elements[ElementKey::kPayload] = ElementSet::wildcard();
    Contract pred = payload({"q"});
    CHECK(match_contracts(in, std::span<const Contract>(&pred, 1)));
  }
}

TEST_CASE("contract mismatch on the router edge") {
  CHECK(validate_ipcg(router_multicast(router_out())).is_correct());
  Contract flipped = router_out();
  flipped.set_concept(Concept::kEncrypted, ConceptValue::kYes);
  auto r = validate_ipcg(router_multicast(flipped));
  REQUIRE(r.count(violation::kContractMismatch) == 1);
  CHECK(r.violations.front().ref == "m");
}

TEST_CASE("start-end pair with equal contracts") {
  CHECK(validate_ipcg(load_ipcg(data_path("graphs/minimal.ipcg.json"))).is_correct());
}

TEST_CASE("contract arity must follow the edges") {
  Ipcg g = chain({make_node("p", PatternType::kMessageProcessor)});
  auto nodes = g.nodes();
  nodes[1].out_contracts.clear();
  Ipcg broken("g", "t1", nodes, g.edges());
  CHECK(validate_ipcg(broken).has(violation::kContractArity));
  CHECK(validate_iptg(broken).is_correct());
}

TEST_CASE("process capacity and shareability") {
  std::vector<PatternNode> mid = {make_node("a", PatternType::kMessageProcessor),
                                  make_node("b", PatternType::kMessageProcessor)};
  Ipcg g = chain(mid);
  CHECK(process_capacity(g) == doctest::Approx(256.0));
  CHECK(process_shareable(g));

  auto script = make_node("sc", PatternType::kMessageProcessor, 64, false, "script");
  CHECK_FALSE(process_shareable(chain({script})));

  Ipcg empty("e", "t1", {}, {});
  CHECK_THROWS_AS(process_capacity(empty), Error);

  std::vector<PatternNode> units;
  for (int cap : {3, 4, 6}) {
    units.push_back(make_node("u" + std::to_string(cap), PatternType::kMessageProcessor, cap));
  }
  auto nodes = chain(units).nodes();
  nodes.front().chars.cap_mb = 0;
  nodes.back().chars.cap_mb = 0;
  Ipcg thirteen("pc", "t1", nodes, chain(units).edges());
  CHECK(process_capacity(thirteen) == doctest::Approx(13.0));
}

TEST_CASE("isomorphism ignores ids but not attributes") {
  Ipcg g = load_ipcg(data_path("graphs/invoicing.ipcg.json"));
  CHECK(isomorphic(g, g));

  Json j = ipcg_to_json(g);
  std::string old_id = j["nodes"][3]["id"];
  j["nodes"][3]["id"] = "renamed";
  for (auto& e : j["edges"]) {
    for (auto& end : e) {
      if (end == old_id) end = "renamed";
    }
  }
  CHECK(isomorphic(g, ipcg_from_json(j)));

  Json k = ipcg_to_json(g);
  k["nodes"][3]["char"]["cap_mb"] = 65;
  CHECK_FALSE(isomorphic(g, ipcg_from_json(k)));
}

TEST_CASE("unused element analysis") {
  SUBCASE("successor consumes a subset") {
    auto a = make_node("a", PatternType::kMessageProcessor);
    auto b = make_node("b", PatternType::kMessageProcessor);
    Ipcg base = chain({a, b});
    auto nodes = base.nodes();
    nodes[1].out_contracts = {payload({"x", "y"})};
    nodes[2].in_contracts = {payload({"x"})};
    Ipcg g("g", "t1", nodes, base.edges());
    auto unused = analyze_unused_elements(g);
    CHECK(unused["a"] == std::set<std::string>{"y"});
    CHECK(unused["e"].empty());
  }
  SUBCASE("a program downstream consumes everything") {
    auto a = make_node("a", PatternType::kMessageProcessor);
    auto b = make_node("b", PatternType::kMessageProcessor);
    b.chars.program = "custom()";
    Ipcg base = chain({a, b});
    auto nodes = base.nodes();
    nodes[1].out_contracts = {payload({"x", "y"})};
    nodes[2].in_contracts = {payload({"x"})};
    Ipcg g("g", "t1", nodes, base.edges());
    CHECK(analyze_unused_elements(g)["a"].empty());
  }
}

TEST_CASE("json round trip is id identical and byte stable") {
  for (const char* f : {"graphs/invoicing.ipcg.json", "graphs/router_join.ipcg.json",
                        "graphs/minimal.ipcg.json", "graphs/enricher_chain.ipcg.json"}) {
    CAPTURE(f);
    Ipcg g = load_ipcg(data_path(f));
    std::string text = serialize_ipcg(g);
    Ipcg back = parse_ipcg(text);
    CHECK(isomorphic(g, back));
    CHECK(back.id() == g.id());
    CHECK(back.tenant() == g.tenant());
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(back.nodes()[i].id == g.nodes()[i].id);
    CHECK(serialize_ipcg(back) == text);
  }
}

TEST_CASE("parse errors carry a code") {
  try {
    parse_ipcg("{\"nodes\": 3}");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
  }
  CHECK_THROWS_AS(parse_ipcg("{"), Error);
  CHECK_THROWS(Ipcg("g", "t1",
                    {make_node("a", PatternType::kStart), make_node("a", PatternType::kEnd)}, {}));
  CHECK_THROWS(Ipcg("g", "t1", {make_node("a", PatternType::kStart)}, {{"a", "zz"}}));
}

}  // TEST_SUITE

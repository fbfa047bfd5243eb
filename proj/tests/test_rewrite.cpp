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
#include "cepp/ipcg_json.hpp"
#include "cepp/rewrite.hpp"
#include "doctest.h"
#include "support/build.hpp"
#include "support/gen.hpp"

using namespace cepp;
using namespace cepp::testing;

namespace {

Ipcg fixture(const char* rel) { return load_ipcg(data_path(rel)); }

std::size_t total_nodes(const std::vector<Ipcg>& gs) {
  std::size_t k = 0;
  for (const auto& g : gs) k += g.size();
  return k;
}

// Prices a graph set at one cent per node.
Cents per_node(const std::vector<Ipcg>& gs) { return static_cast<Cents>(total_nodes(gs)); }

PatternNode enricher(const std::string& id) {
  return make_node(id, PatternType::kMessageProcessor, 64, true, "content-enricher");
}

}  // namespace

TEST_SUITE("rewrite") {

TEST_CASE("rule ids round trip") {
  for (RuleId r : kAllRules) CHECK(parse_rule_id(to_string(r)) == r);
  CHECK_FALSE(parse_rule_id("NOPE"));
}

TEST_CASE("decomposition matches on the router_join fixture") {
  Ipcg g = fixture("graphs/router_join.ipcg.json");
  CHECK(find_matches(RuleId::kShToNonsh, g).size() == 2);
  CHECK(find_matches(RuleId::kNonshToSh, g).size() == 2);
}

TEST_CASE("all-shareable graph has no crossing") {
  Ipcg g = fixture("graphs/invoicing.ipcg.json");
  REQUIRE(process_shareable(g));
  CHECK(find_matches(RuleId::kShToNonsh, g).empty());
  CHECK(find_matches(RuleId::kNonshToSh, g).empty());
  RewriteResult r = decompose(g);
  REQUIRE(r.graphs.size() == 1);
  CHECK(isomorphic(r.graphs.front(), g));
  CHECK(r.remote_links.empty());
}

TEST_CASE("router_join decomposes into three shareable and one non-shareable graph") {
  Ipcg g = fixture("graphs/router_join.ipcg.json");
  RewriteResult r = decompose(g);
  REQUIRE(r.graphs.size() == 4);
  CHECK(count_shareable(r.graphs) == 3);
  CHECK(r.remote_links.size() == 4);
  CHECK(verify_rewrite(g, r));
  for (const auto& part : r.graphs) {
    CHECK(part.tenant() == g.tenant());
    CHECK(validate_ipcg(part).is_correct());
  }
  // Three plumbing nodes per cut.
  CHECK(total_nodes(r.graphs) == g.size() + 3 * r.remote_links.size());
  CHECK(r.stats.capacity_added_mb == doctest::Approx(192.0 * r.remote_links.size()));
}

TEST_CASE("single decomposition steps cut one edge each") {
  Ipcg g = fixture("graphs/router_join.ipcg.json");
  for (RuleId rule : {RuleId::kShToNonsh, RuleId::kNonshToSh}) {
    for (const auto& m : find_matches(rule, g)) {
      RewriteResult r = apply_rule(m, g);
      CHECK(r.remote_links.size() == 1);
      CHECK(r.stats.nodes_added == 3);
      CHECK(verify_rewrite(g, r));
    }
  }
}

TEST_CASE("cutting a bridge splits the graph") {
  auto a = make_node("a", PatternType::kMessageProcessor, 64, true, "filter");
  auto b = make_node("b", PatternType::kMessageProcessor, 64, false, "script");
  Ipcg g = chain({a, b});
  auto ms = find_matches(RuleId::kShToNonsh, g);
  REQUIRE(ms.size() == 1);
  RewriteResult r = apply_rule(ms.front(), g);
  REQUIRE(r.graphs.size() == 2);
  CHECK(verify_rewrite(g, r));
  RewriteResult all = decompose(g);
  CHECK(all.graphs.size() == 3);
  CHECK(count_shareable(all.graphs) == 2);
}

TEST_CASE("matches are ordered by smallest bound id") {
  for (const char* f : {"graphs/router_join.ipcg.json", "graphs/invoicing.ipcg.json"}) {
    Ipcg g = fixture(f);
    for (RuleId rule : kAllRules) {
      auto ms = find_matches(rule, g);
      for (std::size_t i = 1; i < ms.size(); ++i) {
        CHECK(ms[i - 1].smallest_id() <= ms[i].smallest_id());
      }
    }
  }
}

TEST_CASE("invoicing combine matches") {
  Ipcg g = fixture("graphs/invoicing.ipcg.json");
  auto ms = find_matches(RuleId::kCombineNeighbors, g);
  REQUIRE(ms.size() == 2);
  CHECK(ms[0].role("run") == std::vector<std::string>{"n04", "n05"});
  CHECK(g.node("n04").name == "Prepare to store");
  CHECK(g.node("n05").name == "setHeader");
  CHECK(ms[1].role("run") == std::vector<std::string>{"n08", "n09"});
}

TEST_CASE("combine merges a run") {
  Ipcg g = fixture("graphs/invoicing.ipcg.json");
  auto m = find_matches(RuleId::kCombineNeighbors, g).front();
  RewriteResult r = apply_rule(m, g);
  REQUIRE(r.graphs.size() == 1);
  const Ipcg& out = r.graphs.front();
  CHECK(out.size() == g.size() - 1);
  CHECK(verify_rewrite(g, r));
  CHECK(r.stats.net_nodes_removed() == 1);
}

TEST_CASE("combined capacity is the largest in the run") {
  auto a = enricher("a");
  a.chars.cap_mb = 32;
  auto b = enricher("b");
  b.chars.cap_mb = 96;
  auto c = enricher("c");
  c.chars.cap_mb = 64;
  a.chars.conditions = {"ca"};
  c.chars.conditions = {"cc"};
  Ipcg g = chain({a, b, c});
  auto ms = find_matches(RuleId::kCombineNeighbors, g);
  REQUIRE(ms.size() == 1);
  CHECK(ms.front().role("run").size() == 3);
  RewriteResult r = apply_rule(ms.front(), g);
  const Ipcg& out = r.graphs.front();
  REQUIRE(out.size() == 3);
  const PatternNode* merged = nullptr;
  for (const auto& n : out.nodes()) {
    if (n.type == PatternType::kMessageProcessor) merged = &n;
  }
  REQUIRE(merged != nullptr);
  CHECK(merged->chars.cap_mb == doctest::Approx(96.0));
  CHECK(merged->chars.conditions == std::vector<std::string>{"ca", "cc"});
  CHECK(verify_rewrite(g, r));
}

TEST_CASE("combine refuses a run with a read after write") {
  Ipcg base = chain({enricher("a"), enricher("b")});
  auto nodes = base.nodes();
  // a adds y, b reads it.
  nodes[1].out_contracts = {payload({"x", "y"})};
  nodes[2].in_contracts = {payload({"x", "y"})};
  nodes[2].out_contracts = {payload({"x", "y"})};
  nodes[3].in_contracts = {payload({"x", "y"})};
  Ipcg g("g", "t1", nodes, base.edges());
  REQUIRE(validate_ipcg(g).is_correct());
  CHECK(find_matches(RuleId::kCombineNeighbors, g).empty());

  Match forced;
  forced.rule = RuleId::kCombineNeighbors;
  forced.bindings["run"] = {"a", "b"};
  try {
    apply_rule(forced, g);
    FAIL("expected MatchStale");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMatchStale);
  }
}

TEST_CASE("combine refuses different kinds") {
  auto t = make_node("t", PatternType::kMessageProcessor, 64, true, "message-translator");
  CHECK(find_matches(RuleId::kCombineNeighbors, chain({enricher("a"), t})).empty());
  auto f1 = make_node("f1", PatternType::kMessageProcessor, 64, true, "filter");
  auto f2 = make_node("f2", PatternType::kMessageProcessor, 64, true, "filter");
  CHECK(find_matches(RuleId::kCombineNeighbors, chain({f1, f2})).empty());
}

TEST_CASE("routing slip on the invoicing router") {
  Ipcg g = fixture("graphs/invoicing.ipcg.json");
  auto ms = find_matches(RuleId::kRouterToRoutingSlip, g);
  REQUIRE(ms.size() == 1);
  const Match& m = ms.front();
  CHECK(m.role("router") == std::vector<std::string>{"n10"});
  CHECK(m.role("calls") == std::vector<std::string>{"n11", "n12"});
  CHECK(m.role("ends") == std::vector<std::string>{"n13"});
  CHECK(m.role("join") == std::vector<std::string>{"n14"});
  RewriteResult r = apply_rule(m, g);
  CHECK(verify_rewrite(g, r));
  const Ipcg& out = r.graphs.front();
  CHECK(out.size() == g.size() - 3);
  REQUIRE(out.contains("n10"));
  CHECK(out.node("n10").kind == "content-enricher");
  auto succ = out.successors("n10");
  REQUIRE(succ.size() == 1);
  CHECK(out.node(succ.front()).type == PatternType::kExternalCall);
  const Contract* slip = out.out_contract_on("n10", succ.front());
  REQUIRE(slip != nullptr);
  auto hdr = slip->elements.find(ElementKey::kHeader);
  REQUIRE(hdr != slip->elements.end());
  CHECK(hdr->second.ids.count(std::string(kRoutingSlipHeader)) == 1);
}

TEST_CASE("improve on invoicing removes five nodes") {
  Ipcg g = fixture("graphs/invoicing.ipcg.json");
  ImproveResult r = improve(g);
  CHECK(r.graph.size() == g.size() - 5);
  REQUIRE(r.applied.size() == 3);
  CHECK(r.applied[0].rule == RuleId::kCombineNeighbors);
  CHECK(r.applied[1].rule == RuleId::kCombineNeighbors);
  CHECK(r.applied[2].rule == RuleId::kRouterToRoutingSlip);
  CHECK(validate_ipcg(r.graph).is_correct());
  CHECK(improve(r.graph).applied.empty());
}

TEST_CASE("improve on a minimal graph changes nothing") {
  Ipcg g = fixture("graphs/minimal.ipcg.json");
  ImproveResult r = improve(g);
  CHECK(r.applied.empty());
  CHECK(isomorphic(r.graph, g));
}

TEST_CASE("improve merges an enricher chain in one step") {
  Ipcg g = fixture("graphs/enricher_chain.ipcg.json");
  ImproveResult r = improve(g);
  REQUIRE(r.applied.size() == 1);
  CHECK(r.applied.front().match.role("run").size() == 3);
  CHECK(r.graph.size() == g.size() - 2);
}

TEST_CASE("verify_rewrite rejects damaged results") {
  Ipcg g = fixture("graphs/router_join.ipcg.json");
  RewriteResult r = decompose(g);
  REQUIRE(verify_rewrite(g, r));

  SUBCASE("receiver removed from its graph") {
    RewriteResult bad = r;
    const auto& link = bad.remote_links.front();
    for (auto& part : bad.graphs) {
      if (part.id() != link.callee_graph) continue;
      std::vector<PatternNode> nodes;
      for (const auto& n : part.nodes()) {
        if (n.id != link.receiver_node) nodes.push_back(n);
      }
      std::vector<Edge> edges;
      for (const auto& e : part.edges()) {
        if (e.first != link.receiver_node && e.second != link.receiver_node) edges.push_back(e);
      }
      part = Ipcg(part.id(), part.tenant(), nodes, edges);
    }
    CHECK_FALSE(verify_rewrite(g, bad));
  }
  SUBCASE("in-contract requires an element nobody produces") {
    Ipcg inv = fixture("graphs/invoicing.ipcg.json");
    RewriteResult c = apply_rule(find_matches(RuleId::kCombineNeighbors, inv).front(), inv);
    REQUIRE(verify_rewrite(inv, c));
    auto nodes = c.graphs.front().nodes();
    for (auto& n : nodes) {
      if (n.type == PatternType::kEnd) n.in_contracts = {payload({"never_produced"})};
    }
    c.graphs.front() = Ipcg(c.graphs.front().id(), c.graphs.front().tenant(), nodes,
                            c.graphs.front().edges());
    CHECK_FALSE(verify_rewrite(inv, c));
  }
  SUBCASE("tenant changed") {
    RewriteResult bad = r;
    bad.graphs.front().set_tenant("other");
    CHECK_FALSE(verify_rewrite(g, bad));
  }
  SUBCASE("capacity bookkeeping off") {
    RewriteResult bad = r;
    bad.stats.capacity_added_mb += 64;
    CHECK_FALSE(verify_rewrite(g, bad));
  }
}

TEST_CASE("stale matches are refused") {
  Ipcg g = fixture("graphs/invoicing.ipcg.json");
  auto m = find_matches(RuleId::kCombineNeighbors, g).front();
  Ipcg after = apply_rule(m, g).graphs.front();
  CHECK_THROWS_AS(apply_rule(m, after), Error);
}

TEST_CASE("proposals are sorted and never raise the cost") {
  Ipcg g = fixture("graphs/invoicing.ipcg.json");
  auto ps = enumerate_proposals(g, per_node);
  REQUIRE(ps.size() == 3);
  for (const auto& p : ps) CHECK(p.cost_after <= p.cost_before);
  for (std::size_t i = 1; i < ps.size(); ++i) {
    CHECK(ps[i - 1].savings() >= ps[i].savings());
  }
  CHECK(ps.front().rule == RuleId::kRouterToRoutingSlip);
  CHECK(ps.front().savings() == 3);
}

TEST_CASE("decomposition bundle is suppressed when it raises the cost") {
  Ipcg g = fixture("graphs/router_join.ipcg.json");
  auto ps = enumerate_proposals(g, per_node);
  CHECK(std::none_of(ps.begin(), ps.end(), [](const Proposal& p) { return !p.rule; }));
  auto flat = [](const std::vector<Ipcg>&) -> Cents { return 100; };
  auto ps2 = enumerate_proposals(g, flat);
  CHECK(std::any_of(ps2.begin(), ps2.end(),
                    [](const Proposal& p) { return !p.rule && p.rule_label() == "DECOMPOSE"; }));
}

TEST_CASE("minimal graph yields no proposals") {
  CHECK(enumerate_proposals(fixture("graphs/minimal.ipcg.json"), per_node).empty());
}

TEST_CASE("pricer failures surface as PricingUnavailable") {
  Ipcg g = fixture("graphs/invoicing.ipcg.json");
  auto broken = [](const std::vector<Ipcg>&) -> Cents { throw std::runtime_error("down"); };
  try {
    enumerate_proposals(g, broken);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPricingUnavailable);
  }
}

}  // TEST_SUITE

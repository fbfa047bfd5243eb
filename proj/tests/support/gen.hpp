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


// Hand-rolled generators for property tests: placement instances and
// structurally valid IPCGs built from a small block grammar.

#ifndef CEPP_TESTS_GEN_HPP
#define CEPP_TESTS_GEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cepp/heuristic.hpp"
#include "cepp/ipcg.hpp"
#include "cepp/model.hpp"

#ifndef CEPP_DATA_DIR
#error "CEPP_DATA_DIR must be defined"
#endif

namespace cepp::testing {

inline std::string data_path(const std::string& rel) { return std::string(CEPP_DATA_DIR) + "/" + rel; }

inline std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

struct InstanceShape {
  std::size_t items_min = 1;
  std::size_t items_max = 8;
  std::size_t tenants_min = 2;
  std::size_t tenants_max = 4;
  double shareable_p = 0.6;
  std::int64_t cap_lo = 64;
  std::int64_t cap_hi = 1600;
  std::size_t variants = 3;
};

inline std::vector<ContainerVariant> random_catalog(Rng& rng, std::size_t count) {
  std::vector<ContainerVariant> vs;
  for (std::size_t k = 0; k < count; ++k) {
    ContainerVariant v;
    v.id = "v" + std::to_string(k);
    v.vendor = std::string(1, static_cast<char>('A' + k % 3));
    v.cap_mb = uniform(rng, 8, 40) * 128;
    v.cost = uniform(rng, 500, 6000);
    vs.push_back(v);
  }
  return vs;
}

/// Items never exceed the largest variant, so the instance is feasible.
inline ProblemInstance random_instance(Rng& rng, const InstanceShape& shape) {
  auto variants = random_catalog(rng, shape.variants);
  std::int64_t max_cap = 0;
  for (const auto& v : variants) max_cap = std::max(max_cap, v.cap_mb);
  const auto n = static_cast<std::size_t>(uniform(rng, static_cast<std::int64_t>(shape.items_min),
                                                  static_cast<std::int64_t>(shape.items_max)));
  const auto tenants = uniform(rng, static_cast<std::int64_t>(shape.tenants_min),
                               static_cast<std::int64_t>(shape.tenants_max));
  std::vector<PlacementItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    PlacementItem it;
    it.id = "i" + std::to_string(i);
    it.cap_mb = std::min(max_cap, uniform(rng, shape.cap_lo, shape.cap_hi));
    it.tenant = "t" + std::to_string(uniform(rng, 1, tenants));
    it.shareable = rng.unit() < shape.shareable_p;
    items.push_back(it);
  }
  return make_instance(std::move(items), std::move(variants));
}

// ---------------------------------------------------------------------------
// Graphs

struct GraphShape {
  std::size_t blocks_min = 1;
  std::size_t blocks_max = 6;
  double non_shareable_p = 0.25;
};

class GraphBuilder {
 public:
  GraphBuilder(Rng& rng, const GraphShape& shape) : rng_(rng), shape_(shape) {}

  Ipcg build(const std::string& id, const std::string& tenant) {
    std::string cur = add("start", PatternType::kStart, "");
    const auto blocks = uniform(rng_, static_cast<std::int64_t>(shape_.blocks_min),
                                static_cast<std::int64_t>(shape_.blocks_max));
    for (std::int64_t b = 0; b < blocks; ++b) cur = block(cur);
    link(cur, add("end", PatternType::kEnd, ""));
    finish_contracts();
    return Ipcg(id, tenant, nodes_, edges_);
  }

 private:
  std::string add(const std::string& name, PatternType t, const std::string& kind) {
    PatternNode n;
    n.id = "n" + std::string(nodes_.size() < 10 ? "0" : "") + std::to_string(nodes_.size());
    n.name = name + " " + n.id;
    n.type = t;
    n.kind = kind;
    n.chars.cap_mb = static_cast<double>(uniform(rng_, 1, 4) * 32);
    n.chars.shareable = rng_.unit() >= shape_.non_shareable_p;
    if (kind == "content-enricher" || kind == "message-translator") n.chars.access = Access::kReadWrite;
    nodes_.push_back(n);
    return n.id;
  }

  void link(const std::string& a, const std::string& b) { edges_.emplace_back(a, b); }

  std::string processor() {
    static const char* kinds[] = {"content-enricher", "content-enricher", "message-translator",
                                  "script", "filter"};
    const char* kind = kinds[rng_.below(5)];
    return add(kind, PatternType::kMessageProcessor, kind);
  }

  std::string call(const std::string& receiver) {
    std::string id = add("call", PatternType::kExternalCall, "");
    auto& n = nodes_.back();
    n.receiver = receiver;
    n.remote_link = receiver + "-endpoint-" + id;
    return id;
  }

  std::string block(const std::string& from) {
    switch (rng_.below(5)) {
      case 0:
      case 1: {
        std::string cur = from;
        const auto len = uniform(rng_, 1, 3);
        for (std::int64_t k = 0; k < len; ++k) {
          std::string p = processor();
          link(cur, p);
          cur = p;
        }
        return cur;
      }
      case 2: {
        std::string f = add("fork", PatternType::kFork, "");
        link(from, f);
        std::string j = add("join", PatternType::kStructuralJoin, "");
        const auto width = uniform(rng_, 2, 3);
        for (std::int64_t k = 0; k < width; ++k) {
          std::string p = processor();
          link(f, p);
          link(p, j);
        }
        return j;
      }
      case 3: {
        std::string r = add("router", PatternType::kCondition, "");
        link(from, r);
        const auto calls = uniform(rng_, 1, 3);
        const auto ends = uniform(rng_, calls == 1 ? 1 : 0, 1);
        const std::string receiver = rng_.below(4) == 0 ? "R" + std::to_string(nodes_.size()) : "R";
        std::vector<std::string> cs;
        for (std::int64_t k = 0; k < calls; ++k) {
          cs.push_back(call(k == 0 ? "R" : receiver));
          link(r, cs.back());
        }
        for (std::int64_t k = 0; k < ends; ++k) link(r, add("branch end", PatternType::kEnd, ""));
        auto& rn = nodes_[index(r)];
        for (std::int64_t k = 0; k < calls + ends; ++k) rn.chars.conditions.push_back("c" + std::to_string(k));
        if (cs.size() == 1) return cs.front();
        std::string j = add("join", PatternType::kStructuralJoin, "");
        for (const auto& c : cs) link(c, j);
        return j;
      }
      default: {
        std::string c = call("S");
        link(from, c);
        return c;
      }
    }
  }

  std::size_t index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].id == id) return i;
    }
    return 0;
  }

  // Every edge carries payload "x". Enrichers additionally write a header
  // of their own, which downstream nodes do not constrain.
  void finish_contracts() {
    Contract base;
    base.elements[ElementKey::kPayload] = ElementSet::of({"x"});
    for (auto& n : nodes_) {
      std::size_t in = 0;
      std::size_t out = 0;
      for (const auto& [a, b] : edges_) {
        in += b == n.id ? 1 : 0;
        out += a == n.id ? 1 : 0;
      }
      Contract o = base;
      if (n.kind == "content-enricher") o.elements[ElementKey::kHeader] = ElementSet::of({"h_" + n.id});
      n.in_contracts.assign(in, base);
      n.out_contracts.assign(out, o);
      n.chars.mc_in = static_cast<int>(in);
      n.chars.mc_out = static_cast<int>(n.type == PatternType::kExternalCall ? out + 1 : out);
    }
  }

  Rng& rng_;
  GraphShape shape_;
  std::vector<PatternNode> nodes_;
  std::vector<Edge> edges_;
};

inline Ipcg random_graph(Rng& rng, const GraphShape& shape = {}, const std::string& id = "g",
                         const std::string& tenant = "t1") {
  return GraphBuilder(rng, shape).build(id, tenant);
}

}  // namespace cepp::testing

#endif  // CEPP_TESTS_GEN_HPP

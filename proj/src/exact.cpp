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


#include "cepp/exact.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>

#include "cepp/error.hpp"
#include "cepp/heuristic.hpp"

namespace cepp {
namespace {

constexpr std::size_t kMaxCoverUnits = 4'000'000;

struct Box {
  std::int64_t load = 0;
  std::size_t count = 0;
  // Tenant shared by all items, -1 once mixed.
  int tenant = -1;
  // Tenant of the non-shareable items, -1 if none.
  int hard_tenant = -1;
  std::size_t soft = 0;
};

class BranchAndBound {
 public:
  BranchAndBound(const ProblemInstance& norm, const ExactOptions& options)
      : inst_(norm), deadline_(Clock::now() + options.budget) {
    const std::size_t n = norm.items.size();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return norm.items[a].cap_mb > norm.items[b].cap_mb;
    });
    std::unordered_map<std::string, int> ids;
    for (const auto& it : norm.items) ids.emplace(it.tenant, static_cast<int>(ids.size()));
    tenant_.resize(n);
    for (std::size_t i = 0; i < n; ++i) tenant_[i] = ids.at(norm.items[i].tenant);

    suffix_.assign(n + 1, 0);
    for (std::size_t k = n; k-- > 0;) suffix_[k] = suffix_[k + 1] + norm.items[order_[k]].cap_mb;
    max_cap_ = norm.variants.back().cap_mb;
    build_cover_table();

    assign_.assign(n, -1);
    boxes_.reserve(n);
  }

  void seed(const Placement& p, Cents cost) {
    best_assign_ = p.item_container;
    best_cost_ = cost;
    best_mixed_ = mixed_of(p.item_container);
    have_best_ = true;
  }

  bool run() {
    if (!inst_.items.empty() && inst_.items[order_[0]].cap_mb > max_cap_) return true;
    dfs(0, 0);
    return !timed_out_;
  }

  bool found() const { return have_best_; }
  Cents best_cost() const { return best_cost_; }
  std::uint64_t nodes() const { return nodes_; }

  Placement best_placement() const {
    Placement p;
    p.item_container = best_assign_;
    p.container_variant.assign(inst_.max_containers, 0);
    std::vector<std::int64_t> load(inst_.max_containers, 0);
    for (std::size_t i = 0; i < best_assign_.size(); ++i) {
      load[static_cast<std::size_t>(best_assign_[i])] += inst_.items[i].cap_mb;
    }
    for (std::size_t j = 0; j < load.size(); ++j) {
      if (load[j] > 0) p.container_variant[j] = static_cast<int>(fit(load[j]));
    }
    return p;
  }

 private:
  using Clock = std::chrono::steady_clock;

  // Smallest variant holding `load`; it is also the cheapest one because
  // the variants are normalized.
  std::size_t fit(std::int64_t load) const {
    if (load <= 0) return 0;
    auto it = std::lower_bound(
        inst_.variants.begin() + 1, inst_.variants.end(), load,
        [](const ContainerVariant& v, std::int64_t l) { return v.cap_mb < l; });
    return static_cast<std::size_t>(it - inst_.variants.begin());
  }
  Cents price(std::int64_t load) const { return inst_.variants[fit(load)].cost; }

  void build_cover_table() {
    // Minimum cost of any multiset of variants whose capacities sum to at
    // least x. Computed on the gcd grid when small enough, otherwise
    // replaced by the best cost-per-MB rate.
    std::int64_t g = 0;
    for (std::size_t v = 1; v < inst_.variants.size(); ++v) g = std::gcd(g, inst_.variants[v].cap_mb);
    for (std::size_t v = 1; v < inst_.variants.size(); ++v) {
      const auto& var = inst_.variants[v];
      if (best_rate_ == 0 ||
          static_cast<__int128>(var.cost) * inst_.variants[best_rate_].cap_mb <
              static_cast<__int128>(inst_.variants[best_rate_].cost) * var.cap_mb) {
        best_rate_ = v;
      }
    }
    if (g == 0) return;
    grid_ = g;
    const std::int64_t units = (suffix_[0] + g - 1) / g;
    if (static_cast<std::size_t>(units) > kMaxCoverUnits) return;
    cover_.assign(static_cast<std::size_t>(units) + 1, 0);
    for (std::int64_t x = 1; x <= units; ++x) {
      Cents best = -1;
      for (std::size_t v = 1; v < inst_.variants.size(); ++v) {
        const std::int64_t rest = std::max<std::int64_t>(0, x - inst_.variants[v].cap_mb / g);
        const Cents c = inst_.variants[v].cost + cover_[static_cast<std::size_t>(rest)];
        if (best < 0 || c < best) best = c;
      }
      cover_[static_cast<std::size_t>(x)] = best;
    }
  }

  Cents cover(std::int64_t mb) const {
    if (mb <= 0 || best_rate_ == 0) return 0;
    if (!cover_.empty()) return cover_[static_cast<std::size_t>((mb + grid_ - 1) / grid_)];
    const auto& v = inst_.variants[best_rate_];
    const __int128 num = static_cast<__int128>(mb) * v.cost;
    return static_cast<Cents>((num + v.cap_mb - 1) / v.cap_mb);
  }

  std::size_t mixed_of(const std::vector<int>& assign) const {
    std::vector<char> hard(inst_.max_containers, 0);
    for (std::size_t i = 0; i < assign.size(); ++i) {
      if (!inst_.items[i].shareable) hard[static_cast<std::size_t>(assign[i])] = 1;
    }
    std::size_t mixed = 0;
    for (std::size_t i = 0; i < assign.size(); ++i) {
      if (inst_.items[i].shareable && hard[static_cast<std::size_t>(assign[i])]) ++mixed;
    }
    return mixed;
  }

  bool admits(const Box& b, std::size_t item) const {
    if (b.count == 0) return true;
    if (b.count >= inst_.max_items_per_container) return false;
    if (b.load + inst_.items[item].cap_mb > max_cap_) return false;
    const int t = tenant_[item];
    if (!inst_.items[item].shareable) return b.tenant == t;
    return b.hard_tenant < 0 || b.hard_tenant == t;
  }

  bool same_kind(std::size_t a, std::size_t b) const {
    const auto& x = inst_.items[a];
    const auto& y = inst_.items[b];
    return x.cap_mb == y.cap_mb && tenant_[a] == tenant_[b] && x.shareable == y.shareable;
  }

  void dfs(std::size_t k, Cents cost) {
    if (timed_out_) return;
    if ((++nodes_ & 1023) == 0 && Clock::now() > deadline_) {
      timed_out_ = true;
      return;
    }
    if (k == order_.size()) {
      if (!have_best_ || cost < best_cost_ || (cost == best_cost_ && mixed_ < best_mixed_)) {
        best_assign_ = assign_;
        best_cost_ = cost;
        best_mixed_ = mixed_;
        have_best_ = true;
      }
      return;
    }

    std::int64_t room = 0;
    for (const auto& b : boxes_) room += max_cap_ - b.load;
    const Cents bound = std::max(cover(suffix_[0]), cost + cover(suffix_[k] - room));
    if (have_best_ && (bound > best_cost_ || (bound == best_cost_ && mixed_ >= best_mixed_))) {
      return;
    }

    const std::size_t item = order_[k];
    const auto& it = inst_.items[item];
    std::size_t first = 0;
    if (k > 0 && same_kind(order_[k - 1], item)) {
      first = static_cast<std::size_t>(assign_[order_[k - 1]]);
    }

    struct Option {
      Cents delta;
      std::size_t box;
    };
    std::vector<Option> options;
    for (std::size_t j = first; j < boxes_.size(); ++j) {
      if (!admits(boxes_[j], item)) continue;
      const Cents delta = price(boxes_[j].load + it.cap_mb) - price(boxes_[j].load);
      options.push_back({delta, j});
    }
    std::stable_sort(options.begin(), options.end(),
                     [](const Option& a, const Option& b) { return a.delta < b.delta; });
    if (boxes_.size() < inst_.max_containers) options.push_back({price(it.cap_mb), boxes_.size()});

    for (const Option& o : options) {
      if (o.box == boxes_.size()) boxes_.emplace_back();
      Box& b = boxes_[o.box];
      const Box saved = b;
      const std::size_t saved_mixed = mixed_;

      const int t = tenant_[item];
      b.tenant = b.count == 0 ? t : (b.tenant == t ? t : -1);
      if (it.shareable) {
        ++b.soft;
        if (b.hard_tenant >= 0) ++mixed_;
      } else {
        if (b.hard_tenant < 0) mixed_ += b.soft;
        b.hard_tenant = t;
      }
      b.load += it.cap_mb;
      ++b.count;
      assign_[item] = static_cast<int>(o.box);

      dfs(k + 1, cost + o.delta);

      assign_[item] = -1;
      mixed_ = saved_mixed;
      if (saved.count == 0) {
        boxes_.pop_back();
      } else {
        boxes_[o.box] = saved;
      }
      if (timed_out_) return;
    }
  }

  const ProblemInstance& inst_;
  Clock::time_point deadline_;
  std::vector<std::size_t> order_;
  std::vector<int> tenant_;
  std::vector<std::int64_t> suffix_;
  std::int64_t max_cap_ = 0;
  std::int64_t grid_ = 1;
  std::vector<Cents> cover_;
  std::size_t best_rate_ = 0;

  std::vector<Box> boxes_;
  std::vector<int> assign_;
  std::size_t mixed_ = 0;
  std::uint64_t nodes_ = 0;
  bool timed_out_ = false;

  std::vector<int> best_assign_;
  Cents best_cost_ = 0;
  std::size_t best_mixed_ = 0;
  bool have_best_ = false;
};

}  // namespace

ExactResult solve_exact(const ProblemInstance& inst, const ExactOptions& options) {
  if (inst.items.size() > options.item_cap && !options.override_cap) {
    throw Error(ErrorCode::kTooLarge, std::to_string(inst.items.size()) +
                                          " items exceed the exact solver cap of " +
                                          std::to_string(options.item_cap));
  }
  std::vector<std::size_t> original;
  ProblemInstance norm = normalized_instance(inst, &original);
  if (norm.max_containers == 0) norm.max_containers = default_container_bound(norm);
  if (norm.max_items_per_container == 0) {
    norm.max_items_per_container = std::max<std::size_t>(1, norm.items.size());
  }

  BranchAndBound bb(norm, options);
  try {
    SearchConfig cfg;
    cfg.max_transformations = 2000;
    SearchResult seed = local_search(norm, cfg);
    bb.seed(seed.placement, seed.cost);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInfeasible && e.code() != ErrorCode::kItemTooLarge) throw;
  }

  ExactResult result;
  result.proven_optimal = bb.run();
  result.nodes = bb.nodes();
  if (!bb.found()) {
    throw Error(ErrorCode::kInfeasible,
                result.proven_optimal
                    ? "no placement fits into " + std::to_string(norm.max_containers) + " containers"
                    : "no placement found within the time budget");
  }
  result.placement = bb.best_placement();
  for (int& v : result.placement.container_variant) {
    v = static_cast<int>(original[static_cast<std::size_t>(v)]);
  }
  result.cost = bb.best_cost();
  return result;
}

}  // namespace cepp

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

#include "cepp/heuristic.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "cepp/error.hpp"

namespace cepp {

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection on the short final interval keeps the draw unbiased.
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

namespace {

// a.cost / a.cap < b.cost / b.cap without division.
int compare_rate(const ContainerVariant& a, const ContainerVariant& b) {
  __int128 lhs = static_cast<__int128>(a.cost) * b.cap_mb;
  __int128 rhs = static_cast<__int128>(b.cost) * a.cap_mb;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

std::vector<std::size_t> efficiency_indices(const std::vector<ContainerVariant>& variants) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    if (variants[i].cap_mb > 0) idx.push_back(i);
  }
  if (idx.empty()) {
    throw Error(ErrorCode::kEmptyCatalog, "catalog has no variant with positive capacity");
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = variants[x];
    const auto& b = variants[y];
    int r = compare_rate(a, b);
    if (r != 0) return r < 0;
    if (a.cap_mb != b.cap_mb) return a.cap_mb < b.cap_mb;
    return a.id < b.id;
  });
  return idx;
}

std::vector<std::size_t> pruned_indices(const std::vector<ContainerVariant>& variants) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const auto& v = variants[i];
    if (v.is_zero()) {
      keep.push_back(i);
      continue;
    }
    bool dominated = false;
    for (std::size_t k = 0; k < variants.size() && !dominated; ++k) {
      if (k == i) continue;
      const auto& w = variants[k];
      if (w.cap_mb < v.cap_mb || w.cost > v.cost) continue;
      if (w.cap_mb > v.cap_mb || w.cost < v.cost) {
        dominated = true;
      } else if (w.id < v.id || (w.id == v.id && k < i)) {
        dominated = true;  // exact duplicate, keep the first by id
      }
    }
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

}  // namespace

std::vector<ContainerVariant> efficiency_order(const std::vector<ContainerVariant>& variants) {
  std::vector<ContainerVariant> out;
  for (std::size_t i : efficiency_indices(variants)) out.push_back(variants[i]);
  return out;
}

std::vector<ContainerVariant> prune_dominated_variants(
    const std::vector<ContainerVariant>& variants) {
  std::vector<ContainerVariant> out;
  for (std::size_t i : pruned_indices(variants)) out.push_back(variants[i]);
  return out;
}

std::vector<std::size_t> normalized_variant_order(const std::vector<ContainerVariant>& variants) {
  auto idx = pruned_indices(variants);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = variants[a];
    const auto& y = variants[b];
    if (x.is_zero() != y.is_zero()) return x.is_zero();
    if (x.cap_mb != y.cap_mb) return x.cap_mb < y.cap_mb;
    return x.id < y.id;
  });
  // Several zero variants collapse into one.
  std::vector<std::size_t> out;
  for (std::size_t i : idx) {
    if (variants[i].is_zero() && !out.empty()) continue;
    out.push_back(i);
  }
  if (out.empty() || !variants[out.front()].is_zero()) {
    throw Error(ErrorCode::kInvalidArgument, "variant list lacks the zero variant");
  }
  return out;
}

ProblemInstance normalized_instance(const ProblemInstance& inst,
                                    std::vector<std::size_t>* original) {
  auto order = normalized_variant_order(inst.variants);
  ProblemInstance out = inst;
  out.variants.clear();
  for (std::size_t i : order) out.variants.push_back(inst.variants[i]);
  if (original) *original = std::move(order);
  return out;
}

std::string_view to_string(Transformation t) {
  switch (t) {
    case Transformation::kMove:
      return "move";
    case Transformation::kSwap:
      return "swap";
    case Transformation::kShrink:
      return "shrink";
  }
  return "move";
}

std::optional<Transformation> parse_transformation(std::string_view text) {
  for (auto t : {Transformation::kMove, Transformation::kSwap, Transformation::kShrink}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// SearchState

SearchState::SearchState(const ProblemInstance& normalized) : inst_(&normalized) {
  std::vector<std::string> names;
  for (const auto& it : normalized.items) names.push_back(it.tenant);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  tenant_names_ = names;
  for (std::size_t t = 0; t < names.size(); ++t) tenant_ids_[names[t]] = static_cast<int>(t);
  for (const auto& it : normalized.items) item_tenant_.push_back(tenant_ids_.at(it.tenant));
  item_container_.assign(normalized.items.size(), kNone);
  item_slot_.assign(normalized.items.size(), kNone);
  tenant_exclusive_.resize(names.size());
  group_items_.resize(names.size() + 1);
}

const std::vector<std::size_t>& SearchState::tenant_containers(int tenant) const {
  return tenant_exclusive_.at(static_cast<std::size_t>(tenant));
}

int SearchState::tenant_index(const std::string& tenant) const {
  auto it = tenant_ids_.find(tenant);
  return it == tenant_ids_.end() ? -1 : it->second;
}

std::int64_t SearchState::capacity_of(std::size_t container) const {
  return inst_->variants[static_cast<std::size_t>(containers_[container].variant)].cap_mb;
}

std::size_t SearchState::open_container(int variant, bool shareable, int tenant) {
  std::size_t id = containers_.size();
  containers_.push_back({variant, shareable, shareable ? -1 : tenant, 0, 0});
  if (shareable) {
    container_slot_.push_back(shareable_.size());
    shareable_.push_back(id);
  } else {
    auto& list = tenant_exclusive_.at(static_cast<std::size_t>(tenant));
    container_slot_.push_back(list.size());
    list.push_back(id);
  }
  cost_ += inst_->variants[static_cast<std::size_t>(variant)].cost;
  return id;
}

int SearchState::group_of(std::size_t container) const {
  const auto& c = containers_[container];
  return c.shareable ? 0 : 1 + c.tenant;
}

void SearchState::group_insert(int group, std::size_t item) {
  auto& list = group_items_[static_cast<std::size_t>(group)];
  item_slot_[item] = list.size();
  list.push_back(item);
}

void SearchState::group_erase(int group, std::size_t item) {
  auto& list = group_items_[static_cast<std::size_t>(group)];
  std::size_t slot = item_slot_[item];
  std::size_t last = list.back();
  list[slot] = last;
  item_slot_[last] = slot;
  list.pop_back();
  item_slot_[item] = kNone;
}

void SearchState::place(std::size_t item, std::size_t container) {
  item_container_[item] = container;
  containers_[container].load_mb += inst_->items[item].cap_mb;
  containers_[container].count += 1;
  group_insert(group_of(container), item);
}

Candidate SearchState::propose(Transformation kind, Rng& rng) const {
  switch (kind) {
    case Transformation::kMove:
      return propose_move(rng);
    case Transformation::kSwap:
      return propose_swap(rng);
    case Transformation::kShrink:
      return propose_shrink(rng);
  }
  return {};
}

Candidate SearchState::propose_move(Rng& rng) const {
  Candidate c;
  c.kind = Transformation::kMove;
  const std::size_t f = inst_->items.size();
  if (f == 0) return c;
  std::size_t i = rng.below(f);
  std::size_t cur = item_container_[i];
  if (cur == kNone) return c;
  const auto& own = tenant_exclusive_[static_cast<std::size_t>(item_tenant_[i])];
  const std::size_t shared = inst_->items[i].shareable ? shareable_.size() : 0;
  const std::size_t total = own.size() + shared;
  if (total <= 1) return c;
  std::size_t pos = containers_[cur].shareable ? own.size() + container_slot_[cur]
                                               : container_slot_[cur];
  std::size_t r = rng.below(total - 1);
  if (r >= pos) ++r;
  c.noop = false;
  c.item = i;
  c.container = cur;
  c.target = r < own.size() ? own[r] : shareable_[r - own.size()];
  return c;
}

Candidate SearchState::propose_swap(Rng& rng) const {
  Candidate c;
  c.kind = Transformation::kSwap;
  const std::size_t f = inst_->items.size();
  if (f < 2) return c;
  std::size_t i = rng.below(f);
  std::size_t ci = item_container_[i];
  if (ci == kNone) return c;
  const auto& group = group_items_[static_cast<std::size_t>(group_of(ci))];
  if (group.size() < 2) return c;
  std::size_t partner = kNone;
  for (int attempt = 0; attempt < 8 && partner == kNone; ++attempt) {
    std::size_t j = group[rng.below(group.size())];
    if (item_container_[j] != ci) partner = j;
  }
  if (partner == kNone) {
    std::vector<std::size_t> others;
    for (std::size_t j : group) {
      if (item_container_[j] != ci) others.push_back(j);
    }
    if (others.empty()) return c;
    partner = others[rng.below(others.size())];
  }
  c.noop = false;
  c.item = i;
  c.other_item = partner;
  c.container = ci;
  c.target = item_container_[partner];
  return c;
}

Candidate SearchState::propose_shrink(Rng& rng) const {
  Candidate c;
  c.kind = Transformation::kShrink;
  if (containers_.empty()) return c;
  std::size_t k = rng.below(containers_.size());
  if (containers_[k].variant == 0) return c;
  c.noop = false;
  c.container = k;
  c.new_variant = containers_[k].variant - 1;
  return c;
}

bool SearchState::feasible(const Candidate& c) const {
  if (c.noop) return false;
  const auto& items = inst_->items;
  const std::size_t q = inst_->max_items_per_container == 0
                            ? items.size()
                            : inst_->max_items_per_container;
  switch (c.kind) {
    case Transformation::kMove: {
      const auto& t = containers_[c.target];
      const auto& it = items[c.item];
      if (t.shareable ? !it.shareable : t.tenant != item_tenant_[c.item]) return false;
      return t.load_mb + it.cap_mb <= capacity_of(c.target) && t.count + 1 <= q;
    }
    case Transformation::kSwap: {
      const auto& a = items[c.item];
      const auto& b = items[c.other_item];
      return containers_[c.container].load_mb - a.cap_mb + b.cap_mb <= capacity_of(c.container) &&
             containers_[c.target].load_mb - b.cap_mb + a.cap_mb <= capacity_of(c.target);
    }
    case Transformation::kShrink:
      return containers_[c.container].load_mb <=
             inst_->variants[static_cast<std::size_t>(c.new_variant)].cap_mb;
  }
  return false;
}

Cents SearchState::cost_after(const Candidate& c) const {
  if (c.noop || c.kind != Transformation::kShrink) return cost_;
  const auto& v = inst_->variants;
  return cost_ - v[static_cast<std::size_t>(containers_[c.container].variant)].cost +
         v[static_cast<std::size_t>(c.new_variant)].cost;
}

void SearchState::apply(const Candidate& c) {
  if (c.noop) return;
  const auto& items = inst_->items;
  switch (c.kind) {
    case Transformation::kMove: {
      int from_group = group_of(c.container);
      int to_group = group_of(c.target);
      containers_[c.container].load_mb -= items[c.item].cap_mb;
      containers_[c.container].count -= 1;
      containers_[c.target].load_mb += items[c.item].cap_mb;
      containers_[c.target].count += 1;
      item_container_[c.item] = c.target;
      if (from_group != to_group) {
        group_erase(from_group, c.item);
        group_insert(to_group, c.item);
      }
      break;
    }
    case Transformation::kSwap: {
      std::int64_t a = items[c.item].cap_mb;
      std::int64_t b = items[c.other_item].cap_mb;
      containers_[c.container].load_mb += b - a;
      containers_[c.target].load_mb += a - b;
      item_container_[c.item] = c.target;
      item_container_[c.other_item] = c.container;
      break;
    }
    case Transformation::kShrink:
      cost_ = cost_after(c);
      containers_[c.container].variant = c.new_variant;
      break;
  }
}

Placement SearchState::to_placement(std::size_t containers) const {
  Placement p;
  for (std::size_t c : item_container_) {
    p.item_container.push_back(c == kNone ? -1 : static_cast<int>(c));
  }
  for (const auto& c : containers_) p.container_variant.push_back(c.variant);
  while (p.container_variant.size() < containers) p.container_variant.push_back(0);
  return p;
}

bool SearchState::caches_consistent() const {
  std::vector<std::int64_t> load(containers_.size(), 0);
  std::vector<std::size_t> count(containers_.size(), 0);
  for (std::size_t i = 0; i < item_container_.size(); ++i) {
    std::size_t c = item_container_[i];
    if (c == kNone) continue;
    load[c] += inst_->items[i].cap_mb;
    count[c] += 1;
    const auto& group = group_items_[static_cast<std::size_t>(group_of(c))];
    if (item_slot_[i] >= group.size() || group[item_slot_[i]] != i) return false;
  }
  Cents cost = 0;
  for (std::size_t c = 0; c < containers_.size(); ++c) {
    if (load[c] != containers_[c].load_mb || count[c] != containers_[c].count) return false;
    cost += inst_->variants[static_cast<std::size_t>(containers_[c].variant)].cost;
  }
  return cost == cost_;
}

// ---------------------------------------------------------------------------
// FFD and search

SearchState ffd_initial(const ProblemInstance& normalized) {
  SearchState s(normalized);
  const auto& items = normalized.items;
  if (items.empty()) return s;
  const auto order = efficiency_indices(normalized.variants);
  const std::size_t q = normalized.max_items_per_container == 0
                            ? items.size()
                            : normalized.max_items_per_container;

  // Sub-problems: all shareable items, then each tenant's non-shareable ones.
  std::vector<std::vector<std::size_t>> groups(1 + s.tenant_count());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].shareable) {
      groups[0].push_back(i);
    } else {
      groups[1 + static_cast<std::size_t>(s.tenant_index(items[i].tenant))].push_back(i);
    }
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& list = groups[g];
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      if (items[a].cap_mb != items[b].cap_mb) return items[a].cap_mb > items[b].cap_mb;
      if (items[a].id != items[b].id) return items[a].id < items[b].id;
      return a < b;
    });
    const bool shareable = g == 0;
    const int tenant = shareable ? -1 : static_cast<int>(g) - 1;
    std::vector<std::size_t> opened;
    for (std::size_t i : list) {
      const std::int64_t need = items[i].cap_mb;
      std::size_t target = SearchState::kNone;
      for (std::size_t c : opened) {
        const auto& sc = s.containers()[c];
        if (s.capacity_of(c) - sc.load_mb >= need && sc.count < q) {
          target = c;
          break;
        }
      }
      if (target == SearchState::kNone) {
        auto fit = std::find_if(order.begin(), order.end(), [&](std::size_t v) {
          return normalized.variants[v].cap_mb >= need;
        });
        if (fit == order.end()) {
          throw Error(ErrorCode::kItemTooLarge,
                      "item " + items[i].id + " (" + std::to_string(need) +
                          " MB) exceeds every container variant");
        }
        target = s.open_container(static_cast<int>(*fit), shareable, tenant);
        opened.push_back(target);
      }
      s.place(i, target);
    }
  }
  return s;
}

namespace {

SearchState transformed(const SearchState& s, Rng& rng, Transformation kind) {
  SearchState out = s;
  out.apply(out.propose(kind, rng));
  return out;
}

}  // namespace

SearchState transform_move(const SearchState& s, Rng& rng) {
  return transformed(s, rng, Transformation::kMove);
}

SearchState transform_swap(const SearchState& s, Rng& rng) {
  return transformed(s, rng, Transformation::kSwap);
}

SearchState transform_shrink(const SearchState& s, Rng& rng) {
  return transformed(s, rng, Transformation::kShrink);
}

SearchResult local_search(const ProblemInstance& inst, const SearchConfig& cfg) {
  std::vector<std::size_t> original;
  const ProblemInstance norm = normalized_instance(inst, &original);
  SearchState state = ffd_initial(norm);
  if (inst.max_containers != 0 && state.containers().size() > inst.max_containers) {
    throw Error(ErrorCode::kInfeasible,
                "initial solution needs " + std::to_string(state.containers().size()) +
                    " containers, limit is " + std::to_string(inst.max_containers));
  }
  if (cfg.cycle.empty() && cfg.max_transformations > 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty transformation cycle");
  }

  SearchResult result;
  result.stats.initial_cost = state.cost();
  Rng rng(cfg.rng_seed);
  std::uint64_t used = 0;
  while (used < cfg.max_transformations) {
    for (Transformation kind : cfg.cycle) {
      if (used >= cfg.max_transformations) break;
      ++used;
      Candidate c = state.propose(kind, rng);
      if (c.noop) {
        ++result.stats.noops;
        continue;
      }
      if (!state.feasible(c) || state.cost_after(c) > state.cost()) continue;
      state.apply(c);
      ++result.stats.accepted;
      if (cfg.verify_each_step) {
        if (!state.caches_consistent()) {
          throw std::logic_error("search caches diverged after " +
                                 std::string(to_string(kind)));
        }
        auto report = check_feasible(state.to_placement(), norm);
        if (!report.is_correct()) {
          throw std::logic_error("accepted infeasible state: " +
                                 report.violations.front().code);
        }
      }
      if (cfg.on_accept) cfg.on_accept(state, kind);
    }
  }
  result.stats.attempted = used;

  Placement p = state.to_placement(inst.max_containers);
  for (int& v : p.container_variant) v = static_cast<int>(original[static_cast<std::size_t>(v)]);
  result.placement = std::move(p);
  result.cost = state.cost();
  return result;
}

}  // namespace cepp

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


#include "cepp/pricing.hpp"

#include <algorithm>

#include "cepp/error.hpp"
#include "cepp/heuristic.hpp"
#include "cepp/workload.hpp"

namespace cepp {

PricingContext::PricingContext(Catalog catalog, std::vector<PlacementItem> background,
                               std::uint64_t seed, std::uint64_t max_transformations)
    : catalog_(normalize(catalog)),
      background_(std::move(background)),
      seed_(seed),
      max_transformations_(max_transformations) {
  background_cost_ = solve(background_);
}

Cents PricingContext::solve(const std::vector<PlacementItem>& items) const {
  if (items.empty()) return 0;
  try {
    ProblemInstance inst = make_instance(items, catalog_.variants);
    SearchConfig cfg;
    cfg.max_transformations = max_transformations_;
    cfg.rng_seed = seed_;
    return local_search(inst, cfg).cost;
  } catch (const Error& e) {
    throw Error(ErrorCode::kPricingUnavailable, e.what());
  }
}

PriceBreakdown PricingContext::price_items(const std::vector<PlacementItem>& items) const {
  PriceBreakdown b;
  std::vector<PlacementItem> all = background_;
  all.insert(all.end(), items.begin(), items.end());
  b.with = solve(all);
  b.without = background_cost_;
  b.standalone = solve(items);
  b.cost = std::max(b.with - b.without, b.standalone);
  return b;
}

PriceBreakdown PricingContext::price_graphs(const std::vector<Ipcg>& graphs) const {
  std::vector<PlacementItem> items;
  items.reserve(graphs.size());
  try {
    for (std::size_t k = 0; k < graphs.size(); ++k) {
      items.push_back(flatten_graph(graphs[k], k));
      items.back().cap_mb *= catalog_.item_unit_mb;
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::kPricingUnavailable, e.what());
  }
  return price_items(items);
}

Cents PricingContext::price(const Ipcg& g) const { return price_graphs({g}).cost; }

Pricer PricingContext::pricer() const {
  return [this](const std::vector<Ipcg>& graphs) { return price_graphs(graphs).cost; };
}

}  // namespace cepp

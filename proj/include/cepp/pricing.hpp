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


// Per-process cost: the marginal cost of adding a process to a background
// workload, never less than what the process costs on its own.

#ifndef CEPP_PRICING_HPP
#define CEPP_PRICING_HPP

#include <cstdint>
#include <vector>

#include "cepp/catalog.hpp"
#include "cepp/ipcg.hpp"
#include "cepp/model.hpp"
#include "cepp/rewrite.hpp"

namespace cepp {

struct PriceBreakdown {
  Cents with = 0;
  Cents without = 0;
  Cents standalone = 0;
  /// max(with - without, standalone)
  Cents cost = 0;
};

/// Immutable after construction; safe to share between threads.
class PricingContext {
 public:
  PricingContext(Catalog catalog, std::vector<PlacementItem> background, std::uint64_t seed = 1,
                 std::uint64_t max_transformations = 10000);

  const Catalog& catalog() const { return catalog_; }
  const std::vector<PlacementItem>& background() const { return background_; }
  std::uint64_t seed() const { return seed_; }
  Cents background_cost() const { return background_cost_; }

  /// All placements are solved with local_search under the pinned seed.
  /// Throws Error(kPricingUnavailable) if the items cannot be placed.
  PriceBreakdown price_items(const std::vector<PlacementItem>& items) const;
  PriceBreakdown price_graphs(const std::vector<Ipcg>& graphs) const;
  Cents price(const Ipcg& g) const;

  Pricer pricer() const;

 private:
  Cents solve(const std::vector<PlacementItem>& items) const;

  Catalog catalog_;
  std::vector<PlacementItem> background_;
  std::uint64_t seed_;
  std::uint64_t max_transformations_;
  Cents background_cost_ = 0;
};

}  // namespace cepp

#endif  // CEPP_PRICING_HPP

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


// Branch and bound for small placement instances. Serves as the optimality
// reference for the heuristic.

#ifndef CEPP_EXACT_HPP
#define CEPP_EXACT_HPP

#include <chrono>
#include <cstdint>

#include "cepp/model.hpp"

namespace cepp {

struct ExactOptions {
  std::chrono::milliseconds budget{std::chrono::seconds(10)};
  /// Instances with more items are refused with Error(kTooLarge).
  std::size_t item_cap = 20;
  bool override_cap = false;
};

struct ExactResult {
  Placement placement;
  Cents cost = 0;
  /// False when the budget ran out first; the placement is then the best
  /// one found.
  bool proven_optimal = false;
  std::uint64_t nodes = 0;
};

/// Among cost-minimal placements the one with the fewest shareable items
/// next to a non-shareable item is returned. Throws Error(kInfeasible) when
/// no placement fits into inst.max_containers containers.
ExactResult solve_exact(const ProblemInstance& inst, const ExactOptions& options = {});

}  // namespace cepp

#endif  // CEPP_EXACT_HPP

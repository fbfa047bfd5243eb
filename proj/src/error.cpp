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

#include "cepp/error.hpp"

namespace cepp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kDuplicateVariantId:
      return "DuplicateVariantId";
    case ErrorCode::kMatchStale:
      return "MatchStale";
    case ErrorCode::kPostConditionViolated:
      return "PostConditionViolated";
    case ErrorCode::kInfeasible:
      return "Infeasible";
    case ErrorCode::kTooLarge:
      return "TooLarge";
    case ErrorCode::kItemTooLarge:
      return "ItemTooLarge";
    case ErrorCode::kEmptyCatalog:
      return "EmptyCatalog";
    case ErrorCode::kPricingUnavailable:
      return "PricingUnavailable";
    case ErrorCode::kUnassignedTenant:
      return "UnassignedTenant";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace cepp

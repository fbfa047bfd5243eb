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


#ifndef CEPP_MONEY_HPP
#define CEPP_MONEY_HPP

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace cepp {

/// Monthly cost in euro cents. All cost arithmetic is done on integers.
using Cents = std::int64_t;

inline Cents cents_from_eur(double eur) {
  return static_cast<Cents>(std::llround(eur * 100.0));
}

inline double eur_from_cents(Cents c) { return static_cast<double>(c) / 100.0; }

/// "50.00", "-3.05"
inline std::string format_eur(Cents c) {
  std::string sign = c < 0 ? "-" : "";
  Cents a = c < 0 ? -c : c;
  std::string frac = std::to_string(a % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return sign + std::to_string(a / 100) + "." + frac;
}

}  // namespace cepp

#endif  // CEPP_MONEY_HPP

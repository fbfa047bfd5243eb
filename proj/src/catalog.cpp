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


#include "cepp/catalog.hpp"

#include <set>

#include "cepp/error.hpp"
#include "cepp/heuristic.hpp"

namespace cepp {

namespace fs = std::filesystem;

Catalog catalog_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, where + ": expected an object");
  Catalog c;
  if (auto it = j.find("source"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::kParseError, where + ".source: expected a string");
    c.source = it->get<std::string>();
  }
  auto vs = j.find("variants");
  if (vs == j.end() || !vs->is_array()) {
    throw Error(ErrorCode::kParseError, where + ".variants: expected an array");
  }
  if (auto it = j.find("item_unit_mb"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<long long>() <= 0) {
      throw Error(ErrorCode::kParseError, where + ".item_unit_mb: expected a positive integer");
    }
    c.item_unit_mb = it->get<std::int64_t>();
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < vs->size(); ++i) {
    ContainerVariant v = variant_from_json((*vs)[i], where + ".variants[" + std::to_string(i) + "]");
    if (!ids.insert(v.id).second) {
      throw Error(ErrorCode::kDuplicateVariantId, where + ": duplicate variant id " + v.id);
    }
    c.variants.push_back(std::move(v));
  }
  std::size_t zeros = 0;
  for (const auto& v : c.variants) zeros += v.is_zero() ? 1 : 0;
  if (zeros > 1) throw Error(ErrorCode::kParseError, where + ": more than one zero-cost variant");
  if (zeros == 0) {
    if (ids.count(std::string(kZeroVariantId))) {
      throw Error(ErrorCode::kDuplicateVariantId,
                  where + ": variant id \"zero\" is reserved for the zero-cost variant");
    }
    c.variants.push_back(zero_variant());
  }
  return c;
}

Json catalog_to_json(const Catalog& c) {
  Json j;
  j["source"] = c.source;
  j["currency"] = kCurrency;
  if (c.item_unit_mb != 1) j["item_unit_mb"] = c.item_unit_mb;
  Json vs = Json::array();
  for (const auto& v : c.variants) vs.push_back(variant_to_json(v));
  j["variants"] = std::move(vs);
  return j;
}

Catalog load_catalog(const fs::path& path) {
  Catalog c = catalog_from_json(read_json_file(path), path.filename().string());
  if (c.source.empty()) c.source = path.filename().string();
  return c;
}

Catalog normalize(const Catalog& c) {
  Catalog out;
  out.source = c.source;
  out.item_unit_mb = c.item_unit_mb;
  for (std::size_t i : normalized_variant_order(c.variants)) out.variants.push_back(c.variants[i]);
  return out;
}

std::map<std::string, Catalog> load_catalog_dir(const fs::path& dir) {
  constexpr std::string_view kSuffix = ".catalog.json";
  std::map<std::string, Catalog> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || name.size() <= kSuffix.size() ||
        name.compare(name.size() - kSuffix.size(), kSuffix.size(), kSuffix) != 0) {
      continue;
    }
    out.emplace(name.substr(0, name.size() - kSuffix.size()), load_catalog(entry.path()));
  }
  return out;
}

}  // namespace cepp

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


#include "cepp/workload.hpp"

#include <algorithm>
#include <cmath>

#include "cepp/error.hpp"
#include "cepp/heuristic.hpp"
#include "cepp/ipcg_json.hpp"
#include "cepp/rewrite.hpp"

namespace cepp {

namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kMinGeneratedMb = 64;

[[noreturn]] void bad(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::kParseError, where + ": " + msg);
}

std::size_t count_field(const Json& j, const char* key, std::size_t fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
    bad(std::string("generator.") + key, "expected a non-negative integer");
  }
  return it->get<std::size_t>();
}

double number_field(const Json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_number()) bad(std::string("generator.") + key, "expected a number");
  return it->get<double>();
}

}  // namespace

const std::string& entry_tenant(const WorkloadEntry& e) {
  if (const auto* it = std::get_if<PlacementItem>(&e)) return it->tenant;
  return std::get<Ipcg>(e).tenant();
}

std::set<std::string> Workload::tenants() const {
  std::set<std::string> out;
  for (const auto& e : entries) out.insert(entry_tenant(e));
  return out;
}

Workload workload_from_json(const Json& j) {
  if (!j.is_object()) bad("workload", "expected an object");
  Workload w;
  if (auto it = j.find("region"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) bad("workload.region", "expected a string or null");
    w.region = it->get<std::string>();
  }
  auto items = j.find("items");
  if (items == j.end() || !items->is_array()) bad("workload.items", "expected an array");
  for (std::size_t k = 0; k < items->size(); ++k) {
    const Json& e = (*items)[k];
    const std::string where = "workload.items[" + std::to_string(k) + "]";
    if (!e.is_object()) bad(where, "expected an object");
    if (auto g = e.find("ipcg"); g != e.end()) {
      try {
        w.entries.emplace_back(ipcg_from_json(*g));
      } catch (const Error& err) {
        bad(where + ".ipcg", err.what());
      }
    } else {
      w.entries.emplace_back(item_from_json(e, where));
    }
  }
  return w;
}

Json workload_to_json(const Workload& w) {
  Json j;
  j["region"] = w.region ? Json(*w.region) : Json(nullptr);
  Json items = Json::array();
  for (const auto& e : w.entries) {
    if (const auto* it = std::get_if<PlacementItem>(&e)) {
      items.push_back(item_to_json(*it));
    } else {
      Json g;
      g["ipcg"] = ipcg_to_json(std::get<Ipcg>(e));
      items.push_back(std::move(g));
    }
  }
  j["items"] = std::move(items);
  return j;
}

Workload load_workload(const fs::path& path) { return workload_from_json(read_json_file(path)); }

GeneratorSpec generator_spec_from_json(const Json& j) {
  if (!j.is_object()) bad("generator", "expected an object");
  GeneratorSpec s;
  s.tenant_count = count_field(j, "tenant_count", s.tenant_count);
  if (auto it = j.find("processes_per_tenant"); it != j.end() && !it->is_null()) {
    if (it->is_number()) {
      s.processes_min = s.processes_max = count_field(j, "processes_per_tenant", 1);
    } else if (it->is_array() && it->size() == 2 && (*it)[0].is_number_unsigned() &&
               (*it)[1].is_number_unsigned()) {
      s.processes_min = (*it)[0].get<std::size_t>();
      s.processes_max = (*it)[1].get<std::size_t>();
    } else {
      bad("generator.processes_per_tenant", "expected a count or a [min, max] pair");
    }
  }
  if (auto it = j.find("processes_by_tenant"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) bad("generator.processes_by_tenant", "expected an array");
    for (const auto& n : *it) {
      if (!n.is_number_unsigned()) bad("generator.processes_by_tenant", "expected counts");
      s.processes_per_tenant.push_back(n.get<std::size_t>());
    }
  }
  s.cap_mean_mb = number_field(j, "cap_mean_mb", s.cap_mean_mb);
  s.cap_spread_mb = number_field(j, "cap_spread_mb", s.cap_spread_mb);
  if (auto it = j.find("fixed_caps"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) bad("generator.fixed_caps", "expected an array");
    for (const auto& c : *it) {
      if (!c.is_number_integer() || c.get<long long>() <= 0) {
        bad("generator.fixed_caps", "expected positive integers");
      }
      s.fixed_caps.push_back(c.get<std::int64_t>());
    }
  }
  s.cap_unit_mb = static_cast<std::int64_t>(count_field(j, "cap_unit_mb", 1));
  s.non_shareable_ratio = number_field(j, "non_shareable_ratio", 0);
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) bad("generator.seed", "expected a non-negative integer");
    s.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("region"); it != j.end() && it->is_string()) s.region = it->get<std::string>();
  if (!(s.non_shareable_ratio >= 0 && s.non_shareable_ratio <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "non_shareable_ratio must lie in [0, 1]");
  }
  return s;
}

Json generator_spec_to_json(const GeneratorSpec& s) {
  Json j;
  j["tenant_count"] = s.tenant_count;
  j["processes_per_tenant"] = Json::array({s.processes_min, s.processes_max});
  if (!s.processes_per_tenant.empty()) j["processes_by_tenant"] = s.processes_per_tenant;
  j["cap_mean_mb"] = s.cap_mean_mb;
  j["cap_spread_mb"] = s.cap_spread_mb;
  if (!s.fixed_caps.empty()) j["fixed_caps"] = s.fixed_caps;
  j["cap_unit_mb"] = s.cap_unit_mb;
  j["non_shareable_ratio"] = s.non_shareable_ratio;
  j["seed"] = s.seed;
  j["region"] = s.region ? Json(*s.region) : Json(nullptr);
  return j;
}

Workload generate(const GeneratorSpec& spec) {
  if (!(spec.non_shareable_ratio >= 0 && spec.non_shareable_ratio <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "non_shareable_ratio must lie in [0, 1]");
  }
  if (spec.processes_min > spec.processes_max) {
    throw Error(ErrorCode::kInvalidArgument, "processes_min exceeds processes_max");
  }
  Rng rng(spec.seed);
  Workload w;
  w.region = spec.region;
  std::size_t drawn = 0;
  for (std::size_t t = 0; t < spec.tenant_count; ++t) {
    std::size_t n = 0;
    if (t < spec.processes_per_tenant.size()) {
      n = spec.processes_per_tenant[t];
    } else {
      n = spec.processes_min + rng.below(spec.processes_max - spec.processes_min + 1);
    }
    for (std::size_t m = 0; m < n; ++m, ++drawn) {
      PlacementItem it;
      it.tenant = "t" + std::to_string(t + 1);
      it.id = it.tenant + ".p" + std::to_string(m + 1);
      if (!spec.fixed_caps.empty()) {
        it.cap_mb = spec.fixed_caps[drawn % spec.fixed_caps.size()] * spec.cap_unit_mb;
      } else {
        const double raw = spec.cap_mean_mb + spec.cap_spread_mb * (2.0 * rng.unit() - 1.0);
        it.cap_mb = std::max<std::int64_t>(kMinGeneratedMb, std::llround(raw));
      }
      it.shareable = rng.unit() >= spec.non_shareable_ratio;
      w.entries.emplace_back(std::move(it));
    }
  }
  return w;
}

RegionMap region_map_from_json(const Json& j) {
  if (!j.is_object()) bad("regions", "expected an object of tenant -> region");
  RegionMap m;
  for (const auto& [tenant, region] : j.items()) {
    if (!region.is_string()) bad("regions." + tenant, "expected a string");
    m.emplace(tenant, region.get<std::string>());
  }
  return m;
}

std::map<std::string, Workload> partition_by_region(const Workload& w,
                                                    const RegionMap& assignment) {
  for (const auto& t : w.tenants()) {
    if (!assignment.count(t)) {
      throw Error(ErrorCode::kUnassignedTenant, "tenant " + t + " has no region");
    }
  }
  std::map<std::string, Workload> out;
  for (const auto& e : w.entries) {
    const std::string& region = assignment.at(entry_tenant(e));
    Workload& part = out[region];
    part.region = region;
    part.entries.push_back(e);
  }
  return out;
}

PlacementItem flatten_graph(const Ipcg& g, std::size_t index) {
  ValidationReport report = validate_ipcg(g);
  if (!report.is_correct()) {
    std::string msg = "graph " + (g.id().empty() ? std::to_string(index) : g.id()) + " is invalid:";
    for (const auto& v : report.violations) msg += " " + v.code + "(" + v.ref + ")";
    throw Error(ErrorCode::kInvalidArgument, msg);
  }
  PlacementItem it;
  it.id = g.id().empty() ? "process" + std::to_string(index) : g.id();
  it.cap_mb = static_cast<std::int64_t>(std::ceil(process_capacity(g) - 1e-9));
  it.tenant = g.tenant();
  it.shareable = process_shareable(g);
  if (!g.id().empty()) it.origin = g.id();
  return it;
}

ProblemInstance flatten(const Workload& w, const Catalog& catalog) {
  std::vector<PlacementItem> items;
  items.reserve(w.entries.size());
  for (std::size_t k = 0; k < w.entries.size(); ++k) {
    if (const auto* it = std::get_if<PlacementItem>(&w.entries[k])) {
      items.push_back(*it);
    } else {
      items.push_back(flatten_graph(std::get<Ipcg>(w.entries[k]), k));
    }
    items.back().cap_mb *= catalog.item_unit_mb;
  }
  return make_instance(std::move(items), normalize(catalog).variants);
}

WorkloadCut decompose_workload(const Workload& w) {
  WorkloadCut out;
  out.workload.region = w.region;
  for (const auto& e : w.entries) {
    const auto* g = std::get_if<Ipcg>(&e);
    if (!g) {
      out.workload.entries.push_back(e);
      continue;
    }
    RewriteResult r = decompose(*g);
    if (r.graphs.size() > 1) {
      ++out.cut_graphs;
      out.cut_edges += r.remote_links.size();
    }
    for (auto& part : r.graphs) out.workload.entries.emplace_back(std::move(part));
  }
  return out;
}

std::map<std::string, Workload> load_workload_dir(const fs::path& dir) {
  constexpr std::string_view kSuffix = ".workload.json";
  std::map<std::string, Workload> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || name.size() <= kSuffix.size() ||
        name.compare(name.size() - kSuffix.size(), kSuffix.size(), kSuffix) != 0) {
      continue;
    }
    Workload w = load_workload(entry.path());
    std::string key = w.region ? *w.region : name.substr(0, name.size() - kSuffix.size());
    out.emplace(std::move(key), std::move(w));
  }
  return out;
}

}  // namespace cepp

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

#include "cepp/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "cepp/error.hpp"
#include "cepp/heuristic.hpp"

namespace cepp {

ContainerVariant zero_variant() {
  ContainerVariant v;
  v.id = std::string(kZeroVariantId);
  v.vendor = "none";
  return v;
}

std::optional<std::size_t> zero_variant_index(const std::vector<ContainerVariant>& variants) {
  for (std::size_t i = 0; i < variants.size(); ++i) {
    if (variants[i].is_zero()) return i;
  }
  return std::nullopt;
}

ProblemInstance make_instance(std::vector<PlacementItem> items,
                              std::vector<ContainerVariant> variants,
                              std::optional<std::size_t> max_containers,
                              std::optional<std::size_t> max_items) {
  for (const auto& it : items) {
    if (it.cap_mb <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "item " + it.id + " has non-positive capacity");
    }
  }
  std::size_t zeros = 0;
  for (const auto& v : variants) {
    if (v.cap_mb < 0 || v.cost < 0) {
      throw Error(ErrorCode::kInvalidArgument, "variant " + v.id + " is negative");
    }
    if (v.is_zero()) ++zeros;
  }
  if (zeros > 1) {
    throw Error(ErrorCode::kInvalidArgument, "more than one zero-cost variant");
  }
  if (zeros == 0) variants.push_back(zero_variant());

  ProblemInstance inst;
  inst.items = std::move(items);
  inst.variants = std::move(variants);
  if (max_items && *max_items == 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_items_per_container must be at least 1");
  }
  inst.max_items_per_container = max_items.value_or(std::max<std::size_t>(1, inst.items.size()));
  if (max_containers) {
    if (*max_containers == 0) {
      throw Error(ErrorCode::kInvalidArgument, "max_containers must be at least 1");
    }
    inst.max_containers = *max_containers;
  } else {
    inst.max_containers = default_container_bound(inst);
  }
  return inst;
}

bool conflicts(const PlacementItem& a, const PlacementItem& b) {
  return a.tenant != b.tenant && (!a.shareable || !b.shareable);
}

ValidationReport check_feasible(const Placement& p, const ProblemInstance& inst) {
  namespace pv = placement_violation;
  std::vector<Violation> v;
  const std::size_t c_count = p.container_variant.size();
  const std::size_t q = inst.max_items_per_container == 0 ? inst.items.size()
                                                          : inst.max_items_per_container;
  std::vector<std::vector<std::size_t>> members(c_count);
  for (std::size_t i = 0; i < inst.items.size(); ++i) {
    int c = i < p.item_container.size() ? p.item_container[i] : -1;
    if (c < 0) {
      v.push_back({std::string(pv::kUnplacedItem), inst.items[i].id, "item is not placed"});
    } else if (static_cast<std::size_t>(c) >= c_count) {
      v.push_back({std::string(pv::kInvalidContainer), inst.items[i].id,
                   "container " + std::to_string(c) + " does not exist"});
    } else {
      members[static_cast<std::size_t>(c)].push_back(i);
    }
  }
  if (inst.max_containers != 0 && c_count > inst.max_containers) {
    v.push_back({std::string(pv::kInvalidContainer), "",
                 std::to_string(c_count) + " containers exceed the limit of " +
                     std::to_string(inst.max_containers)});
  }
  for (std::size_t c = 0; c < c_count; ++c) {
    const std::string ref = "c" + std::to_string(c);
    int n = p.container_variant[c];
    if (n < 0 || static_cast<std::size_t>(n) >= inst.variants.size()) {
      v.push_back({std::string(pv::kMissingVariant), ref, "container has no variant"});
      continue;
    }
    std::int64_t load = 0;
    for (std::size_t i : members[c]) load += inst.items[i].cap_mb;
    const auto& var = inst.variants[static_cast<std::size_t>(n)];
    if (load > var.cap_mb) {
      v.push_back({std::string(pv::kCapacityExceeded), ref,
                   std::to_string(load) + " MB placed on " + var.id + " with " +
                       std::to_string(var.cap_mb) + " MB"});
    }
    if (members[c].size() > q) {
      v.push_back({std::string(pv::kItemLimitExceeded), ref,
                   std::to_string(members[c].size()) + " items, limit " + std::to_string(q)});
    }
    // Cheap test first: a conflict needs a non-shareable item and a second
    // tenant in the same container.
    std::set<std::string> tenants;
    bool any_hard = false;
    for (std::size_t i : members[c]) {
      tenants.insert(inst.items[i].tenant);
      any_hard = any_hard || !inst.items[i].shareable;
    }
    if (!any_hard || tenants.size() < 2) continue;
    for (std::size_t a = 0; a < members[c].size(); ++a) {
      for (std::size_t b = a + 1; b < members[c].size(); ++b) {
        const auto& x = inst.items[members[c][a]];
        const auto& y = inst.items[members[c][b]];
        if (conflicts(x, y)) {
          v.push_back({std::string(pv::kTenantConflict), ref, x.id + " and " + y.id});
        }
      }
    }
  }
  std::stable_sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.ref, a.code) < std::tie(b.ref, b.code);
  });
  return ValidationReport{std::move(v)};
}

Cents total_cost(const Placement& p, const ProblemInstance& inst) {
  Cents sum = 0;
  for (int n : p.container_variant) {
    if (n >= 0 && static_cast<std::size_t>(n) < inst.variants.size()) {
      sum += inst.variants[static_cast<std::size_t>(n)].cost;
    }
  }
  return sum;
}

std::size_t default_container_bound(const ProblemInstance& inst) {
  try {
    ProblemInstance norm = normalized_instance(inst);
    norm.max_containers = 0;
    return ffd_initial(norm).containers().size() + 1;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kItemTooLarge && e.code() != ErrorCode::kEmptyCatalog) throw;
    // No feasible start exists; any bound will do for reporting infeasibility.
    return std::max<std::size_t>(1, inst.items.size());
  }
}

PricedPlacement hosting_baseline(const ProblemInstance& inst) {
  PricedPlacement out;
  out.placement.item_container.assign(inst.items.size(), -1);
  std::map<std::string, std::vector<std::size_t>> by_tenant;
  for (std::size_t i = 0; i < inst.items.size(); ++i) {
    by_tenant[inst.items[i].tenant].push_back(i);
  }
  std::vector<std::size_t> original;
  ProblemInstance norm = normalized_instance(inst, &original);
  for (const auto& [tenant, idx] : by_tenant) {
    std::int64_t total = 0;
    for (std::size_t i : idx) total += inst.items[i].cap_mb;
    // Normalized variants ascend in capacity and cost, so the first fit is
    // the cheapest.
    std::optional<std::size_t> fit;
    for (std::size_t n = 1; n < norm.variants.size(); ++n) {
      if (norm.variants[n].cap_mb >= total) {
        fit = n;
        break;
      }
    }
    if (fit) {
      int c = static_cast<int>(out.placement.container_variant.size());
      out.placement.container_variant.push_back(static_cast<int>(original[*fit]));
      for (std::size_t i : idx) out.placement.item_container[i] = c;
      continue;
    }
    // The tenant outgrows the largest variant: pack its items on their own.
    ProblemInstance sub = norm;
    sub.items.clear();
    for (std::size_t i : idx) {
      PlacementItem it = inst.items[i];
      it.shareable = false;
      sub.items.push_back(it);
    }
    sub.max_items_per_container = 0;
    SearchState s = ffd_initial(sub);
    int base = static_cast<int>(out.placement.container_variant.size());
    for (const auto& c : s.containers()) {
      out.placement.container_variant.push_back(
          static_cast<int>(original[static_cast<std::size_t>(c.variant)]));
    }
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out.placement.item_container[idx[k]] = base + static_cast<int>(s.container_of(k));
    }
  }
  out.cost = total_cost(out.placement, inst);
  return out;
}

// ---------------------------------------------------------------------------
// LP export

namespace {

class LpRow {
 public:
  explicit LpRow(std::ostringstream& out) : out_(out) {}

  void term(const std::string& coef, const std::string& var, bool negative = false) {
    if (count_ > 0 && count_ % 8 == 0) out_ << "\n   ";
    if (count_ == 0) {
      out_ << (negative ? " - " : " ");
    } else {
      out_ << (negative ? " - " : " + ");
    }
    if (!coef.empty()) out_ << coef << ' ';
    out_ << var;
    ++count_;
  }
  std::size_t count() const { return count_; }

 private:
  std::ostringstream& out_;
  std::size_t count_ = 0;
};

std::string xvar(std::size_t i, std::size_t j) {
  return "x_" + std::to_string(i) + "_" + std::to_string(j);
}

std::string yvar(std::size_t n, std::size_t j) {
  return "y_" + std::to_string(n) + "_" + std::to_string(j);
}

std::size_t container_count(const ProblemInstance& inst) {
  return inst.max_containers == 0 ? default_container_bound(inst) : inst.max_containers;
}

}  // namespace

std::string export_lp(const ProblemInstance& inst) {
  const std::size_t f = inst.items.size();
  const std::size_t n_var = inst.variants.size();
  const std::size_t c = container_count(inst);
  const std::size_t q = inst.max_items_per_container == 0 ? f : inst.max_items_per_container;
  std::ostringstream out;
  out << "\\ CEPP placement: " << f << " items, " << n_var << " variants, " << c
      << " containers\n";
  out << "Minimize\n obj:";
  {
    LpRow row(out);
    for (std::size_t j = 0; j < c; ++j) {
      for (std::size_t n = 0; n < n_var; ++n) {
        if (inst.variants[n].cost == 0) continue;
        row.term(format_eur(inst.variants[n].cost), yvar(n, j));
      }
    }
    if (row.count() == 0) row.term("0", yvar(0, 0));
  }
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < f; ++i) {
    out << " c1_" << i << ":";
    LpRow row(out);
    for (std::size_t j = 0; j < c; ++j) row.term("", xvar(i, j));
    out << " = 1\n";
  }
  for (std::size_t j = 0; j < c; ++j) {
    out << " c2_" << j << ":";
    LpRow row(out);
    for (std::size_t n = 0; n < n_var; ++n) row.term("", yvar(n, j));
    out << " = 1\n";
  }
  for (std::size_t j = 0; j < c; ++j) {
    out << " c3_" << j << ":";
    LpRow row(out);
    for (std::size_t i = 0; i < f; ++i) {
      row.term(std::to_string(inst.items[i].cap_mb), xvar(i, j));
    }
    for (std::size_t n = 0; n < n_var; ++n) {
      if (inst.variants[n].cap_mb == 0) continue;
      row.term(std::to_string(inst.variants[n].cap_mb), yvar(n, j), true);
    }
    if (row.count() == 0) row.term("0", yvar(0, j));
    out << " <= 0\n";
  }
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t k = i + 1; k < f; ++k) {
      if (!conflicts(inst.items[i], inst.items[k])) continue;
      for (std::size_t j = 0; j < c; ++j) {
        out << " c4_" << i << '_' << k << '_' << j << ": " << xvar(i, j) << " + "
            << xvar(k, j) << " <= 1\n";
      }
    }
  }
  if (f > 0) {
    for (std::size_t j = 0; j < c; ++j) {
      out << " c5_" << j << ":";
      LpRow row(out);
      for (std::size_t i = 0; i < f; ++i) row.term("", xvar(i, j));
      out << " <= " << q << "\n";
    }
  }
  out << "Binary\n";
  std::size_t on_line = 0;
  auto binary = [&](const std::string& v) {
    out << ' ' << v;
    if (++on_line == 10) {
      out << "\n";
      on_line = 0;
    }
  };
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t j = 0; j < c; ++j) binary(xvar(i, j));
  }
  for (std::size_t n = 0; n < n_var; ++n) {
    for (std::size_t j = 0; j < c; ++j) binary(yvar(n, j));
  }
  if (on_line != 0) out << "\n";
  out << "End\n";
  return out.str();
}

LpStats lp_stats(const ProblemInstance& inst) {
  const std::size_t f = inst.items.size();
  const std::size_t c = container_count(inst);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t k = i + 1; k < f; ++k) pairs += conflicts(inst.items[i], inst.items[k]);
  }
  LpStats s;
  s.binaries = f * c + inst.variants.size() * c;
  s.constraints = f + c + c + pairs * c + (f > 0 ? c : 0);
  return s;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParseError, where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

std::optional<std::size_t> optional_count(const Json& j, const char* key,
                                          const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer() || it->get<long long>() < 1) {
    bad(where + "." + key, "expected a positive integer or null");
  }
  return static_cast<std::size_t>(it->get<long long>());
}

}  // namespace

PlacementItem item_from_json(const Json& j, const std::string& where) {
  PlacementItem it;
  it.id = text(field(j, "id", where), where + ".id");
  double cap = number(field(j, "cap_mb", where), where + ".cap_mb");
  if (!(cap > 0)) bad(where + ".cap_mb", "capacity must be positive");
  it.cap_mb = static_cast<std::int64_t>(std::ceil(cap - 1e-9));
  it.tenant = text(field(j, "tenant", where), where + ".tenant");
  const Json& sh = field(j, "shareable", where);
  if (!sh.is_boolean()) bad(where + ".shareable", "expected a boolean");
  it.shareable = sh.get<bool>();
  if (auto o = j.find("origin"); o != j.end() && !o->is_null()) {
    it.origin = text(*o, where + ".origin");
  }
  return it;
}

Json item_to_json(const PlacementItem& it) {
  Json j;
  j["id"] = it.id;
  j["cap_mb"] = it.cap_mb;
  j["tenant"] = it.tenant;
  j["shareable"] = it.shareable;
  if (it.origin) j["origin"] = *it.origin;
  return j;
}

ContainerVariant variant_from_json(const Json& j, const std::string& where) {
  ContainerVariant v;
  v.id = text(field(j, "id", where), where + ".id");
  if (v.id.empty()) bad(where + ".id", "empty variant id");
  if (auto it = j.find("vendor"); it != j.end() && !it->is_null()) {
    v.vendor = text(*it, where + ".vendor");
  }
  double cap = number(field(j, "cap_mb", where), where + ".cap_mb");
  double cost = number(field(j, "cost_eur_mo", where), where + ".cost_eur_mo");
  if (cap < 0 || cost < 0) bad(where, "capacity and cost must be non-negative");
  v.cap_mb = static_cast<std::int64_t>(std::floor(cap + 1e-9));
  v.cost = cents_from_eur(cost);
  if (auto it = j.find("cpu"); it != j.end() && !it->is_null()) {
    v.cpu = number(*it, where + ".cpu");
  }
  return v;
}

Json variant_to_json(const ContainerVariant& v) {
  Json j;
  j["id"] = v.id;
  j["vendor"] = v.vendor;
  j["cap_mb"] = v.cap_mb;
  j["cost_eur_mo"] = eur_from_cents(v.cost);
  j["cpu"] = v.cpu ? Json(*v.cpu) : Json(nullptr);
  return j;
}

Json instance_to_json(const ProblemInstance& inst) {
  Json j;
  Json items = Json::array();
  for (const auto& it : inst.items) items.push_back(item_to_json(it));
  j["items"] = std::move(items);
  Json variants = Json::array();
  for (const auto& v : inst.variants) variants.push_back(variant_to_json(v));
  j["variants"] = std::move(variants);
  j["max_containers"] = inst.max_containers;
  j["max_items_per_container"] = inst.max_items_per_container;
  return j;
}

ProblemInstance instance_from_json(const Json& j) {
  const std::string where = "instance";
  const Json& ji = field(j, "items", where);
  const Json& jv = field(j, "variants", where);
  if (!ji.is_array()) bad(where + ".items", "expected an array");
  if (!jv.is_array()) bad(where + ".variants", "expected an array");
  std::vector<PlacementItem> items;
  for (std::size_t i = 0; i < ji.size(); ++i) {
    items.push_back(item_from_json(ji[i], where + ".items[" + std::to_string(i) + "]"));
  }
  std::vector<ContainerVariant> variants;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < jv.size(); ++i) {
    variants.push_back(variant_from_json(jv[i], where + ".variants[" + std::to_string(i) + "]"));
    if (!ids.insert(variants.back().id).second) {
      throw Error(ErrorCode::kDuplicateVariantId, "duplicate variant id " + variants.back().id);
    }
  }
  try {
    return make_instance(std::move(items), std::move(variants),
                         optional_count(j, "max_containers", where),
                         optional_count(j, "max_items_per_container", where));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) bad(where, e.what());
    throw;
  }
}

Json placement_to_json(const Placement& p, const ProblemInstance& inst) {
  const std::size_t c_count = p.container_variant.size();
  std::vector<std::vector<std::size_t>> members(c_count);
  for (std::size_t i = 0; i < p.item_container.size(); ++i) {
    int c = p.item_container[i];
    if (c >= 0 && static_cast<std::size_t>(c) < c_count) {
      members[static_cast<std::size_t>(c)].push_back(i);
    }
  }
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < c_count; ++c) {
    int n = p.container_variant[c];
    bool paid = n >= 0 && static_cast<std::size_t>(n) < inst.variants.size() &&
                !inst.variants[static_cast<std::size_t>(n)].is_zero();
    if (!members[c].empty() || paid) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    std::size_t fa = members[a].empty() ? inst.items.size() : members[a].front();
    std::size_t fb = members[b].empty() ? inst.items.size() : members[b].front();
    return fa < fb;
  });

  Json j;
  Cents cost = total_cost(p, inst);
  j["cost_eur_mo"] = eur_from_cents(cost);
  j["cost_cents"] = cost;
  Json containers = Json::array();
  std::vector<int> renumber(c_count, -1);
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::size_t c = order[k];
    renumber[c] = static_cast<int>(k);
    Json jc;
    jc["container"] = k;
    int n = p.container_variant[c];
    std::int64_t used = 0;
    for (std::size_t i : members[c]) used += inst.items[i].cap_mb;
    if (n >= 0 && static_cast<std::size_t>(n) < inst.variants.size()) {
      const auto& v = inst.variants[static_cast<std::size_t>(n)];
      jc["variant"] = v.id;
      jc["vendor"] = v.vendor;
      jc["cap_mb"] = v.cap_mb;
      jc["cost_eur_mo"] = eur_from_cents(v.cost);
    } else {
      jc["variant"] = nullptr;
      jc["vendor"] = nullptr;
      jc["cap_mb"] = 0;
      jc["cost_eur_mo"] = 0.0;
    }
    jc["used_mb"] = used;
    Json ids = Json::array();
    for (std::size_t i : members[c]) ids.push_back(inst.items[i].id);
    jc["items"] = std::move(ids);
    containers.push_back(std::move(jc));
  }
  j["containers"] = std::move(containers);
  Json assignments = Json::object();
  for (std::size_t i = 0; i < inst.items.size(); ++i) {
    int c = i < p.item_container.size() ? p.item_container[i] : -1;
    int k = c >= 0 && static_cast<std::size_t>(c) < c_count ? renumber[static_cast<std::size_t>(c)]
                                                             : -1;
    assignments[inst.items[i].id] = k < 0 ? Json(nullptr) : Json(k);
  }
  j["assignments"] = std::move(assignments);
  return j;
}

}  // namespace cepp

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


#include "cepp/ipcg_json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cepp/error.hpp"

namespace cepp {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParseError, where + ": " + what);
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected a boolean");
  return j.get<bool>();
}

std::optional<std::string> optional_string(const Json& obj, const char* key,
                                           const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return as_string(*it, where + "." + key);
}

ConceptValue parse_concept_value(const Json& j, const std::string& where) {
  std::string s = as_string(j, where);
  if (s == "yes") return ConceptValue::kYes;
  if (s == "no") return ConceptValue::kNo;
  if (s == "any") return ConceptValue::kAny;
  fail(where, "expected yes|no|any, got \"" + s + "\"");
}

constexpr std::array<const char*, 3> kConceptNames = {"signed", "encrypted",
                                                      "encoded"};

Json element_set_to_json(const ElementSet& set) {
  if (set.any) return "any";
  Json arr = Json::array();
  for (const auto& id : set.ids) arr.push_back(id);
  return arr;
}

ElementSet element_set_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() == "any") return ElementSet::wildcard();
    fail(where, "expected an array of element ids or \"any\"");
  }
  if (!j.is_array()) fail(where, "expected an array of element ids or \"any\"");
  ElementSet set;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string id = as_string(j[i], where + "[" + std::to_string(i) + "]");
    if (id.empty()) fail(where, "empty data element id");
    set.ids.insert(std::move(id));
  }
  return set;
}

std::vector<Contract> contracts_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of contracts");
  std::vector<Contract> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(contract_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json contracts_to_json(const std::vector<Contract>& list) {
  Json arr = Json::array();
  for (const auto& c : list) arr.push_back(contract_to_json(c));
  return arr;
}

Characteristics chars_from_json(const Json& j, const std::string& where,
                                PatternType type) {
  if (!j.is_object()) fail(where, "expected an object");
  Characteristics c;
  if (auto it = j.find("mc"); it != j.end()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
        !(*it)[1].is_number_integer() || (*it)[0].get<int>() < 0 ||
        (*it)[1].get<int>() < 0) {
      fail(where + ".mc", "expected [n, k] with non-negative integers");
    }
    c.mc_in = (*it)[0].get<int>();
    c.mc_out = (*it)[1].get<int>();
  }
  if (auto it = j.find("acc"); it != j.end()) {
    std::string acc = as_string(*it, where + ".acc");
    if (acc == "ro") {
      c.access = Access::kReadOnly;
    } else if (acc == "rw") {
      c.access = Access::kReadWrite;
    } else {
      fail(where + ".acc", "expected ro|rw");
    }
  }
  if (auto it = j.find("mg"); it != j.end()) {
    c.message_generating = as_bool(*it, where + ".mg");
  }
  if (auto it = j.find("cnd"); it != j.end()) {
    if (!it->is_array()) fail(where + ".cnd", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      c.conditions.push_back(
          as_string((*it)[i], where + ".cnd[" + std::to_string(i) + "]"));
    }
  }
  c.program = optional_string(j, "prg", where);
  const Json& cap = require(j, "cap_mb", where);
  if (!cap.is_number() || !(cap.get<double>() > 0.0)) {
    fail(where + ".cap_mb", "capacity must be a positive number");
  }
  c.cap_mb = cap.get<double>();
  c.shareable = as_bool(require(j, "sh", where), where + ".sh");
  if (!c.conditions.empty() && type != PatternType::kCondition &&
      type != PatternType::kExternalCall) {
    fail(where + ".cnd", "conditions are only allowed on condition and "
                         "external-call patterns");
  }
  return c;
}

Json chars_to_json(const Characteristics& c) {
  Json j;
  j["mc"] = Json::array({c.mc_in, c.mc_out});
  j["acc"] = c.access == Access::kReadOnly ? "ro" : "rw";
  j["mg"] = c.message_generating;
  j["cnd"] = c.conditions;
  j["prg"] = c.program ? Json(*c.program) : Json(nullptr);
  j["cap_mb"] = c.cap_mb;
  j["sh"] = c.shareable;
  return j;
}

}  // namespace

Json contract_to_json(const Contract& c) {
  Json j;
  Json concepts;
  for (std::size_t i = 0; i < kConceptNames.size(); ++i) {
    concepts[kConceptNames[i]] = std::string(to_string(c.concepts[i]));
  }
  j["concepts"] = std::move(concepts);
  Json elements = Json::object();
  for (ElementKey key : kAllElementKeys) {
    auto it = c.elements.find(key);
    if (it != c.elements.end()) {
      elements[std::string(to_string(key))] = element_set_to_json(it->second);
    }
  }
  j["elements"] = std::move(elements);
  return j;
}

Contract contract_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  Contract c;
  if (auto it = j.find("concepts"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) fail(where + ".concepts", "expected an object");
    for (const auto& [key, value] : it->items()) {
      auto pos = std::find(kConceptNames.begin(), kConceptNames.end(), key);
      if (pos == kConceptNames.end()) {
        fail(where + ".concepts", "unknown concept \"" + key + "\"");
      }
      c.concepts[static_cast<std::size_t>(pos - kConceptNames.begin())] =
          parse_concept_value(value, where + ".concepts." + key);
    }
  }
  if (auto it = j.find("elements"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) fail(where + ".elements", "expected an object");
    for (const auto& [key, value] : it->items()) {
      bool known = false;
      for (ElementKey k : kAllElementKeys) {
        if (to_string(k) == key) {
          c.elements[k] = element_set_from_json(value, where + ".elements." + key);
          known = true;
        }
      }
      if (!known) fail(where + ".elements", "unknown element key \"" + key + "\"");
    }
  }
  return c;
}

Json ipcg_to_json(const Ipcg& g) {
  Json j;
  j["tenant"] = g.tenant();
  Json nodes = Json::array();
  for (const auto& n : g.nodes()) {
    Json node;
    node["id"] = n.id;
    node["name"] = n.name;
    node["type"] = std::string(to_string(n.type));
    node["char"] = chars_to_json(n.chars);
    node["in_contracts"] = contracts_to_json(n.in_contracts);
    node["out_contracts"] = contracts_to_json(n.out_contracts);
    node["remote_link"] = n.remote_link ? Json(*n.remote_link) : Json(nullptr);
    if (!n.kind.empty()) node["kind"] = n.kind;
    if (!n.receiver.empty()) node["receiver"] = n.receiver;
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  Json edges = Json::array();
  for (const auto& [from, to] : g.edges()) edges.push_back(Json::array({from, to}));
  j["edges"] = std::move(edges);
  if (!g.id().empty()) j["id"] = g.id();
  return j;
}

Ipcg ipcg_from_json(const Json& j) {
  const std::string where = "ipcg";
  if (!j.is_object()) fail(where, "expected an object");
  std::string tenant = as_string(require(j, "tenant", where), where + ".tenant");
  std::string id;
  if (auto v = optional_string(j, "id", where)) id = *v;

  const Json& jn = require(j, "nodes", where);
  if (!jn.is_array()) fail(where + ".nodes", "expected an array");
  std::vector<PatternNode> nodes;
  for (std::size_t i = 0; i < jn.size(); ++i) {
    const std::string w = where + ".nodes[" + std::to_string(i) + "]";
    const Json& x = jn[i];
    PatternNode n;
    n.id = as_string(require(x, "id", w), w + ".id");
    if (n.id.empty()) fail(w + ".id", "empty node id");
    if (auto name = optional_string(x, "name", w)) n.name = *name;
    std::string type = as_string(require(x, "type", w), w + ".type");
    auto t = parse_pattern_type(type);
    if (!t) fail(w + ".type", "unknown pattern type \"" + type + "\"");
    n.type = *t;
    n.chars = chars_from_json(require(x, "char", w), w + ".char", n.type);
    if (auto it = x.find("in_contracts"); it != x.end()) {
      n.in_contracts = contracts_from_json(*it, w + ".in_contracts");
    }
    if (auto it = x.find("out_contracts"); it != x.end()) {
      n.out_contracts = contracts_from_json(*it, w + ".out_contracts");
    }
    n.remote_link = optional_string(x, "remote_link", w);
    if (auto kind = optional_string(x, "kind", w)) n.kind = *kind;
    if (auto recv = optional_string(x, "receiver", w)) n.receiver = *recv;
    nodes.push_back(std::move(n));
  }

  const Json& je = require(j, "edges", where);
  if (!je.is_array()) fail(where + ".edges", "expected an array");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < je.size(); ++i) {
    const std::string w = where + ".edges[" + std::to_string(i) + "]";
    const Json& e = je[i];
    if (!e.is_array() || e.size() != 2) fail(w, "expected [from, to]");
    edges.emplace_back(as_string(e[0], w + "[0]"), as_string(e[1], w + "[1]"));
  }
  try {
    return Ipcg(std::move(id), std::move(tenant), std::move(nodes), std::move(edges));
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

Json report_to_json(const ValidationReport& report) {
  Json j;
  j["is_correct"] = report.is_correct();
  Json list = Json::array();
  for (const auto& v : report.violations) {
    Json x;
    x["code"] = v.code;
    x["ref"] = v.ref;
    x["message"] = v.message;
    list.push_back(std::move(x));
  }
  j["violations"] = std::move(list);
  return j;
}

Json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, source + ": " + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kParseError, path.string() + ": cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": cannot write file");
  }
  out << text;
}

Ipcg parse_ipcg(std::string_view text) {
  return ipcg_from_json(parse_json_text(text, "ipcg"));
}

std::string serialize_ipcg(const Ipcg& g) { return ipcg_to_json(g).dump(2) + "\n"; }

Ipcg load_ipcg(const std::filesystem::path& path) {
  return ipcg_from_json(read_json_file(path));
}

}  // namespace cepp

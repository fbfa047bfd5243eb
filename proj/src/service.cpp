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


#include "cepp/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>

#include "cepp/error.hpp"

namespace cepp {

namespace fs = std::filesystem;

namespace {

HttpResponse reply(int status, const Json& body) { return {status, body.dump()}; }

HttpResponse fail(int status, std::string_view code, const std::string& message) {
  Json j;
  j["error"] = code;
  j["message"] = message;
  return reply(status, j);
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path.substr(0, path.find('?'))) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void put_cost(Json& j, const char* prefix, std::optional<Cents> c) {
  const std::string p(prefix);
  j[p + "_eur_mo"] = c ? Json(eur_from_cents(*c)) : Json(nullptr);
  j[p + "_cents"] = c ? Json(*c) : Json(nullptr);
}

ValidationReport validate_all(const std::vector<Ipcg>& graphs) {
  if (graphs.size() == 1) return validate_ipcg(graphs.front());
  ValidationReport all;
  for (const auto& g : graphs) {
    for (auto v : validate_ipcg(g).violations) {
      v.ref = g.id() + ":" + v.ref;
      all.violations.push_back(std::move(v));
    }
  }
  return all;
}

Json graphs_json(const std::vector<Ipcg>& graphs) {
  Json a = Json::array();
  for (const auto& g : graphs) a.push_back(ipcg_to_json(g));
  return a;
}

Json match_json(const Match& m) {
  Json b = Json::object();
  for (const auto& [role, ids] : m.bindings) b[role] = ids;
  return b;
}

Json rewrite_json(const RewriteResult& r) {
  Json j;
  j["graphs"] = graphs_json(r.graphs);
  Json links = Json::array();
  for (const auto& l : r.remote_links) {
    links.push_back(
        {{"caller_node", l.caller_node}, {"callee_graph", l.callee_graph}, {"receiver_node", l.receiver_node}});
  }
  j["remote_links"] = std::move(links);
  j["stats"] = {{"nodes_removed", r.stats.nodes_removed},
                {"nodes_added", r.stats.nodes_added},
                {"capacity_removed_mb", r.stats.capacity_removed_mb},
                {"capacity_added_mb", r.stats.capacity_added_mb}};
  return j;
}

Json proposal_json(const Session::Listed& l) {
  const Proposal& p = l.proposal;
  Json j;
  j["id"] = p.id;
  j["rule"] = p.rule_label();
  j["nodes_removed"] = p.nodes_removed;
  j["cost_before_eur"] = eur_from_cents(p.cost_before);
  j["cost_after_eur"] = eur_from_cents(p.cost_after);
  j["description"] = p.description;
  Json ids = Json::array();
  for (const auto& g : p.preview.graphs) ids.push_back(g.id());
  j["preview_graph_ids"] = std::move(ids);
  j["savings_eur"] = eur_from_cents(p.savings());
  j["cost_before_cents"] = p.cost_before;
  j["cost_after_cents"] = p.cost_after;
  j["graph_index"] = l.graph_index;
  j["bindings"] = match_json(p.match);
  return j;
}

std::string proposal_id(int revision, std::size_t k) {
  return "r" + std::to_string(revision) + "-p" + std::to_string(k + 1);
}

Json body_json(const std::string& body) { return parse_json_text(body, "request body"); }

Ipcg body_graph(const Json& body) {
  auto it = body.find("ipcg");
  if (it == body.end()) throw Error(ErrorCode::kParseError, "request body: missing field ipcg");
  return ipcg_from_json(*it);
}

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  const char* cat = std::getenv("CEPP_CATALOG_DIR");
  const char* wl = std::getenv("CEPP_WORKLOAD_DIR");
  c.catalog_dir = cat && *cat ? cat : "data/catalogs";
  c.workload_dir = wl && *wl ? wl : "data/regions";
  if (const char* v = std::getenv("CEPP_SESSION_DIR"); v && *v) c.session_dir = fs::path(v);
  if (const char* v = std::getenv("CEPP_PORT"); v && *v) c.port = std::stoi(v);
  if (const char* v = std::getenv("CEPP_SEED"); v && *v) c.seed = std::stoull(v);
  return c;
}

Json history_entry_to_json(const HistoryEntry& h) {
  Json j;
  j["kind"] = h.kind;
  j["revision"] = h.revision;
  if (h.kind == "apply") {
    j["proposal_id"] = h.proposal_id;
    j["rule"] = h.rule;
    j["graph_index"] = h.graph_index;
    j["bindings"] = match_json(h.match);
  }
  put_cost(j, "cost", h.cost);
  if (h.kind == "edit") j["uploaded"] = graphs_json(h.uploaded);
  return j;
}

HistoryEntry history_entry_from_json(const Json& j) {
  HistoryEntry h;
  h.kind = j.at("kind").get<std::string>();
  h.revision = j.at("revision").get<int>();
  if (h.kind == "apply") {
    h.proposal_id = j.at("proposal_id").get<std::string>();
    h.rule = j.at("rule").get<std::string>();
    h.graph_index = j.at("graph_index").get<std::size_t>();
    if (auto r = parse_rule_id(h.rule)) h.match.rule = *r;
    for (const auto& [role, ids] : j.at("bindings").items()) {
      h.match.bindings[role] = ids.get<std::vector<std::string>>();
    }
  }
  if (auto c = j.find("cost_cents"); c != j.end() && !c->is_null()) h.cost = c->get<Cents>();
  if (auto u = j.find("uploaded"); u != j.end()) {
    for (const auto& g : *u) h.uploaded.push_back(ipcg_from_json(g));
  }
  return h;
}

RewriteResult apply_step(std::vector<Ipcg>& graphs, std::size_t index, const std::string& rule,
                         const Match& match) {
  if (index >= graphs.size()) {
    throw Error(ErrorCode::kMatchStale, "graph index " + std::to_string(index) + " out of range");
  }
  RewriteResult r = parse_rule_id(rule) ? apply_rule(match, graphs[index]) : decompose(graphs[index]);
  graphs.erase(graphs.begin() + static_cast<std::ptrdiff_t>(index));
  graphs.insert(graphs.begin() + static_cast<std::ptrdiff_t>(index), r.graphs.begin(),
                r.graphs.end());
  return r;
}

std::vector<Ipcg> replay_history(const std::vector<Ipcg>& initial,
                                 const std::vector<HistoryEntry>& history) {
  std::vector<Ipcg> graphs = initial;
  for (const auto& h : history) {
    if (h.kind == "apply") {
      apply_step(graphs, h.graph_index, h.rule, h.match);
    } else if (h.kind == "edit") {
      graphs = h.uploaded;
    }
  }
  return graphs;
}

CostService::CostService(ServiceConfig config)
    : CostService(load_catalog_dir(config.catalog_dir), load_workload_dir(config.workload_dir),
                  config) {}

CostService::CostService(std::map<std::string, Catalog> catalogs,
                         std::map<std::string, Workload> regions, ServiceConfig config)
    : config_(std::move(config)), catalogs_(std::move(catalogs)), regions_(std::move(regions)) {
  if (config_.session_dir) {
    fs::create_directories(*config_.session_dir);
    restore();
  }
}

std::vector<std::string> CostService::catalog_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, c] : catalogs_) out.push_back(id);
  return out;
}

std::vector<std::string> CostService::region_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, w] : regions_) out.push_back(id);
  return out;
}

HttpResponse CostService::handle(const std::string& method, const std::string& path,
                                 const std::string& body) {
  const auto seg = split_path(path);
  const bool get = method == "GET";
  const bool post = method == "POST";
  try {
    if (seg.size() == 1 && seg[0] == "healthz") {
      if (get) return reply(200, Json{{"status", "ok"}});
    } else if (seg.size() == 1 && seg[0] == "catalogs") {
      if (get) return reply(200, Json(catalog_ids()));
    } else if (seg.size() == 1 && seg[0] == "regions") {
      if (get) return reply(200, Json(region_ids()));
    } else if (seg.size() == 1 && seg[0] == "sessions") {
      if (post) return create_session(body);
    } else if (seg.size() == 2 && seg[0] == "sessions") {
      if (get) return get_session(seg[1]);
    } else if (seg.size() == 3 && seg[0] == "sessions" && seg[2] == "proposals") {
      if (get) return list_proposals(seg[1]);
    } else if (seg.size() == 4 && seg[0] == "sessions" && seg[2] == "proposals") {
      if (get) return get_proposal(seg[1], seg[3]);
    } else if (seg.size() == 3 && seg[0] == "sessions" && seg[2] == "apply") {
      if (post) return apply(seg[1], body);
    } else if (seg.size() == 3 && seg[0] == "sessions" && seg[2] == "graph") {
      if (post) return replace_graph(seg[1], body);
    } else {
      return fail(404, "NotFound", "no route for " + path);
    }
    return fail(405, "MethodNotAllowed", method + " is not supported on " + path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) return fail(400, to_string(e.code()), e.what());
    return fail(500, to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(500, "InternalError", e.what());
  }
}

std::shared_ptr<Session> CostService::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<const PricingContext> CostService::context(
    const std::string& catalog, const std::optional<std::string>& region, std::uint64_t seed) {
  std::lock_guard lock(mutex_);
  auto key = std::make_tuple(catalog, region.value_or(""), seed);
  if (auto it = contexts_.find(key); it != contexts_.end()) return it->second;
  const Catalog& cat = catalogs_.at(catalog);
  std::vector<PlacementItem> background;
  if (region) background = flatten(regions_.at(*region), cat).items;
  auto ctx = std::make_shared<const PricingContext>(cat, std::move(background), seed,
                                                    config_.max_transformations);
  contexts_.emplace(key, ctx);
  return ctx;
}

void CostService::price(Session& s) {
  s.cost.reset();
  if (!validate_all(s.graphs).is_correct()) return;
  try {
    s.cost = context(s.catalog_id, s.region, s.seed)->price_graphs(s.graphs).cost;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kPricingUnavailable) throw;
  }
}

void CostService::ensure_proposals(Session& s) {
  if (s.proposals) return;
  auto ctx = context(s.catalog_id, s.region, s.seed);
  std::vector<Session::Listed> all;
  for (std::size_t k = 0; k < s.graphs.size(); ++k) {
    Pricer pricer = [&, k](const std::vector<Ipcg>& replacement) {
      std::vector<Ipcg> graphs = s.graphs;
      graphs.erase(graphs.begin() + static_cast<std::ptrdiff_t>(k));
      graphs.insert(graphs.begin() + static_cast<std::ptrdiff_t>(k), replacement.begin(),
                    replacement.end());
      return ctx->price_graphs(graphs).cost;
    };
    for (auto& p : enumerate_proposals(s.graphs[k], pricer)) all.push_back({k, std::move(p)});
  }
  std::stable_sort(all.begin(), all.end(), [](const Session::Listed& a, const Session::Listed& b) {
    if (a.proposal.savings() != b.proposal.savings()) {
      return a.proposal.savings() > b.proposal.savings();
    }
    return a.proposal.nodes_removed < b.proposal.nodes_removed;
  });
  for (std::size_t k = 0; k < all.size(); ++k) all[k].proposal.id = proposal_id(s.revision, k);
  s.proposals = std::move(all);
}

Json CostService::session_json(const Session& s) const {
  Json j;
  j["session_id"] = s.id;
  j["revision"] = s.revision;
  j["catalog_id"] = s.catalog_id;
  j["region"] = s.region ? Json(*s.region) : Json(nullptr);
  j["seed"] = s.seed;
  ValidationReport report = validate_all(s.graphs);
  j["validation"] = report_to_json(report);
  put_cost(j, "cost", s.cost);
  j["graph"] = s.graphs.size() == 1 ? ipcg_to_json(s.graphs.front()) : Json(nullptr);
  j["graphs"] = graphs_json(s.graphs);
  j["initial_graphs"] = graphs_json(s.initial_graphs);
  Json history = Json::array();
  for (const auto& h : s.history) history.push_back(history_entry_to_json(h));
  j["history"] = std::move(history);
  return j;
}

void CostService::persist(const Session& s) const {
  if (!config_.session_dir) return;
  write_text_file(*config_.session_dir / (s.id + ".json"), session_json(s).dump(2) + "\n");
}

void CostService::restore() {
  std::error_code ec;
  if (!fs::is_directory(*config_.session_dir, ec)) return;
  for (const auto& entry : fs::directory_iterator(*config_.session_dir)) {
    if (entry.path().extension() != ".json") continue;
    Json j = read_json_file(entry.path());
    auto s = std::make_shared<Session>();
    s->id = j.at("session_id").get<std::string>();
    s->revision = j.at("revision").get<int>();
    s->catalog_id = j.at("catalog_id").get<std::string>();
    if (!j.at("region").is_null()) s->region = j.at("region").get<std::string>();
    s->seed = j.at("seed").get<std::uint64_t>();
    for (const auto& g : j.at("initial_graphs")) s->initial_graphs.push_back(ipcg_from_json(g));
    for (const auto& h : j.at("history")) s->history.push_back(history_entry_from_json(h));
    if (!catalogs_.count(s->catalog_id) || (s->region && !regions_.count(*s->region))) continue;
    s->graphs = replay_history(s->initial_graphs, s->history);
    price(*s);
    if (s->id.size() > 1 && s->id[0] == 's') {
      next_session_ = std::max<std::uint64_t>(next_session_, std::stoull(s->id.substr(1)) + 1);
    }
    sessions_.emplace(s->id, std::move(s));
  }
}

HttpResponse CostService::create_session(const std::string& body) {
  const Json req = body_json(body);
  if (!req.is_object()) throw Error(ErrorCode::kParseError, "request body: expected an object");
  Ipcg g = body_graph(req);
  auto cat = req.find("catalog_id");
  if (cat == req.end() || !cat->is_string()) {
    throw Error(ErrorCode::kParseError, "request body: missing field catalog_id");
  }
  const std::string catalog_id = cat->get<std::string>();
  if (!catalogs_.count(catalog_id)) {
    return fail(404, "UnknownCatalog", "no catalog " + catalog_id);
  }
  std::optional<std::string> region;
  if (auto r = req.find("region"); r != req.end() && !r->is_null()) {
    if (!r->is_string()) throw Error(ErrorCode::kParseError, "request body: region must be a string");
    region = r->get<std::string>();
    if (!regions_.count(*region)) return fail(404, "UnknownRegion", "no region " + *region);
  }

  auto s = std::make_shared<Session>();
  s->catalog_id = catalog_id;
  s->region = region;
  s->seed = config_.seed;
  s->graphs = {g};
  s->initial_graphs = s->graphs;
  price(*s);
  s->history.push_back({"create", 0, "", "", 0, {}, s->cost, {}});
  {
    std::lock_guard lock(mutex_);
    s->id = "s" + std::to_string(next_session_++);
    sessions_.emplace(s->id, s);
  }
  persist(*s);

  ValidationReport report = validate_all(s->graphs);
  Json j;
  j["session_id"] = s->id;
  j["revision"] = s->revision;
  j["validation"] = report_to_json(report);
  if (report.is_correct()) put_cost(j, "cost", s->cost);
  return reply(report.is_correct() ? 201 : 422, j);
}

HttpResponse CostService::get_session(const std::string& id) {
  auto s = find(id);
  if (!s) return fail(404, "UnknownSession", "no session " + id);
  std::lock_guard lock(s->mutex);
  return reply(200, session_json(*s));
}

HttpResponse CostService::list_proposals(const std::string& id) {
  auto s = find(id);
  if (!s) return fail(404, "UnknownSession", "no session " + id);
  std::lock_guard lock(s->mutex);
  ValidationReport report = validate_all(s->graphs);
  if (!report.is_correct()) {
    Json j;
    j["error"] = "InvalidGraph";
    j["validation"] = report_to_json(report);
    return reply(422, j);
  }
  ensure_proposals(*s);
  Json j;
  j["revision"] = s->revision;
  Json list = Json::array();
  for (const auto& l : *s->proposals) list.push_back(proposal_json(l));
  j["proposals"] = std::move(list);
  return reply(200, j);
}

HttpResponse CostService::get_proposal(const std::string& id, const std::string& pid) {
  auto s = find(id);
  if (!s) return fail(404, "UnknownSession", "no session " + id);
  std::lock_guard lock(s->mutex);
  if (!validate_all(s->graphs).is_correct()) return fail(404, "UnknownProposal", "no proposal " + pid);
  ensure_proposals(*s);
  for (const auto& l : *s->proposals) {
    if (l.proposal.id != pid) continue;
    Json j = proposal_json(l);
    j["preview"] = rewrite_json(l.proposal.preview);
    return reply(200, j);
  }
  return fail(404, "UnknownProposal", "no proposal " + pid);
}

HttpResponse CostService::apply(const std::string& id, const std::string& body) {
  const Json req = body_json(body);
  auto pid_it = req.is_object() ? req.find("proposal_id") : req.end();
  if (pid_it == req.end() || !pid_it->is_string()) {
    throw Error(ErrorCode::kParseError, "request body: missing field proposal_id");
  }
  const std::string pid = pid_it->get<std::string>();
  auto s = find(id);
  if (!s) return fail(404, "UnknownSession", "no session " + id);
  std::lock_guard lock(s->mutex);

  static const std::regex kPid(R"(r(\d+)-p(\d+))");
  std::smatch m;
  if (!std::regex_match(pid, m, kPid)) return fail(404, "UnknownProposal", "no proposal " + pid);
  if (std::stoll(m[1].str()) != s->revision) {
    return fail(409, "StaleProposal",
                pid + " was enumerated for an earlier revision; current revision is " +
                    std::to_string(s->revision));
  }
  if (!validate_all(s->graphs).is_correct()) return fail(404, "UnknownProposal", "no proposal " + pid);
  ensure_proposals(*s);
  const Session::Listed* chosen = nullptr;
  for (const auto& l : *s->proposals) {
    if (l.proposal.id == pid) chosen = &l;
  }
  if (!chosen) return fail(404, "UnknownProposal", "no proposal " + pid);

  std::vector<Ipcg> next = s->graphs;
  const Ipcg before = next[chosen->graph_index];
  RewriteResult r;
  try {
    r = apply_step(next, chosen->graph_index, chosen->proposal.rule_label(), chosen->proposal.match);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMatchStale) return fail(409, "StaleProposal", e.what());
    return fail(500, to_string(e.code()), e.what());
  }
  if (!verify_rewrite(before, r) || !validate_all(next).is_correct()) {
    return fail(500, "PostConditionViolated", "rewrite " + pid + " failed verification");
  }

  HistoryEntry h{"apply", s->revision + 1, pid, chosen->proposal.rule_label(),
                 chosen->graph_index, chosen->proposal.match, std::nullopt, {}};
  s->graphs = std::move(next);
  ++s->revision;
  s->proposals.reset();
  price(*s);
  h.cost = s->cost;
  s->history.push_back(std::move(h));
  persist(*s);

  Json j;
  j["session_id"] = s->id;
  j["revision"] = s->revision;
  put_cost(j, "new_cost", s->cost);
  j["validation"] = report_to_json(validate_all(s->graphs));
  j["graph"] = s->graphs.size() == 1 ? ipcg_to_json(s->graphs.front()) : Json(nullptr);
  j["graphs"] = graphs_json(s->graphs);
  return reply(200, j);
}

HttpResponse CostService::replace_graph(const std::string& id, const std::string& body) {
  const Json req = body_json(body);
  if (!req.is_object()) throw Error(ErrorCode::kParseError, "request body: expected an object");
  Ipcg g = body_graph(req);
  auto s = find(id);
  if (!s) return fail(404, "UnknownSession", "no session " + id);
  std::lock_guard lock(s->mutex);

  ValidationReport report = validate_ipcg(g);
  if (!report.is_correct()) {
    Json j;
    j["session_id"] = s->id;
    j["revision"] = s->revision;
    j["validation"] = report_to_json(report);
    return reply(422, j);
  }
  s->graphs = {g};
  ++s->revision;
  s->proposals.reset();
  price(*s);
  s->history.push_back({"edit", s->revision, "", "", 0, {}, s->cost, s->graphs});
  persist(*s);

  Json j;
  j["session_id"] = s->id;
  j["revision"] = s->revision;
  j["validation"] = report_to_json(report);
  put_cost(j, "cost", s->cost);
  return reply(200, j);
}

}  // namespace cepp

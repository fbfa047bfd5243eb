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


// ceppc: command-line front end for validation, placement, rewriting,
// benchmarking, LP export and the cost service.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cepp/catalog.hpp"
#include "cepp/error.hpp"
#include "cepp/exact.hpp"
#include "cepp/heuristic.hpp"
#include "cepp/ipcg_json.hpp"
#include "cepp/pricing.hpp"
#include "cepp/rewrite.hpp"
#include "cepp/service.hpp"
#include "cepp/workload.hpp"

namespace fs = std::filesystem;
using namespace cepp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitTooLarge = 4;

using Clock = std::chrono::steady_clock;

long long elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kInfeasible:
    case ErrorCode::kItemTooLarge:
      return kExitInfeasible;
    case ErrorCode::kTooLarge:
      return kExitTooLarge;
    default:
      return kExitInput;
  }
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

void print_report(const ValidationReport& r) {
  if (r.is_correct()) {
    std::cout << "correct\n";
    return;
  }
  std::cout << r.violations.size() << " violation(s)\n";
  for (const auto& v : r.violations) {
    std::cout << "  " << v.code << "  " << v.ref << "  " << v.message << "\n";
  }
}

std::string sanitize(const std::string& id) {
  std::string out;
  for (char c : id) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ? c : '_');
  return out.empty() ? "graph" : out;
}

std::vector<Transformation> parse_cycle(const std::string& text) {
  std::vector<Transformation> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto t = parse_transformation(part);
    if (!t) throw Error(ErrorCode::kInvalidArgument, "unknown transformation " + part);
    out.push_back(*t);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string file;
  bool json = false;
};

int cmd_validate(const ValidateArgs& a) {
  Ipcg g = load_ipcg(a.file);
  ValidationReport r = validate_ipcg(g);
  if (a.json) {
    std::cout << report_to_json(r).dump(2) << "\n";
  } else {
    print_report(r);
  }
  return r.is_correct() ? kExitOk : kExitInvalid;
}

struct SolveArgs {
  std::string workload;
  std::string catalog;
  bool exact = false;
  bool heuristic = false;
  std::uint64_t seed = 1;
  std::uint64_t max_transformations = 10000;
  std::string cycle = "move,swap,shrink";
  long long budget_ms = 10000;
  bool override_cap = false;
  std::size_t max_containers = 0;
  std::string out;
  bool json = false;
};

int cmd_solve(const SolveArgs& a) {
  Workload w = load_workload(a.workload);
  Catalog c = load_catalog(a.catalog);
  ProblemInstance inst = flatten(w, c);
  if (a.max_containers > 0) inst.max_containers = a.max_containers;

  const auto start = Clock::now();
  Placement placement;
  std::string method = "heuristic";
  std::string status = "OK";
  if (a.exact) {
    method = "exact";
    ExactOptions opt;
    opt.budget = std::chrono::milliseconds(a.budget_ms);
    opt.override_cap = a.override_cap;
    ExactResult r;
    try {
      r = solve_exact(inst, opt);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kTooLarge) {
        std::cerr << "error: " << e.what() << "\nhint: use --heuristic for instances of this size\n";
        return kExitTooLarge;
      }
      throw;
    }
    placement = r.placement;
    status = r.proven_optimal ? "OPTIMAL" : "TIMEOUT";
  } else {
    SearchConfig cfg;
    cfg.max_transformations = a.max_transformations;
    cfg.rng_seed = a.seed;
    cfg.cycle = parse_cycle(a.cycle);
    placement = local_search(inst, cfg).placement;
  }
  const long long wall = elapsed_ms(start);

  Json doc = placement_to_json(placement, inst);
  if (!a.out.empty()) write_text_file(a.out, doc.dump(2) + "\n");
  if (a.json) {
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << pad("container", 11) << pad("vendor", 10) << pad("variant", 14) << pad("used/total MB", 16)
            << "items\n";
  for (const auto& jc : doc["containers"]) {
    std::string items;
    for (const auto& id : jc["items"]) items += (items.empty() ? "" : ", ") + id.get<std::string>();
    std::string vendor = jc["vendor"].is_null() ? "-" : jc["vendor"].get<std::string>();
    std::string variant = jc["variant"].is_null() ? "-" : jc["variant"].get<std::string>();
    std::cout << pad("c" + std::to_string(jc["container"].get<int>() + 1), 11) << pad(vendor, 10)
              << pad(variant, 14)
              << pad(std::to_string(jc["used_mb"].get<long long>()) + "/" +
                         std::to_string(jc["cap_mb"].get<long long>()),
                     16)
              << items << "\n";
  }
  std::cout << "Total: " << format_eur(doc["cost_cents"].get<Cents>()) << " EUR/mo\n";
  std::cout << "Method: " << method << " (" << status << "), wall " << wall << " ms\n";
  return kExitOk;
}

struct CutArgs {
  std::string file;
  std::string out_dir = ".";
  bool json = false;
};

int cmd_cut(const CutArgs& a) {
  Json doc = read_json_file(a.file);
  std::vector<Ipcg> inputs;
  if (doc.is_object() && doc.contains("items")) {
    for (auto& e : workload_from_json(doc).entries) {
      if (auto* g = std::get_if<Ipcg>(&e)) inputs.push_back(std::move(*g));
    }
  } else {
    inputs.push_back(ipcg_from_json(doc));
  }

  std::vector<Ipcg> outputs;
  Json links = Json::array();
  std::size_t cuts = 0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Ipcg& g = inputs[k];
    ValidationReport r = validate_ipcg(g);
    if (!r.is_correct()) {
      std::cerr << "error: graph " << (g.id().empty() ? std::to_string(k) : g.id())
                << " is not correct\n";
      print_report(r);
      return kExitInput;
    }
    RewriteResult res = decompose(g);
    if (!verify_rewrite(g, res)) throw Error(ErrorCode::kPostConditionViolated, "decomposition failed verification");
    for (const auto& l : res.remote_links) {
      links.push_back({{"source_graph", g.id()},
                       {"caller_node", l.caller_node},
                       {"callee_graph", l.callee_graph},
                       {"receiver_node", l.receiver_node}});
    }
    cuts += res.remote_links.size();
    for (auto& part : res.graphs) outputs.push_back(std::move(part));
  }

  fs::create_directories(a.out_dir);
  std::size_t shareable = 0;
  Json files = Json::array();
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    const Ipcg& g = outputs[k];
    shareable += process_shareable(g) ? 1 : 0;
    std::string name = sanitize(g.id().empty() ? "graph" + std::to_string(k + 1) : g.id()) + ".ipcg.json";
    write_text_file(fs::path(a.out_dir) / name, serialize_ipcg(g));
    files.push_back(name);
  }
  Json manifest;
  manifest["inputs"] = inputs.size();
  manifest["outputs"] = files;
  manifest["links"] = links;
  write_text_file(fs::path(a.out_dir) / "links.json", manifest.dump(2) + "\n");

  if (a.json) {
    Json j;
    j["inputs"] = inputs.size();
    j["outputs"] = outputs.size();
    j["shareable"] = shareable;
    j["non_shareable"] = outputs.size() - shareable;
    j["cut_edges"] = cuts;
    j["files"] = files;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << inputs.size() << " input graph(s) -> " << outputs.size() << " output graph(s): "
              << shareable << " shareable, " << outputs.size() - shareable << " non-shareable, "
              << cuts << " cut edge(s)\n";
  }
  return kExitOk;
}

struct ImproveArgs {
  std::string file;
  std::string catalog;
  std::string region_workload;
  std::string out;
  std::uint64_t seed = 1;
  bool interactive = false;
  bool json = false;
};

Json proposal_json(const Proposal& p) {
  Json j;
  j["id"] = p.id;
  j["rule"] = p.rule_label();
  j["description"] = p.description;
  j["nodes_removed"] = p.nodes_removed;
  j["cost_before_eur_mo"] = eur_from_cents(p.cost_before);
  j["cost_after_eur_mo"] = eur_from_cents(p.cost_after);
  j["savings_eur_mo"] = eur_from_cents(p.savings());
  return j;
}

int cmd_improve(const ImproveArgs& a) {
  Ipcg g = load_ipcg(a.file);
  ValidationReport r = validate_ipcg(g);
  if (!r.is_correct()) {
    std::cerr << "error: input graph is not correct\n";
    print_report(r);
    return kExitInput;
  }
  Catalog c = load_catalog(a.catalog);
  std::vector<PlacementItem> background;
  if (!a.region_workload.empty()) background = flatten(load_workload(a.region_workload), c).items;
  PricingContext ctx(c, std::move(background), a.seed);
  const Cents before = ctx.price(g);

  Json j;
  j["cost_before_eur_mo"] = eur_from_cents(before);
  if (a.interactive) {
    auto proposals = enumerate_proposals(g, ctx.pricer());
    Json list = Json::array();
    for (const auto& p : proposals) list.push_back(proposal_json(p));
    if (a.json) {
      j["proposals"] = std::move(list);
      std::cout << j.dump(2) << "\n";
      return kExitOk;
    }
    if (proposals.empty()) std::cout << "no proposals\n";
    for (const auto& p : proposals) {
      std::cout << p.id << "  " << pad(p.rule_label(), 24) << " -" << p.nodes_removed << " nodes  saves "
                << format_eur(p.savings()) << " EUR/mo  " << p.description << "\n";
    }
    std::cout << "Cost: " << format_eur(before) << " EUR/mo\n";
    return kExitOk;
  }

  ImproveResult res = improve(g, ctx.pricer());
  const Cents after = ctx.price(res.graph);
  long removed = static_cast<long>(g.size()) - static_cast<long>(res.graph.size());
  if (!a.out.empty()) write_text_file(a.out, serialize_ipcg(res.graph));
  if (a.json) {
    Json list = Json::array();
    for (const auto& p : res.applied) list.push_back(proposal_json(p));
    j["applied"] = std::move(list);
    j["nodes_before"] = g.size();
    j["nodes_after"] = res.graph.size();
    j["nodes_removed"] = removed;
    j["cost_after_eur_mo"] = eur_from_cents(after);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  if (res.applied.empty()) std::cout << "no proposals\n";
  for (const auto& p : res.applied) {
    std::cout << p.id << "  " << pad(p.rule_label(), 24) << " -" << p.nodes_removed << " nodes  "
              << format_eur(p.cost_before) << " -> " << format_eur(p.cost_after) << " EUR/mo  "
              << p.description << "\n";
  }
  std::cout << "Nodes: " << g.size() << " -> " << res.graph.size() << " (" << removed << " removed)\n";
  std::cout << "Cost: " << format_eur(before) << " -> " << format_eur(after) << " EUR/mo\n";
  return kExitOk;
}

struct BenchArgs {
  std::string spec;
  std::string out;
  unsigned jobs = 1;
};

struct BenchRow {
  std::string family;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::string cost;
  long long wall_ms = 0;
  std::string status;
};

struct BenchTask {
  std::string family;
  std::size_t size;
  std::uint64_t seed;
  std::string method;
  GeneratorSpec gen;
};

BenchRow run_bench_task(const BenchTask& t, const Catalog& catalog, long long budget_ms,
                        std::uint64_t max_transformations) {
  BenchRow row{t.family, t.size, t.seed, t.method, "", 0, "OK"};
  const auto start = Clock::now();
  try {
    ProblemInstance inst = flatten(generate(t.gen), catalog);
    if (t.method == "exact") {
      ExactOptions opt;
      opt.budget = std::chrono::milliseconds(budget_ms);
      opt.override_cap = true;
      ExactResult r = solve_exact(inst, opt);
      row.cost = format_eur(r.cost);
      row.status = r.proven_optimal ? "OK" : "TIMEOUT";
    } else {
      SearchConfig cfg;
      cfg.max_transformations = max_transformations;
      cfg.rng_seed = t.seed;
      row.cost = format_eur(local_search(inst, cfg).cost);
    }
  } catch (const Error& e) {
    row.status = e.code() == ErrorCode::kInfeasible || e.code() == ErrorCode::kItemTooLarge
                     ? "INFEASIBLE"
                     : "ERROR";
  } catch (const std::exception&) {
    row.status = "ERROR";
  }
  row.wall_ms = elapsed_ms(start);
  return row;
}

int cmd_bench(const BenchArgs& a) {
  const fs::path spec_path(a.spec);
  Json spec = read_json_file(spec_path);
  Catalog catalog;
  const Json& jc = spec.at("catalog");
  if (jc.is_string()) {
    fs::path p(jc.get<std::string>());
    catalog = load_catalog(p.is_absolute() ? p : spec_path.parent_path() / p);
  } else {
    catalog = catalog_from_json(jc);
  }
  const long long budget_ms = spec.value("exact_budget_ms", 2000LL);
  const std::uint64_t max_t = spec.value("max_transformations", std::uint64_t{10000});

  std::vector<BenchTask> tasks;
  for (const auto& fam : spec.at("families")) {
    GeneratorSpec base = generator_spec_from_json(fam.value("generator", Json::object()));
    std::vector<std::string> methods = fam.value("methods", std::vector<std::string>{"exact", "heuristic"});
    for (std::size_t n : fam.at("sizes").get<std::vector<std::size_t>>()) {
      for (std::uint64_t seed : fam.at("seeds").get<std::vector<std::uint64_t>>()) {
        GeneratorSpec g = base;
        g.seed = seed;
        const std::size_t tenants = std::max<std::size_t>(1, g.tenant_count);
        g.tenant_count = tenants;
        g.processes_per_tenant.assign(tenants, n / tenants);
        for (std::size_t k = 0; k < n % tenants; ++k) ++g.processes_per_tenant[k];
        for (const auto& m : methods) {
          if (m != "exact" && m != "heuristic") {
            throw Error(ErrorCode::kInvalidArgument, "unknown bench method " + m);
          }
          tasks.push_back({fam.at("name").get<std::string>(), n, seed, m, g});
        }
      }
    }
  }

  std::vector<BenchRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      rows[k] = run_bench_task(tasks[k], catalog, budget_ms, max_t);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < std::max(1u, a.jobs); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "family,instance_size,seed,method,cost_eur_mo,wall_ms,status\n";
  for (const auto& r : rows) {
    csv << r.family << "," << r.size << "," << r.seed << "," << r.method << "," << r.cost << ","
        << r.wall_ms << "," << r.status << "\n";
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(a.out, csv.str());
    std::cout << rows.size() << " rows written to " << a.out << "\n";
  }
  return kExitOk;
}

struct ExportArgs {
  std::string workload;
  std::string catalog;
  std::string out;
};

int cmd_export_lp(const ExportArgs& a) {
  ProblemInstance inst = flatten(load_workload(a.workload), load_catalog(a.catalog));
  const std::string lp = export_lp(inst);
  if (a.out.empty()) {
    std::cout << lp;
    return kExitOk;
  }
  write_text_file(a.out, lp);
  LpStats s = lp_stats(inst);
  std::cout << "variables: " << s.binaries << " binaries, constraints: " << s.constraints << "\n";
  return kExitOk;
}

struct ServeArgs {
  int port = -1;
  std::string host = "0.0.0.0";
};

CostService* g_service = nullptr;

int cmd_serve(const ServeArgs& a) {
  ServiceConfig cfg = ServiceConfig::from_env();
  if (a.port >= 0) cfg.port = a.port;
  CostService service(cfg);
  const int port = service.bind(a.host, cfg.port);
  if (port < 0) {
    std::cerr << "error: cannot bind " << a.host << ":" << cfg.port << "\n";
    return kExitInput;
  }
  g_service = &service;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_service) g_service->stop();
  });
  std::cout << "listening on " << a.host << ":" << port << " (" << service.catalog_ids().size()
            << " catalogs, " << service.region_ids().size() << " regions)" << std::endl;
  service.serve();
  g_service = nullptr;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-efficient process placement toolkit"};
  app.require_subcommand(1);

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check an IPCG for structural correctness");
  validate->add_option("ipcg", va.file, "IPCG file")->required();
  validate->add_flag("--json", va.json, "Print the report as JSON");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Place a workload into containers");
  solve->add_option("workload", sa.workload, "Workload file")->required();
  solve->add_option("catalog", sa.catalog, "Catalog file")->required();
  auto* exact_flag = solve->add_flag("--exact", sa.exact, "Branch and bound");
  auto* heur_flag = solve->add_flag("--heuristic", sa.heuristic, "FFD plus hill climbing (default)");
  exact_flag->excludes(heur_flag);
  solve->add_option("--seed", sa.seed, "Random seed");
  solve->add_option("--max-transformations", sa.max_transformations, "Transformation budget");
  solve->add_option("--cycle", sa.cycle, "Transformation cycle, e.g. move,swap,shrink");
  solve->add_option("--budget-ms", sa.budget_ms, "Exact solver time budget");
  solve->add_flag("--override-cap", sa.override_cap, "Allow the exact solver above its item cap");
  solve->add_option("--max-containers", sa.max_containers, "Container bound C");
  solve->add_option("--out", sa.out, "Write placement JSON here");
  solve->add_flag("--json", sa.json, "Print placement JSON");

  CutArgs ca;
  auto* cut = app.add_subcommand("cut", "Decompose graphs into shareable and non-shareable parts");
  cut->add_option("input", ca.file, "IPCG or workload file")->required();
  cut->add_option("--out-dir", ca.out_dir, "Output directory");
  cut->add_flag("--json", ca.json, "Print a JSON summary");

  ImproveArgs ia;
  auto* imp = app.add_subcommand("improve", "Apply cost-reducing rewrites");
  imp->add_option("ipcg", ia.file, "IPCG file")->required();
  imp->add_option("catalog", ia.catalog, "Catalog file")->required();
  imp->add_option("--region-workload", ia.region_workload, "Background workload for pricing");
  imp->add_option("--out", ia.out, "Write the improved IPCG here");
  imp->add_option("--seed", ia.seed, "Pricing seed");
  imp->add_flag("--interactive", ia.interactive, "List proposals without applying them");
  imp->add_flag("--json", ia.json, "Print JSON");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run instance families with both solvers");
  bench->add_option("spec", ba.spec, "Bench spec file")->required();
  bench->add_option("--out", ba.out, "Write CSV here");
  bench->add_option("--jobs", ba.jobs, "Parallel rows");

  ExportArgs ea;
  auto* lp = app.add_subcommand("export-lp", "Write the placement model as CPLEX LP");
  lp->add_option("workload", ea.workload, "Workload file")->required();
  lp->add_option("catalog", ea.catalog, "Catalog file")->required();
  lp->add_option("--out", ea.out, "Output LP file");

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Run the cost service");
  serve->add_option("--port", sv.port, "Port (default CEPP_PORT or 8080)");
  serve->add_option("--host", sv.host, "Bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*validate) return cmd_validate(va);
    if (*solve) return cmd_solve(sa);
    if (*cut) return cmd_cut(ca);
    if (*imp) return cmd_improve(ia);
    if (*bench) return cmd_bench(ba);
    if (*lp) return cmd_export_lp(ea);
    if (*serve) return cmd_serve(sv);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

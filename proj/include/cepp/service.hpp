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


// The cost service: modeling sessions that validate, price, propose and
// apply rewrites over HTTP. The routing core is transport independent so it
// can be driven directly from tests.

#ifndef CEPP_SERVICE_HPP
#define CEPP_SERVICE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cepp/catalog.hpp"
#include "cepp/ipcg_json.hpp"
#include "cepp/pricing.hpp"
#include "cepp/rewrite.hpp"
#include "cepp/workload.hpp"

namespace cepp {

struct ServiceConfig {
  std::filesystem::path catalog_dir;
  std::filesystem::path workload_dir;
  std::optional<std::filesystem::path> session_dir;
  std::uint64_t seed = 1;
  std::uint64_t max_transformations = 10000;
  int port = 8080;

  /// CEPP_CATALOG_DIR, CEPP_WORKLOAD_DIR, CEPP_SESSION_DIR, CEPP_PORT,
  /// CEPP_SEED. Unset variables keep the defaults.
  static ServiceConfig from_env();
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

struct HistoryEntry {
  /// "create", "apply" or "edit".
  std::string kind;
  int revision = 0;
  std::string proposal_id;
  std::string rule;
  std::size_t graph_index = 0;
  Match match;
  std::optional<Cents> cost;
  /// The uploaded graph of an edit.
  std::vector<Ipcg> uploaded;
};

struct Session {
  std::string id;
  std::string catalog_id;
  std::optional<std::string> region;
  std::uint64_t seed = 1;
  int revision = 0;
  /// One graph until a decomposition is applied.
  std::vector<Ipcg> graphs;
  std::vector<Ipcg> initial_graphs;
  std::optional<Cents> cost;
  std::vector<HistoryEntry> history;

  // Proposals of the current revision, one list per graph index.
  struct Listed {
    std::size_t graph_index;
    Proposal proposal;
  };
  std::optional<std::vector<Listed>> proposals;
  std::mutex mutex;
};

class CostService {
 public:
  explicit CostService(ServiceConfig config);
  CostService(std::map<std::string, Catalog> catalogs, std::map<std::string, Workload> regions,
              ServiceConfig config = {});

  HttpResponse handle(const std::string& method, const std::string& path,
                      const std::string& body);

  std::vector<std::string> catalog_ids() const;
  std::vector<std::string> region_ids() const;

  /// Binds the HTTP listener; port 0 picks a free port. Returns the bound
  /// port, or -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void serve();
  void stop();

 private:
  HttpResponse create_session(const std::string& body);
  HttpResponse get_session(const std::string& id);
  HttpResponse list_proposals(const std::string& id);
  HttpResponse get_proposal(const std::string& id, const std::string& pid);
  HttpResponse apply(const std::string& id, const std::string& body);
  HttpResponse replace_graph(const std::string& id, const std::string& body);

  std::shared_ptr<Session> find(const std::string& id);
  std::shared_ptr<const PricingContext> context(const std::string& catalog,
                                                const std::optional<std::string>& region,
                                                std::uint64_t seed);
  void ensure_proposals(Session& s);
  void price(Session& s);
  Json session_json(const Session& s) const;
  void persist(const Session& s) const;
  void restore();

  ServiceConfig config_;
  std::map<std::string, Catalog> catalogs_;
  std::map<std::string, Workload> regions_;

  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;
  std::map<std::tuple<std::string, std::string, std::uint64_t>,
           std::shared_ptr<const PricingContext>>
      contexts_;

  struct Server;
  std::shared_ptr<Server> server_;
};

/// Applies one proposal-style step: graph `index` is replaced by the
/// rewrite result. Returns the result for verification.
RewriteResult apply_step(std::vector<Ipcg>& graphs, std::size_t index, const std::string& rule,
                         const Match& match);

/// Replays applies and edits of a session history from its initial graphs.
std::vector<Ipcg> replay_history(const std::vector<Ipcg>& initial,
                                 const std::vector<HistoryEntry>& history);

Json history_entry_to_json(const HistoryEntry& h);
HistoryEntry history_entry_from_json(const Json& j);

}  // namespace cepp

#endif  // CEPP_SERVICE_HPP

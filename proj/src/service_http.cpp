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


#include "httplib.h"

#include "cepp/service.hpp"

namespace cepp {

struct CostService::Server {
  httplib::Server http;
};

int CostService::bind(const std::string& host, int port) {
  server_ = std::make_shared<Server>();
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    HttpResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body, "application/json");
  };
  server_->http.Get(".*", route);
  server_->http.Post(".*", route);
  server_->http.Put(".*", route);
  server_->http.Patch(".*", route);
  server_->http.Delete(".*", route);
  server_->http.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  if (port == 0) return server_->http.bind_to_any_port(host);
  return server_->http.bind_to_port(host, port) ? port : -1;
}

void CostService::serve() {
  if (server_) server_->http.listen_after_bind();
}

void CostService::stop() {
  if (server_) server_->http.stop();
}

}  // namespace cepp

// Copyright 2026 The gvdistrict Authors.
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

// Session-based HTTP API for the pin-and-resolve workflow.
//
//   POST /sessions                    {instanceFile, approach, options}
//   POST /sessions/{id}/constraints   {pin?, exclude?, clear?}
//   GET  /sessions/{id}/result?include=cells,summary,assignments
//   GET  /sessions/{id}/diagnostics
//   GET  /sessions/{id}/history
//
// The router is transport independent; Serve() binds it to a socket.

#ifndef GVD_TOOLS_SERVICE_SERVICE_H_
#define GVD_TOOLS_SERVICE_SERVICE_H_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gvd/io.h"
#include "gvd/pipeline.h"
#include "nlohmann/json.hpp"

namespace gvd {

// 400 invalid input, 404 unknown, 409 conflicting constraints,
// 422 infeasible or missing prerequisites, 500 otherwise.
int HttpStatusFor(const absl::Status& status);

// Options object {seed, maxIter, restarts, neighborhood, epsilon}.
absl::StatusOr<PipelineOptions> PipelineOptionsFromJson(
    const nlohmann::json& doc, Approach approach);

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
};

class SessionStore {
 public:
  // With `snapshot_dir`, every session is written there after each change
  // and restored by LoadSnapshots().
  explicit SessionStore(std::optional<std::string> snapshot_dir = {});

  Response Handle(const Request& request);

  // Re-runs every snapshot found in the directory.
  absl::Status LoadSnapshots();
  size_t size() const;

 private:
  struct Session {
    std::mutex mu;
    std::string id;
    nlohmann::json instance_json;
    InstanceFile file;
    PipelineOptions options;
    nlohmann::json options_json;
    std::vector<nlohmann::json> history;
    ResultFile result;
  };

  Response CreateSession(const nlohmann::json& body);
  Response PostConstraints(Session& session, const nlohmann::json& body);
  Response GetResult(Session& session, const std::string& include);
  Response GetDiagnostics(Session& session);
  Response GetHistory(Session& session);
  std::shared_ptr<Session> Find(const std::string& id) const;
  absl::StatusOr<std::shared_ptr<Session>> Build(
      const nlohmann::json& instance_json, const std::string& approach,
      const nlohmann::json& options_json, const nlohmann::json& constraints);
  void Persist(Session& session) const;

  std::optional<std::string> snapshot_dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  int next_id_ = 1;
};

// Blocks serving `store` on host:port with CORS enabled.
absl::Status Serve(SessionStore& store, const std::string& host, int port);

}  // namespace gvd

#endif  // GVD_TOOLS_SERVICE_SERVICE_H_

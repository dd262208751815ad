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

#include "service.h"

#include <algorithm>
#include <filesystem>
#include <utility>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "gvd/diagram.h"
#include "httplib.h"

namespace gvd {

using nlohmann::json;

int HttpStatusFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 200;
    case absl::StatusCode::kInvalidArgument:
      return 400;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kAborted:
    case absl::StatusCode::kAlreadyExists:
      return 409;
    case absl::StatusCode::kFailedPrecondition:
      return 422;
    default:
      return 500;
  }
}

absl::StatusOr<PipelineOptions> PipelineOptionsFromJson(const json& doc,
                                                        Approach approach) {
  PipelineOptions options;
  options.approach = approach;
  if (doc.is_null()) return options;
  if (!doc.is_object()) {
    return absl::InvalidArgumentError("options: expected an object");
  }
  try {
    if (doc.contains("seed")) options.seed = doc["seed"].get<uint64_t>();
    if (doc.contains("maxIter")) {
      options.max_iterations = doc["maxIter"].get<int>();
    }
    if (doc.contains("restarts")) options.restarts = doc["restarts"].get<int>();
    if (doc.contains("neighborhood")) {
      options.neighborhood = doc["neighborhood"].get<int>();
    }
    if (doc.contains("epsilon") && !doc["epsilon"].is_null()) {
      options.epsilon = doc["epsilon"].get<double>();
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("options: ", e.what()));
  }
  return options;
}

namespace {

Response JsonResponse(int status, const json& body) {
  return {status, DumpJson(body)};
}

Response ErrorResponse(const absl::Status& status) {
  return JsonResponse(HttpStatusFor(status),
                      {{"error", std::string(status.message())},
                       {"code", absl::StatusCodeToString(status.code())}});
}

// Units of `support` outside its largest connected component.
std::vector<int> Stranded(const AdjacencyGraph& graph,
                          const std::vector<int>& support) {
  std::vector<int> component(graph.num_units(), -2);
  for (int j : support) component[j] = -1;
  std::vector<int> sizes;
  for (int start : support) {
    if (component[start] != -1) continue;
    const int id = static_cast<int>(sizes.size());
    sizes.push_back(0);
    std::vector<int> stack = {start};
    component[start] = id;
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      ++sizes[id];
      for (const AdjacencyGraph::Neighbor& n : graph.neighbors(j)) {
        if (component[n.unit] == -1) {
          component[n.unit] = id;
          stack.push_back(n.unit);
        }
      }
    }
  }
  const int largest = static_cast<int>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<int> out;
  for (int j : support) {
    if (component[j] != largest) out.push_back(j);
  }
  return out;
}

json ReportToJson(const DiagramReport& report, const Instance& instance,
                  const FractionalClustering& clustering) {
  json witnesses = json::array();
  for (const StarWitness& w : report.star_witnesses) {
    witnesses.push_back({{"cluster", w.cluster},
                         {"unit", instance.units[w.unit].id},
                         {"via", instance.units[w.via].id}});
  }
  json violations = json::array();
  for (const Violation& v : report.violations) {
    violations.push_back({{"cluster", v.cluster},
                          {"unit", instance.units[v.unit].id},
                          {"reason", v.reason}});
  }
  json disconnected = json::array();
  for (size_t i = 0; i < report.connected.size(); ++i) {
    if (report.connected[i]) continue;
    json units = json::array();
    for (int j : Stranded(*instance.graph,
                          clustering.Support(static_cast<int>(i)))) {
      units.push_back(instance.units[j].id);
    }
    disconnected.push_back({{"cluster", i}, {"stranded", std::move(units)}});
  }
  json doc = {{"feasible", report.feasible},
              {"supports", report.supports},
              {"starWitnesses", std::move(witnesses)},
              {"connected", report.connected},
              {"disconnected", std::move(disconnected)},
              {"violations", std::move(violations)},
              {"tolerance", report.tolerance}};
  doc["starShaped"] =
      report.star_shaped ? json(*report.star_shaped) : json(nullptr);
  return doc;
}

void AddUnique(std::vector<Assignment>& list, const Assignment& a) {
  if (std::find(list.begin(), list.end(), a) == list.end()) list.push_back(a);
}

void Remove(std::vector<Assignment>& list, const Assignment& a) {
  list.erase(std::remove(list.begin(), list.end(), a), list.end());
}

}  // namespace

SessionStore::SessionStore(std::optional<std::string> snapshot_dir)
    : snapshot_dir_(std::move(snapshot_dir)) {}

size_t SessionStore::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.size();
}

std::shared_ptr<SessionStore::Session> SessionStore::Find(
    const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Response SessionStore::Handle(const Request& request) {
  std::vector<std::string> parts =
      absl::StrSplit(request.path, '/', absl::SkipEmpty());
  if (parts.empty() || parts[0] != "sessions") {
    return ErrorResponse(absl::NotFoundError("no such route"));
  }
  json body;
  if (request.method == "POST") {
    body = json::parse(request.body, nullptr, /*allow_exceptions=*/false);
    if (body.is_discarded()) {
      return ErrorResponse(absl::InvalidArgumentError("malformed JSON body"));
    }
  }
  if (parts.size() == 1) {
    if (request.method != "POST") {
      return ErrorResponse(absl::NotFoundError("no such route"));
    }
    return CreateSession(body);
  }
  std::shared_ptr<Session> session = Find(parts[1]);
  if (session == nullptr) {
    return ErrorResponse(
        absl::NotFoundError(absl::StrCat("unknown session '", parts[1], "'")));
  }
  const std::string action = parts.size() > 2 ? parts[2] : "";
  if (parts.size() == 3 && request.method == "POST" &&
      action == "constraints") {
    return PostConstraints(*session, body);
  }
  if (parts.size() <= 3 && request.method == "GET") {
    if (action == "result" || action.empty()) {
      auto it = request.query.find("include");
      return GetResult(*session, it == request.query.end() ? "" : it->second);
    }
    if (action == "diagnostics") return GetDiagnostics(*session);
    if (action == "history") return GetHistory(*session);
  }
  return ErrorResponse(absl::NotFoundError("no such route"));
}

absl::StatusOr<std::shared_ptr<SessionStore::Session>> SessionStore::Build(
    const json& instance_json, const std::string& approach,
    const json& options_json, const json& constraints) {
  auto session = std::make_shared<Session>();
  absl::StatusOr<InstanceFile> file = ParseInstance(instance_json);
  if (!file.ok()) return file.status();
  absl::StatusOr<Approach> parsed = ParseApproach(approach);
  if (!parsed.ok()) return parsed.status();
  absl::StatusOr<PipelineOptions> options =
      PipelineOptionsFromJson(options_json, *parsed);
  if (!options.ok()) return options.status();
  absl::StatusOr<Constraints> c = ParseConstraints(constraints, file->instance);
  if (!c.ok()) return c.status();
  options->constraints = *std::move(c);
  absl::StatusOr<ResultFile> result = RunPipeline(*file, *options);
  if (!result.ok()) return result.status();
  session->instance_json = instance_json;
  session->file = *std::move(file);
  session->options = *std::move(options);
  session->options_json = options_json.is_null() ? json::object() : options_json;
  session->result = *std::move(result);
  return session;
}

Response SessionStore::CreateSession(const json& body) {
  if (!body.is_object()) {
    return ErrorResponse(absl::InvalidArgumentError("expected an object"));
  }
  const json* instance = nullptr;
  for (const char* key : {"instanceFile", "instance"}) {
    if (body.contains(key)) instance = &body[key];
  }
  if (instance == nullptr) {
    return ErrorResponse(absl::InvalidArgumentError("instanceFile: missing"));
  }
  std::string approach = "power";
  if (body.contains("approach")) {
    if (!body["approach"].is_string()) {
      return ErrorResponse(
          absl::InvalidArgumentError("approach: expected a string"));
    }
    approach = body["approach"].get<std::string>();
  }
  const json options = body.contains("options") ? body["options"] : json();
  absl::StatusOr<std::shared_ptr<Session>> session =
      Build(*instance, approach, options, json());
  if (!session.ok()) return ErrorResponse(session.status());
  (*session)->history.push_back(
      {{"request", {{"approach", approach}, {"options", options}}},
       {"summary", SummaryToJson((*session)->result.summary)}});
  {
    std::lock_guard<std::mutex> lock(mu_);
    (*session)->id = absl::StrCat("s", next_id_++);
    Persist(**session);
    sessions_[(*session)->id] = *session;
  }
  return JsonResponse(
      200, {{"sessionId", (*session)->id},
            {"result", ResultToJson((*session)->result,
                                    (*session)->file.instance)}});
}

Response SessionStore::PostConstraints(Session& session, const json& body) {
  std::lock_guard<std::mutex> lock(session.mu);
  if (!body.is_object()) {
    return ErrorResponse(absl::InvalidArgumentError("expected an object"));
  }
  const Instance& instance = session.file.instance;
  Constraints next = session.options.constraints;
  if (body.contains("clear")) {
    const json& clear = body["clear"];
    if (clear == true || clear == "all") {
      next = Constraints{};
    } else {
      absl::StatusOr<Constraints> removed =
          ParseConstraints({{"pin", clear}}, instance);
      if (!removed.ok()) return ErrorResponse(removed.status());
      for (const Assignment& a : removed->pins) {
        Remove(next.pins, a);
        Remove(next.exclusions, a);
      }
    }
  }
  json additions = json::object();
  if (body.contains("pin")) additions["pin"] = body["pin"];
  if (body.contains("exclude")) additions["exclude"] = body["exclude"];
  absl::StatusOr<Constraints> added = ParseConstraints(additions, instance);
  if (!added.ok()) return ErrorResponse(added.status());
  for (const Assignment& a : added->pins) AddUnique(next.pins, a);
  for (const Assignment& a : added->exclusions) AddUnique(next.exclusions, a);
  if (absl::Status s = next.Validate(instance.k, instance.num_units());
      !s.ok()) {
    return ErrorResponse(s);
  }
  PipelineOptions options = session.options;
  options.constraints = next;
  absl::StatusOr<ResultFile> result = RunPipeline(session.file, options);
  if (!result.ok()) return ErrorResponse(result.status());
  session.options = std::move(options);
  session.result = *std::move(result);
  session.history.push_back(
      {{"request", body}, {"summary", SummaryToJson(session.result.summary)}});
  Persist(session);
  return JsonResponse(200, ResultToJson(session.result, instance));
}

Response SessionStore::GetResult(Session& session,
                                 const std::string& include) {
  std::lock_guard<std::mutex> lock(session.mu);
  const Instance& instance = session.file.instance;
  const json full = ResultToJson(session.result, instance);
  if (include.empty()) return JsonResponse(200, full);
  json out = json::object();
  for (absl::string_view part : absl::StrSplit(include, ',', absl::SkipEmpty())) {
    if (part == "summary") {
      out["summary"] = full["summary"];
    } else if (part == "assignments") {
      out["assignments"] = full["assignments"];
    } else if (part == "cells") {
      absl::StatusOr<json> cells = CellsToJson(session.result, instance);
      if (!cells.ok()) return ErrorResponse(cells.status());
      out["cells"] = *std::move(cells);
    } else {
      return ErrorResponse(absl::InvalidArgumentError(absl::StrCat(
          "include: unknown part '", part,
          "' (expected cells, summary or assignments)")));
    }
  }
  return JsonResponse(200, out);
}

Response SessionStore::GetDiagnostics(Session& session) {
  std::lock_guard<std::mutex> lock(session.mu);
  absl::StatusOr<DiagramReport> report =
      Verify(session.file.instance, session.result.model,
             session.result.clustering);
  if (!report.ok()) return ErrorResponse(report.status());
  return JsonResponse(200, ReportToJson(*report, session.file.instance,
                                         session.result.clustering));
}

Response SessionStore::GetHistory(Session& session) {
  std::lock_guard<std::mutex> lock(session.mu);
  return JsonResponse(200, {{"sessionId", session.id},
                            {"history", session.history}});
}

void SessionStore::Persist(Session& session) const {
  if (!snapshot_dir_) return;
  std::error_code ec;
  std::filesystem::create_directories(*snapshot_dir_, ec);
  const json snapshot = {
      {"id", session.id},
      {"instanceFile", session.instance_json},
      {"approach", ApproachName(session.options.approach)},
      {"options", session.options_json},
      {"constraints",
       ConstraintsToJson(session.options.constraints, session.file.instance)},
      {"history", session.history}};
  (void)WriteFile(
      (std::filesystem::path(*snapshot_dir_) / (session.id + ".json")).string(),
      DumpJson(snapshot));
}

absl::Status SessionStore::LoadSnapshots() {
  if (!snapshot_dir_) return absl::OkStatus();
  std::error_code ec;
  if (!std::filesystem::is_directory(*snapshot_dir_, ec)) {
    return absl::OkStatus();
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry :
       std::filesystem::directory_iterator(*snapshot_dir_, ec)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    absl::StatusOr<std::string> text = ReadFile(path.string());
    if (!text.ok()) return text.status();
    const json snap = json::parse(*text, nullptr, false);
    if (snap.is_discarded() || !snap.contains("id")) {
      return absl::DataLossError(absl::StrCat("bad snapshot ", path.string()));
    }
    absl::StatusOr<std::shared_ptr<Session>> session =
        Build(snap["instanceFile"], snap.value("approach", "power"),
              snap.value("options", json::object()), snap["constraints"]);
    if (!session.ok()) return session.status();
    const std::string id = snap["id"].get<std::string>();
    (*session)->id = id;
    for (const json& h : snap.value("history", json::array())) {
      (*session)->history.push_back(h);
    }
    std::lock_guard<std::mutex> lock(mu_);
    sessions_[id] = *session;
    int n = 0;
    if (id.size() > 1 && absl::SimpleAtoi(id.substr(1), &n)) {
      next_id_ = std::max(next_id_, n + 1);
    }
  }
  return absl::OkStatus();
}

absl::Status Serve(SessionStore& store, const std::string& host, int port) {
  httplib::Server server;
  server.set_default_headers(
      {{"Access-Control-Allow-Origin", "*"},
       {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
       {"Access-Control-Allow-Headers", "Content-Type"}});
  auto handler = [&store](const httplib::Request& req, httplib::Response& res) {
    Request request{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) request.query[key] = value;
    Response response = store.Handle(request);
    res.status = response.status;
    res.set_content(response.body, "application/json");
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  if (!server.listen(host, port)) {
    return absl::UnavailableError(
        absl::StrCat("cannot listen on ", host, ":", port));
  }
  return absl::OkStatus();
}

}  // namespace gvd

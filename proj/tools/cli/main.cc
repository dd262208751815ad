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

// gvdistrict: balanced clustering supported by generalized Voronoi
// diagrams.
//
// Exit codes: 0 ok, 1 invalid input, 2 infeasible, 3 internal error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "gvd/io.h"
#include "gvd/model.h"
#include "gvd/pipeline.h"
#include "service.h"

namespace {

using nlohmann::json;

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kAborted:
      return 1;
    case absl::StatusCode::kFailedPrecondition:
      return 2;
    default:
      return 3;
  }
}

int Fail(const absl::Status& status) {
  if (status.ok()) return 0;
  std::cerr << "error: " << status.message() << "\n";
  return ExitCodeFor(status);
}

struct Flags {
  std::string instance;
  std::string result;
  std::string approach = "power";
  uint64_t seed = 0;
  std::optional<double> epsilon;
  int max_iter = 100;
  int restarts = 8;
  int neighborhood = 50;
  std::vector<std::string> pins;
  std::vector<std::string> exclusions;
  std::string out;
  std::string format;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string snapshots;
};

void AddRunFlags(CLI::App* app, Flags& f) {
  app->add_option("--approach", f.approach,
                  "power | anisotropic | shortest-path | awvd")
      ->capture_default_str();
  app->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  app->add_option("--epsilon", f.epsilon, "Target balance tolerance");
  app->add_option("--max-iter", f.max_iter, "Site optimization iterations")
      ->capture_default_str();
  app->add_option("--restarts", f.restarts, "k-means restarts")
      ->capture_default_str();
  app->add_option("--neighborhood", f.neighborhood,
                  "Local search neighborhood R")
      ->capture_default_str();
  app->add_option("--pin", f.pins, "Force unit into cluster (CLUSTER:UNIT)");
  app->add_option("--exclude", f.exclusions,
                  "Keep unit out of cluster (CLUSTER:UNIT)");
}

void AddOutputFlags(CLI::App* app, Flags& f) {
  app->add_option("--out", f.out, "Output path (default stdout)");
  app->add_option("--format", f.format,
                  "json | csv | geojson (default from --out extension)");
}

absl::StatusOr<gvd::PipelineOptions> MakeOptions(const Flags& f,
                                                 const gvd::Instance& in) {
  absl::StatusOr<gvd::Approach> approach = gvd::ParseApproach(f.approach);
  if (!approach.ok()) return approach.status();
  gvd::PipelineOptions options;
  options.approach = *approach;
  options.seed = f.seed;
  options.epsilon = f.epsilon;
  options.max_iterations = f.max_iter;
  options.restarts = f.restarts;
  options.neighborhood = f.neighborhood;
  for (const std::string& p : f.pins) {
    absl::StatusOr<gvd::Assignment> a = gvd::ParseAssignment(p, in);
    if (!a.ok()) return a.status();
    options.constraints.pins.push_back(*a);
  }
  for (const std::string& e : f.exclusions) {
    absl::StatusOr<gvd::Assignment> a = gvd::ParseAssignment(e, in);
    if (!a.ok()) return a.status();
    options.constraints.exclusions.push_back(*a);
  }
  return options;
}

std::string FormatFor(const Flags& f) {
  if (!f.format.empty()) return f.format;
  auto ends_with = [&](std::string_view s) {
    return f.out.size() >= s.size() &&
           f.out.compare(f.out.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".csv")) return "csv";
  if (ends_with(".geojson")) return "geojson";
  return "json";
}

absl::Status Emit(const Flags& f, const std::string& text) {
  if (f.out.empty()) {
    std::cout << text;
    return absl::OkStatus();
  }
  return gvd::WriteFile(f.out, text);
}

absl::Status EmitResult(const Flags& f, const gvd::ResultFile& result,
                        const gvd::Instance& in) {
  const std::string format = FormatFor(f);
  if (format == "json") {
    return Emit(f, gvd::DumpJson(gvd::ResultToJson(result, in)));
  }
  if (format == "csv") return Emit(f, gvd::ExportCsv(result, in));
  if (format == "geojson") {
    absl::StatusOr<std::string> text = gvd::ExportGeoJson(result, in);
    if (!text.ok()) return text.status();
    return Emit(f, *text);
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown format '", format, "'"));
}

absl::StatusOr<gvd::ResultFile> LoadResult(const std::string& path,
                                           const gvd::Instance& in) {
  absl::StatusOr<std::string> text = gvd::ReadFile(path);
  if (!text.ok()) return absl::InvalidArgumentError(text.status().message());
  json doc = json::parse(*text, nullptr, false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": malformed JSON"));
  }
  return gvd::ParseResult(doc, in);
}

int RunValidate(const Flags& f) {
  absl::StatusOr<std::string> text = gvd::ReadFile(f.instance);
  if (!text.ok()) return Fail(absl::InvalidArgumentError(text.status().message()));
  absl::StatusOr<gvd::InstanceFile> file = gvd::ParseInstanceText(*text);
  if (!file.ok()) return Fail(file.status());
  const gvd::Instance& in = file->instance;
  std::cout << "ok: " << in.num_units() << " units, k=" << in.k
            << (in.graph ? ", graph" : "")
            << (file->reference ? ", reference" : "") << "\n";
  return 0;
}

int RunSolveOrPipeline(const Flags& f, bool round) {
  absl::StatusOr<gvd::InstanceFile> file = gvd::LoadInstance(f.instance);
  if (!file.ok()) return Fail(file.status());
  absl::StatusOr<gvd::PipelineOptions> options =
      MakeOptions(f, file->instance);
  if (!options.ok()) return Fail(options.status());
  options->round = round;
  absl::StatusOr<gvd::ResultFile> result = gvd::RunPipeline(*file, *options);
  if (!result.ok()) return Fail(result.status());
  return Fail(EmitResult(f, *result, file->instance));
}

int RunRound(const Flags& f) {
  absl::StatusOr<gvd::InstanceFile> file = gvd::LoadInstance(f.instance);
  if (!file.ok()) return Fail(file.status());
  absl::StatusOr<gvd::ResultFile> result = LoadResult(f.result, file->instance);
  if (!result.ok()) return Fail(result.status());
  if (absl::Status s = gvd::RoundResult(*file, *result); !s.ok()) {
    return Fail(s);
  }
  if (absl::Status s = gvd::Reevaluate(*file, *result); !s.ok()) {
    return Fail(s);
  }
  return Fail(EmitResult(f, *result, file->instance));
}

int RunEvaluate(const Flags& f) {
  absl::StatusOr<gvd::InstanceFile> file = gvd::LoadInstance(f.instance);
  if (!file.ok()) return Fail(file.status());
  absl::StatusOr<gvd::ResultFile> result = LoadResult(f.result, file->instance);
  if (!result.ok()) return Fail(result.status());
  if (absl::Status s = gvd::Reevaluate(*file, *result); !s.ok()) {
    return Fail(s);
  }
  return Fail(Emit(f, gvd::DumpJson(gvd::SummaryToJson(result->summary))));
}

int RunServe(const Flags& f) {
  gvd::SessionStore store(f.snapshots.empty()
                              ? std::nullopt
                              : std::optional<std::string>(f.snapshots));
  if (absl::Status s = store.LoadSnapshots(); !s.ok()) return Fail(s);
  std::cerr << "listening on " << f.host << ":" << f.port << "\n";
  return Fail(gvd::Serve(store, f.host, f.port));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balanced clustering with generalized Voronoi diagrams"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* validate = app.add_subcommand("validate", "Check an instance file");
  validate->add_option("instance", f.instance, "Instance JSON")->required();

  CLI::App* solve =
      app.add_subcommand("solve", "Optimize sites and solve, no rounding");
  solve->add_option("instance", f.instance, "Instance JSON")->required();
  AddRunFlags(solve, f);
  AddOutputFlags(solve, f);

  CLI::App* round = app.add_subcommand("round", "Round a fractional result");
  round->add_option("result", f.result, "Result JSON")->required();
  round->add_option("--instance", f.instance, "Instance JSON")->required();
  AddOutputFlags(round, f);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Summarize a result file");
  evaluate->add_option("result", f.result, "Result JSON")->required();
  evaluate->add_option("--instance", f.instance, "Instance JSON")->required();
  evaluate->add_option("--out", f.out, "Output path (default stdout)");

  CLI::App* pipeline = app.add_subcommand("pipeline", "Full run");
  pipeline->add_option("instance", f.instance, "Instance JSON")->required();
  AddRunFlags(pipeline, f);
  AddOutputFlags(pipeline, f);

  CLI::App* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--port", f.port, "Port")->capture_default_str();
  serve->add_option("--host", f.host, "Bind address")->capture_default_str();
  serve->add_option("--snapshots", f.snapshots,
                    "Directory for session snapshots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (validate->parsed()) return RunValidate(f);
  if (solve->parsed()) return RunSolveOrPipeline(f, /*round=*/false);
  if (round->parsed()) return RunRound(f);
  if (evaluate->parsed()) return RunEvaluate(f);
  if (pipeline->parsed()) return RunSolveOrPipeline(f, /*round=*/true);
  if (serve->parsed()) return RunServe(f);
  return 1;
}

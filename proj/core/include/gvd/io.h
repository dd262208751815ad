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

// JSON instance and result files, CSV and GeoJSON exports.
//
// Instance file:
//   { "units": [{"id", "x", "y", "weight"}],
//     "edges": [{"a", "b", "length"}],          // optional, unit ids
//     "k": 2,
//     "capacities": [..] | "epsilon-target": e, // capacities optional
//     "reference": [{"unit", "cluster"}] }      // optional
//
// Result file:
//   { "assignments": [{"unit", "cluster", "fraction"}], "mu": [..],
//     "sites": [{"x", "y"} | {"unit"}], "summary": {..},
//     "parameters": {..}, "rounding": {..} }

#ifndef GVD_IO_H_
#define GVD_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "gvd/distance.h"
#include "gvd/evaluate.h"
#include "gvd/model.h"
#include "gvd/rounding.h"
#include "gvd/transport.h"
#include "nlohmann/json.hpp"

namespace gvd {

struct InstanceFile {
  Instance instance;
  std::optional<double> epsilon_target;
  std::optional<FractionalClustering> reference;
};

// Missing capacities default to Σω / k. Capacities are normalized and the
// instance validated; failures are InvalidArgument with field context.
absl::StatusOr<InstanceFile> ParseInstance(const nlohmann::json& doc);
absl::StatusOr<InstanceFile> ParseInstanceText(absl::string_view text);
absl::StatusOr<InstanceFile> LoadInstance(const std::string& path);
nlohmann::json InstanceToJson(const InstanceFile& file);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);

// "i:j" with cluster index i and unit id j.
absl::StatusOr<Assignment> ParseAssignment(absl::string_view text,
                                           const Instance& instance);
absl::StatusOr<Constraints> ParseConstraints(const nlohmann::json& doc,
                                             const Instance& instance);
nlohmann::json ConstraintsToJson(const Constraints& constraints,
                                 const Instance& instance);

struct RoundingInfo {
  double epsilon_achieved = 0.0;
  double epsilon_bound = 0.0;
  int moved_units = 0;
  std::string method;
};

struct ResultFile {
  FractionalClustering clustering;
  DistanceModel model;
  EvaluationSummary summary;
  std::optional<RoundingInfo> rounding;
  // Free-form run parameters; the model's metrics and transform are
  // stored here as well.
  nlohmann::json parameters = nlohmann::json::object();
};

nlohmann::json SummaryToJson(const EvaluationSummary& summary);
absl::StatusOr<EvaluationSummary> SummaryFromJson(const nlohmann::json& doc);

nlohmann::json ModelToJson(const DistanceModel& model,
                           const Instance& instance);
nlohmann::json ResultToJson(const ResultFile& result,
                            const Instance& instance);
absl::StatusOr<ResultFile> ParseResult(const nlohmann::json& doc,
                                       const Instance& instance);
// Canonical text: two-space indentation and a trailing newline.
std::string DumpJson(const nlohmann::json& doc);

// One row per (unit, cluster) assignment.
std::string ExportCsv(const ResultFile& result, const Instance& instance);
// Unit points with cluster properties plus power cells when the model is a
// power diagram. Fails for graph metrics.
absl::StatusOr<std::string> ExportGeoJson(const ResultFile& result,
                                          const Instance& instance);

// Power polygons or per-unit cell membership.
absl::StatusOr<nlohmann::json> CellsToJson(const ResultFile& result,
                                           const Instance& instance);

}  // namespace gvd

#endif  // GVD_IO_H_

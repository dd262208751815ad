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

// End-to-end runs: site initialization, site optimization, solve, rounding
// and evaluation for one of the supported diagram families.

#ifndef GVD_PIPELINE_H_
#define GVD_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "gvd/io.h"
#include "gvd/transport.h"

namespace gvd {

enum class Approach {
  // Euclidean power diagram (h = square), balanced k-means.
  kPower,
  // Per-cluster ellipsoidal norms from the reference clustering.
  kAnisotropic,
  // Graph metric, h = identity, local search over unit sites.
  kShortestPath,
  // Additively weighted diagram (Euclidean, h = identity), k-medians.
  kAwvd,
};

absl::StatusOr<Approach> ParseApproach(std::string_view name);
std::string_view ApproachName(Approach approach);

struct PipelineOptions {
  Approach approach = Approach::kPower;
  uint64_t seed = 0;
  int max_iterations = 100;
  int restarts = 8;
  int neighborhood = 50;
  std::optional<double> epsilon;
  Constraints constraints;
  // Stop after the fractional solve.
  bool round = true;
};

// Deterministic in (file, options). Missing prerequisites (no graph for
// shortest paths, no reference for anisotropic) and infeasible constraint
// sets are FailedPrecondition; inconsistent constraints are Aborted.
absl::StatusOr<ResultFile> RunPipeline(const InstanceFile& file,
                                       const PipelineOptions& options);

// Rounds a fractional result in place: connected rounding for graph
// models (falling back to tree rounding), tree rounding otherwise.
absl::Status RoundResult(const InstanceFile& file, ResultFile& result);

// Recomputes the summary of `result` for its model and clustering.
absl::Status Reevaluate(const InstanceFile& file, ResultFile& result);

}  // namespace gvd

#endif  // GVD_PIPELINE_H_

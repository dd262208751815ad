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

// Quality measures of a clustering.

#ifndef GVD_EVALUATE_H_
#define GVD_EVALUATE_H_

#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "gvd/distance.h"
#include "gvd/model.h"

namespace gvd {

// Σ_i Σ_j ξ_ij ω_j ‖x_j − c(C_i)‖².
absl::StatusOr<double> MomentOfInertia(const Instance& instance,
                                       const FractionalClustering& clustering);

// Weighted share of pairs that share a reference cluster but are separated
// by the candidate: Σ_A ω_j ω_r / Σ_i w_i (w_i − 1) / 2 with w_i the
// reference cluster weights. Both clusterings must be integer.
absl::StatusOr<double> ChangedPairs(const Instance& instance,
                                    const FractionalClustering& reference,
                                    const FractionalClustering& candidate);

struct EvaluationSummary {
  std::vector<double> cluster_weights;
  // Relative to κ_i.
  double avg_deviation = 0.0;
  double max_deviation = 0.0;
  double moment_of_inertia = 0.0;
  std::optional<double> changed_pairs_ratio;
  // Per cluster; empty without a graph.
  std::vector<bool> connectivity;
  // Only for all-graph models with unit sites.
  std::optional<bool> star_shaped;
};

absl::StatusOr<EvaluationSummary> Summarize(
    const Instance& instance, const DistanceModel& model,
    const FractionalClustering& clustering,
    const FractionalClustering* reference = nullptr);

}  // namespace gvd

#endif  // GVD_EVALUATE_H_

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

// Rounding of balanced fractional clusterings to integer ones whose
// supports only shrink, so any diagram feasible before stays feasible.

#ifndef GVD_ROUNDING_H_
#define GVD_ROUNDING_H_

#include <vector>

#include "absl/status/statusor.h"
#include "gvd/distance.h"
#include "gvd/model.h"

namespace gvd {

struct MovedUnit {
  int unit = 0;
  std::vector<FractionalClustering::Entry> from;
  int to = 0;
};

struct RoundingOutcome {
  FractionalClustering clustering;
  // max_i |ω(C_i) − κ_i| / κ_i of the result.
  double epsilon_achieved = 0.0;
  // max_{i,j} ω_j / κ_i.
  double epsilon_bound = 0.0;
  std::vector<MovedUnit> moved_units;
  int cycles_cancelled = 0;
};

double RoundingBound(const Instance& instance);
// Relative deviation of the cluster weights; fails like ClusterWeights.
absl::StatusOr<double> MaxRelativeDeviation(
    const FractionalClustering& clustering, const Instance& instance);

// Removes every cycle of the assignment graph by cyclic exchanges. Cluster
// weights are unchanged and supports only shrink.
absl::StatusOr<FractionalClustering> CancelCycles(
    const FractionalClustering& clustering, const Instance& instance,
    int* cycles = nullptr);

enum class RoundingOrder {
  // Fractional units of a cluster in unit-index order.
  kIndex,
  // Heaviest first, ties by index.
  kBestFit,
};

struct RoundTreeOptions {
  // Reject cyclic input with FailedPrecondition instead of cancelling.
  bool require_extremal = false;
  RoundingOrder order = RoundingOrder::kIndex;
};

// Tree rounding of a strongly balanced clustering. Each component of the
// assignment forest is rooted at its lowest cluster; clusters are visited
// by hop distance from the root. The result is ε-balanced for
// ε = RoundingBound(instance).
absl::StatusOr<RoundingOutcome> RoundTree(const Instance& instance,
                                          const FractionalClustering& input,
                                          const RoundTreeOptions& options = {});

// Connectivity-preserving rounding for graph metrics. Each step assigns a
// fractional unit wholly to a supporting cluster whose integral region it
// touches, minimizing the resulting maximum relative deviation (expected
// loads), then the graph distance to that region, then the cluster and unit
// index. Fails with FailedPrecondition when no such step exists.
absl::StatusOr<RoundingOutcome> RoundConnected(
    const Instance& instance, const FractionalClustering& input,
    const DistanceModel& model);

}  // namespace gvd

#endif  // GVD_ROUNDING_H_

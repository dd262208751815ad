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

#include "gvd/evaluate.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "gvd/diagram.h"

namespace gvd {

absl::StatusOr<double> MomentOfInertia(
    const Instance& instance, const FractionalClustering& clustering) {
  absl::StatusOr<std::vector<Point>> centroids =
      ClusterCentroids(clustering, instance);
  if (!centroids.ok()) return centroids.status();
  double total = 0.0;
  for (int j = 0; j < clustering.m(); ++j) {
    const Unit& u = instance.units[j];
    for (const auto& e : clustering.column(j)) {
      total += e.value * u.weight *
               SquaredNorm(u.position - (*centroids)[e.cluster]);
    }
  }
  return total;
}

absl::StatusOr<double> ChangedPairs(const Instance& instance,
                                    const FractionalClustering& reference,
                                    const FractionalClustering& candidate) {
  const int m = instance.num_units();
  if (reference.m() != m || candidate.m() != m) {
    return absl::InvalidArgumentError("clustering size mismatch");
  }
  if (!reference.IsInteger() || !candidate.IsInteger()) {
    return absl::InvalidArgumentError("changed pairs need integer clusterings");
  }
  const std::vector<int> ref = reference.Labels();
  const std::vector<int> cand = candidate.Labels();
  // Pairs within a group of total weight W and squared sum S: (W² − S) / 2.
  std::map<int, std::pair<double, double>> by_ref;
  std::map<std::pair<int, int>, std::pair<double, double>> by_both;
  for (int j = 0; j < m; ++j) {
    const double w = instance.units[j].weight;
    auto& a = by_ref[ref[j]];
    a.first += w;
    a.second += w * w;
    auto& b = by_both[{ref[j], cand[j]}];
    b.first += w;
    b.second += w * w;
  }
  double together = 0.0;
  double denominator = 0.0;
  for (const auto& [cluster, ws] : by_ref) {
    together += 0.5 * (ws.first * ws.first - ws.second);
    denominator += 0.5 * ws.first * (ws.first - 1.0);
  }
  double kept = 0.0;
  for (const auto& [key, ws] : by_both) {
    kept += 0.5 * (ws.first * ws.first - ws.second);
  }
  const double separated = std::max(0.0, together - kept);
  if (denominator <= 0.0) return 0.0;
  return separated / denominator;
}

absl::StatusOr<EvaluationSummary> Summarize(
    const Instance& instance, const DistanceModel& model,
    const FractionalClustering& clustering,
    const FractionalClustering* reference) {
  if (clustering.k() != instance.k || clustering.m() != instance.num_units()) {
    return absl::InvalidArgumentError("clustering does not match instance");
  }
  // Empty clusters are reported, not rejected.
  EvaluationSummary summary;
  summary.cluster_weights.assign(instance.k, 0.0);
  std::vector<Point> centroids(instance.k);
  for (int j = 0; j < clustering.m(); ++j) {
    const Unit& u = instance.units[j];
    for (const auto& e : clustering.column(j)) {
      summary.cluster_weights[e.cluster] += e.value * u.weight;
      centroids[e.cluster] =
          centroids[e.cluster] + (e.value * u.weight) * u.position;
    }
  }
  for (int i = 0; i < instance.k; ++i) {
    const double w = summary.cluster_weights[i];
    if (w > 0.0) centroids[i] = (1.0 / w) * centroids[i];
    const double dev = std::abs(w - instance.capacities[i]) /
                       instance.capacities[i];
    summary.avg_deviation += dev;
    summary.max_deviation = std::max(summary.max_deviation, dev);
  }
  summary.avg_deviation /= instance.k;
  for (int j = 0; j < clustering.m(); ++j) {
    const Unit& u = instance.units[j];
    for (const auto& e : clustering.column(j)) {
      summary.moment_of_inertia +=
          e.value * u.weight * SquaredNorm(u.position - centroids[e.cluster]);
    }
  }
  // Changed pairs are defined for integer candidates only.
  if (reference != nullptr && clustering.IsInteger()) {
    absl::StatusOr<double> pairs =
        ChangedPairs(instance, *reference, clustering);
    if (!pairs.ok()) return pairs.status();
    summary.changed_pairs_ratio = *pairs;
  }
  if (instance.graph) {
    summary.connectivity = ClusterConnectivity(*instance.graph, clustering);
    const bool all_graph = !model.metrics.empty() &&
                           std::all_of(model.metrics.begin(),
                                       model.metrics.end(), IsGraphMetric);
    if (all_graph) {
      absl::StatusOr<StarShapedResult> star =
          CheckStarShaped(instance, clustering, model.SiteUnits());
      if (!star.ok()) return star.status();
      summary.star_shaped = star->star_shaped;
    }
  }
  return summary;
}

}  // namespace gvd

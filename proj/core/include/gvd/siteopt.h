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

// Site optimization: balanced k-means (and k-medians) for point sites and
// local search over unit sites for shortest-path diagrams.

#ifndef GVD_SITEOPT_H_
#define GVD_SITEOPT_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "gvd/distance.h"
#include "gvd/model.h"
#include "gvd/transport.h"

namespace gvd {

// φ(C) = Σ_i κ_i ‖c(C_i)‖².
absl::StatusOr<double> ComputePhi(const Instance& instance,
                                  const FractionalClustering& clustering);

// Σ_i Σ_j ξ_ij ω_j ‖x_j − c(C_i)‖²_{M_i}; the plain moment of inertia for
// Euclidean metrics.
absl::StatusOr<double> MetricMomentOfInertia(
    const Instance& instance, const std::vector<Metric>& metrics,
    const FractionalClustering& clustering);

struct KMeansIteration {
  std::vector<Point> sites;
  double objective = 0.0;
  double phi = 0.0;
};

struct KMeansTrace {
  std::vector<KMeansIteration> iterations;
  bool converged = false;
  // A site collision had to be broken by jitter.
  bool jittered = false;
  DistanceModel final_model;
  FractionalClustering clustering;
  // Restart that produced this trace (multi-start only).
  int restart = 0;
};

struct KMeansOptions {
  int max_iterations = 100;
  // Stop once every site moves less than tolerance × diameter.
  double tolerance = 1e-9;
  Constraints constraints;
};

// Alternates solving the transportation program at the current sites
// (h = square) and moving every site to its cluster centroid.
absl::StatusOr<KMeansTrace> BalancedKMeans(const Instance& instance,
                                           std::vector<Point> initial_sites,
                                           std::vector<Metric> metrics,
                                           const KMeansOptions& options = {});

// Same loop with h = identity, Euclidean metrics and weighted geometric
// medians as the site update. Used for additively weighted diagrams.
absl::StatusOr<KMeansTrace> BalancedKMedians(const Instance& instance,
                                             std::vector<Point> initial_sites,
                                             const KMeansOptions& options = {});

// k-means++ seeding: k distinct unit positions, deterministic in `seed`.
absl::StatusOr<std::vector<Point>> SpreadSites(const Instance& instance,
                                               int k, uint64_t seed);

enum class SiteUpdate { kCentroid, kMedian };

struct MultiStartOptions {
  int restarts = 8;
  uint64_t seed = 0;
  SiteUpdate update = SiteUpdate::kCentroid;
  KMeansOptions kmeans;
};

// Best final objective over seeded restarts; ties keep the earliest.
absl::StatusOr<KMeansTrace> MultiStartKMeans(const Instance& instance,
                                             const std::vector<Metric>& metrics,
                                             const MultiStartOptions& options);

struct LocalSearchConfig {
  // Candidate sites per move: the R units nearest to the current site,
  // the site itself included. Capped at the number of units.
  int neighborhood = 50;
  int max_iterations = 100;
  uint64_t seed = 0;
  Constraints constraints;
};

struct LocalSearchResult {
  std::vector<int> sites;
  double deviation = 0.0;
  double initial_deviation = 0.0;
  // Accepted moves.
  int iterations = 0;
  int evaluations = 0;
};

// Max relative deviation of the connected rounding of the relative-interior
// optimum for unit sites under the graph metric and h = identity. Infinite
// when the program is infeasible or the rounding fails.
double SiteDeviation(const Instance& instance, const std::vector<int>& sites,
                     const Constraints& constraints = {});

// First-improvement hill climbing over single-site swaps.
absl::StatusOr<LocalSearchResult> LocalSearchSites(
    const Instance& instance, std::vector<int> initial_sites,
    const LocalSearchConfig& config = {});

// Unit nearest (Euclidean) to each point, distinct units, lowest index on
// ties.
std::vector<int> NearestUnits(const Instance& instance,
                              const std::vector<Point>& points);

}  // namespace gvd

#endif  // GVD_SITEOPT_H_

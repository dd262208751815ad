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

// Generalized Voronoi cells over the unit set and the checks that relate a
// diagram to a clustering: feasibility (complementary slackness), support
// (strict complementarity), star-shapedness for shortest-path diagrams and
// centroidality for power diagrams.

#ifndef GVD_DIAGRAM_H_
#define GVD_DIAGRAM_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "gvd/distance.h"
#include "gvd/model.h"

namespace gvd {

struct Cells {
  // membership[j]: clusters i with f_i(x_j) <= min_l f_l(x_j) + tol.
  std::vector<std::vector<int>> membership;
  // η_j = min_i f_i(x_j).
  std::vector<double> eta;
  double tolerance = 0.0;

  bool Contains(int cluster, int unit) const;
  std::vector<int> Cell(int cluster) const;
};

// `tol` is scaled by max(1, max |f|).
absl::StatusOr<Cells> ComputeCells(const Instance& instance,
                                   const DistanceModel& model,
                                   double tol = DefaultTolerances().tie);

struct Violation {
  int cluster = 0;
  int unit = 0;
  std::string reason;
};

// Unit `unit` of cluster `cluster` is reached from the site only through
// `via`, which lies outside the cluster.
struct StarWitness {
  int cluster = 0;
  int unit = 0;
  int via = 0;
  friend bool operator==(const StarWitness&, const StarWitness&) = default;
};

struct StarShapedResult {
  bool star_shaped = true;
  std::vector<StarWitness> witnesses;
};

struct DiagramReport {
  // supp(C_i) ⊆ P_i for all i.
  bool feasible = false;
  // supp(C_i) = P_i ∩ X for all i.
  bool supports = false;
  std::optional<bool> star_shaped;
  std::vector<StarWitness> star_witnesses;
  // Per cluster connectivity of G[supp(C_i)]; empty without a graph.
  std::vector<bool> connected;
  std::vector<Violation> violations;
  double tolerance = 0.0;
};

absl::StatusOr<DiagramReport> Verify(const Instance& instance,
                                     const DistanceModel& model,
                                     const FractionalClustering& clustering,
                                     double tol = DefaultTolerances().tie);

// For every cluster i and x in supp(C_i), every unit on every shortest
// s_i–x path must be in supp(C_i).
absl::StatusOr<StarShapedResult> CheckStarShaped(
    const Instance& instance, const FractionalClustering& clustering,
    std::span<const int> site_units);

// Connectivity of G[supp(C_i)] per cluster.
std::vector<bool> ClusterConnectivity(const AdjacencyGraph& graph,
                                      const FractionalClustering& clustering);

struct CentroidalCheck {
  bool centroidal = false;
  // ‖s_i − c(C_i)‖₂ per cluster.
  std::vector<double> gaps;
  double threshold = 0.0;
};

// Largest pairwise Euclidean distance between units.
double InstanceDiameter(const Instance& instance);

absl::StatusOr<CentroidalCheck> CheckCentroidal(
    const Instance& instance, const DistanceModel& model,
    const FractionalClustering& clustering, double rel_tol = 1e-6);

struct Box {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 1.0;
  double max_y = 1.0;
};

// Bounding box of all unit positions (and point sites), padded by `margin`
// times its larger side.
Box BoundingBox(const Instance& instance, double margin = 0.05);

// Counter-clockwise vertices; empty when the cell misses the box.
using Polygon = std::vector<Point>;

// Power cells clipped to `box`. Requires Euclidean metrics and h = (·)².
absl::StatusOr<std::vector<Polygon>> PowerCells2d(const DistanceModel& model,
                                                  const Box& box);

double PolygonArea(const Polygon& polygon);
bool PolygonContains(const Polygon& polygon, Point p, double tol = 0.0);

}  // namespace gvd

#endif  // GVD_DIAGRAM_H_

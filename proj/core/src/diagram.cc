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

#include "gvd/diagram.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace gvd {

bool Cells::Contains(int cluster, int unit) const {
  const auto& m = membership[unit];
  return std::find(m.begin(), m.end(), cluster) != m.end();
}

std::vector<int> Cells::Cell(int cluster) const {
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(membership.size()); ++j) {
    if (Contains(cluster, j)) out.push_back(j);
  }
  return out;
}

absl::StatusOr<Cells> ComputeCells(const Instance& instance,
                                   const DistanceModel& model, double tol) {
  absl::StatusOr<CostMatrix> costs = ComputeCostMatrix(instance, model);
  if (!costs.ok()) return costs.status();
  const int k = model.k();
  const int m = instance.num_units();
  double scale = 1.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < m; ++j) {
      scale = std::max(scale, std::abs((*costs)(i, j) + model.mu[i]));
    }
  }
  Cells cells;
  cells.tolerance = tol * scale;
  cells.membership.resize(m);
  cells.eta.assign(m, std::numeric_limits<double>::infinity());
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < k; ++i) {
      cells.eta[j] = std::min(cells.eta[j], (*costs)(i, j) + model.mu[i]);
    }
    for (int i = 0; i < k; ++i) {
      if ((*costs)(i, j) + model.mu[i] <= cells.eta[j] + cells.tolerance) {
        cells.membership[j].push_back(i);
      }
    }
  }
  return cells;
}

std::vector<bool> ClusterConnectivity(const AdjacencyGraph& graph,
                                      const FractionalClustering& clustering) {
  std::vector<bool> out;
  for (const std::vector<int>& support : clustering.Supports()) {
    out.push_back(graph.InducesConnected(support));
  }
  return out;
}

absl::StatusOr<StarShapedResult> CheckStarShaped(
    const Instance& instance, const FractionalClustering& clustering,
    std::span<const int> site_units) {
  if (!instance.graph) {
    return absl::InvalidArgumentError("star-shapedness needs a graph");
  }
  if (static_cast<int>(site_units.size()) != clustering.k()) {
    return absl::InvalidArgumentError("one site per cluster required");
  }
  const int m = instance.num_units();
  if (clustering.m() != m) {
    return absl::InvalidArgumentError("clustering size mismatch");
  }
  StarShapedResult result;
  const std::vector<std::vector<int>> supports = clustering.Supports();
  for (int i = 0; i < clustering.k(); ++i) {
    const int site = site_units[i];
    if (site < 0 || site >= m) {
      return absl::InvalidArgumentError(
          absl::StrCat("site of cluster ", i, " is not a unit"));
    }
    absl::StatusOr<ShortestPathDag> dag =
        AllShortestPaths(*instance.graph, site);
    if (!dag.ok()) return dag.status();
    std::vector<char> inside(m, 0);
    for (int j : supports[i]) inside[j] = 1;
    // Nearest unit outside the support on some shortest path from the site
    // (the unit itself excluded), or -1.
    std::vector<int> outside(m, -1);
    for (int v : dag->order) {
      if (v == site) continue;
      for (int p : dag->predecessors[v]) {
        const int candidate = inside[p] ? outside[p] : p;
        if (candidate >= 0) {
          outside[v] = candidate;
          break;
        }
      }
    }
    for (int x : supports[i]) {
      if (x == site) continue;
      if (outside[x] >= 0) result.witnesses.push_back({i, x, outside[x]});
    }
  }
  result.star_shaped = result.witnesses.empty();
  return result;
}

absl::StatusOr<DiagramReport> Verify(const Instance& instance,
                                     const DistanceModel& model,
                                     const FractionalClustering& clustering,
                                     double tol) {
  if (clustering.k() != model.k() || clustering.m() != instance.num_units()) {
    return absl::InvalidArgumentError("clustering does not match the model");
  }
  absl::StatusOr<Cells> cells = ComputeCells(instance, model, tol);
  if (!cells.ok()) return cells.status();
  DiagramReport report;
  report.tolerance = cells->tolerance;
  report.feasible = true;
  for (int j = 0; j < clustering.m(); ++j) {
    for (const auto& e : clustering.column(j)) {
      if (!cells->Contains(e.cluster, j)) {
        report.feasible = false;
        report.violations.push_back(
            {e.cluster, j, "assigned unit lies outside the cell"});
      }
    }
  }
  report.supports = report.feasible;
  for (int j = 0; j < clustering.m(); ++j) {
    for (int i : cells->membership[j]) {
      if (clustering.Get(i, j) <= 0.0) {
        report.supports = false;
        report.violations.push_back(
            {i, j, "cell member is not in the cluster support"});
      }
    }
  }
  if (instance.graph) {
    report.connected = ClusterConnectivity(*instance.graph, clustering);
    const bool all_graph = std::all_of(model.metrics.begin(),
                                       model.metrics.end(), IsGraphMetric);
    if (all_graph) {
      absl::StatusOr<StarShapedResult> star =
          CheckStarShaped(instance, clustering, model.SiteUnits());
      if (!star.ok()) return star.status();
      report.star_shaped = star->star_shaped;
      report.star_witnesses = star->witnesses;
    }
  }
  return report;
}

double InstanceDiameter(const Instance& instance) {
  double best = 0.0;
  const int m = instance.num_units();
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      best = std::max(best, SquaredNorm(instance.units[a].position -
                                        instance.units[b].position));
    }
  }
  return std::sqrt(best);
}

absl::StatusOr<CentroidalCheck> CheckCentroidal(
    const Instance& instance, const DistanceModel& model,
    const FractionalClustering& clustering, double rel_tol) {
  if (model.HasGraphMetric()) {
    return absl::InvalidArgumentError(
        "centroidality is undefined for graph metrics");
  }
  absl::StatusOr<std::vector<Point>> centroids =
      ClusterCentroids(clustering, instance);
  if (!centroids.ok()) return centroids.status();
  CentroidalCheck check;
  check.threshold = rel_tol * InstanceDiameter(instance);
  check.centroidal = true;
  const std::vector<Point> sites = model.SitePoints();
  for (int i = 0; i < model.k(); ++i) {
    const double gap = Norm(sites[i] - (*centroids)[i]);
    check.gaps.push_back(gap);
    if (gap > check.threshold) check.centroidal = false;
  }
  return check;
}

Box BoundingBox(const Instance& instance, double margin) {
  Box box{std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};
  for (const Unit& u : instance.units) {
    box.min_x = std::min(box.min_x, u.position.x);
    box.min_y = std::min(box.min_y, u.position.y);
    box.max_x = std::max(box.max_x, u.position.x);
    box.max_y = std::max(box.max_y, u.position.y);
  }
  if (instance.units.empty()) return Box{};
  const double pad =
      margin * std::max({box.max_x - box.min_x, box.max_y - box.min_y, 1.0});
  box.min_x -= pad;
  box.min_y -= pad;
  box.max_x += pad;
  box.max_y += pad;
  return box;
}

namespace {

// Keeps {p : Dot(a, p) <= b}.
Polygon ClipHalfplane(const Polygon& polygon, Point a, double b) {
  Polygon out;
  const size_t n = polygon.size();
  for (size_t t = 0; t < n; ++t) {
    const Point p = polygon[t];
    const Point q = polygon[(t + 1) % n];
    const double fp = Dot(a, p) - b;
    const double fq = Dot(a, q) - b;
    if (fp <= 0.0) out.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
      const double s = fp / (fp - fq);
      out.push_back(p + s * (q - p));
    }
  }
  if (out.size() < 3) return {};
  return out;
}

}  // namespace

absl::StatusOr<std::vector<Polygon>> PowerCells2d(const DistanceModel& model,
                                                  const Box& box) {
  if (!std::holds_alternative<SquareTransform>(model.transform)) {
    return absl::InvalidArgumentError("power cells need h = square");
  }
  for (const Metric& metric : model.metrics) {
    if (!std::holds_alternative<EuclideanMetric>(metric)) {
      return absl::InvalidArgumentError("power cells need Euclidean metrics");
    }
  }
  for (const Site& s : model.sites) {
    if (!std::holds_alternative<Point>(s)) {
      return absl::InvalidArgumentError("power cells need point sites");
    }
  }
  const std::vector<Point> sites = model.SitePoints();
  const int k = model.k();
  std::vector<Polygon> cells;
  for (int i = 0; i < k; ++i) {
    Polygon cell = {{box.min_x, box.min_y},
                    {box.max_x, box.min_y},
                    {box.max_x, box.max_y},
                    {box.min_x, box.max_y}};
    for (int l = 0; l < k && !cell.empty(); ++l) {
      if (l == i) continue;
      // ‖x−s_i‖² + μ_i <= ‖x−s_l‖² + μ_l, linear in x.
      const Point a = 2.0 * (sites[l] - sites[i]);
      const double b = SquaredNorm(sites[l]) - SquaredNorm(sites[i]) +
                       model.mu[l] - model.mu[i];
      if (a.x == 0.0 && a.y == 0.0) {
        if (b < 0.0) cell.clear();
        continue;
      }
      cell = ClipHalfplane(cell, a, b);
    }
    if (PolygonArea(cell) <= 0.0) cell.clear();
    cells.push_back(std::move(cell));
  }
  return cells;
}

double PolygonArea(const Polygon& polygon) {
  double twice = 0.0;
  const size_t n = polygon.size();
  for (size_t t = 0; t < n; ++t) {
    const Point p = polygon[t];
    const Point q = polygon[(t + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

bool PolygonContains(const Polygon& polygon, Point p, double tol) {
  if (polygon.size() < 3) return false;
  const size_t n = polygon.size();
  for (size_t t = 0; t < n; ++t) {
    const Point a = polygon[t];
    const Point b = polygon[(t + 1) % n];
    const Point e = b - a;
    const Point d = p - a;
    if (e.x * d.y - e.y * d.x < -tol * Norm(e)) return false;
  }
  return true;
}

}  // namespace gvd

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

#include "gvd/distance.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

#include <Eigen/Eigenvalues>

#include "absl/strings/str_cat.h"

namespace gvd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool NearlyEqual(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

absl::StatusOr<SpdMatrix2> SpdMatrix2::Create(double xx, double xy, double yx,
                                              double yy) {
  if (!std::isfinite(xx) || !std::isfinite(xy) || !std::isfinite(yx) ||
      !std::isfinite(yy)) {
    return absl::InvalidArgumentError("matrix has non-finite entries");
  }
  if (std::abs(xy - yx) > 1e-12 * std::max({1.0, std::abs(xy), std::abs(yx)})) {
    return absl::InvalidArgumentError("matrix is not symmetric");
  }
  const double off = 0.5 * (xy + yx);
  // Sylvester's criterion.
  if (!(xx > 0.0) || !(xx * yy - off * off > 0.0)) {
    return absl::InvalidArgumentError("matrix is not positive definite");
  }
  return SpdMatrix2(xx, off, yy);
}

double EllipsoidalNorm(const SpdMatrix2& m, Point v) {
  return std::sqrt(std::max(0.0, m.QuadraticForm(v)));
}

bool IsGraphMetric(const Metric& metric) {
  return std::holds_alternative<GraphMetric>(metric);
}

double ApplyTransform(const Transform& h, double distance) {
  return std::visit(
      Overloaded{[&](const IdentityTransform&) { return distance; },
                 [&](const SquareTransform&) { return distance * distance; },
                 [&](const AffineTransform& a) {
                   return a.alpha * distance + a.beta;
                 }},
      h);
}

bool IsAffine(const Transform& h) {
  return !std::holds_alternative<SquareTransform>(h);
}

bool DistanceModel::HasGraphMetric() const {
  return std::any_of(metrics.begin(), metrics.end(), IsGraphMetric);
}

std::vector<int> DistanceModel::SiteUnits() const {
  std::vector<int> out;
  for (const Site& s : sites) {
    out.push_back(std::holds_alternative<UnitSite>(s)
                      ? std::get<UnitSite>(s).unit
                      : -1);
  }
  return out;
}

std::vector<Point> DistanceModel::SitePoints() const {
  std::vector<Point> out;
  for (const Site& s : sites) {
    out.push_back(std::holds_alternative<Point>(s) ? std::get<Point>(s)
                                                   : Point{});
  }
  return out;
}

DistanceModel MakeModel(const Metric& metric, const Transform& h,
                        std::vector<Site> sites) {
  DistanceModel model;
  model.metrics.assign(sites.size(), metric);
  model.transform = h;
  model.mu.assign(sites.size(), 0.0);
  model.sites = std::move(sites);
  return model;
}

absl::Status ValidateModel(const DistanceModel& model,
                           const Instance& instance) {
  const int k = model.k();
  if (k != instance.k || static_cast<int>(model.sites.size()) != k ||
      static_cast<int>(model.mu.size()) != k) {
    return absl::InvalidArgumentError(
        absl::StrCat("model sizes (metrics ", k, ", sites ",
                     model.sites.size(), ", mu ", model.mu.size(),
                     ") do not match k=", instance.k));
  }
  if (const auto* a = std::get_if<AffineTransform>(&model.transform);
      a != nullptr && !(a->alpha >= 0.0)) {
    return absl::InvalidArgumentError("affine transform needs alpha >= 0");
  }
  for (int i = 0; i < k; ++i) {
    if (IsGraphMetric(model.metrics[i])) {
      if (!instance.graph) {
        return absl::InvalidArgumentError(
            "graph metric requires an adjacency graph");
      }
      const auto* site = std::get_if<UnitSite>(&model.sites[i]);
      if (site == nullptr) {
        return absl::InvalidArgumentError(
            absl::StrCat("cluster ", i, ": graph metric needs a unit site"));
      }
      if (site->unit < 0 || site->unit >= instance.num_units()) {
        return absl::InvalidArgumentError(
            absl::StrCat("cluster ", i, ": site unit out of range"));
      }
    } else if (!std::holds_alternative<Point>(model.sites[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("cluster ", i, ": point metric needs a point site"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ShortestPathTree> ShortestPaths(const AdjacencyGraph& graph,
                                               int source) {
  const int n = graph.num_units();
  if (source < 0 || source >= n) {
    return absl::InvalidArgumentError("source out of range");
  }
  ShortestPathTree tree;
  tree.source = source;
  tree.distance.assign(n, kInf);
  tree.predecessor.assign(n, -1);
  std::vector<char> settled(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  tree.distance[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    for (const auto& nb : graph.neighbors(u)) {
      const int v = nb.unit;
      if (settled[v]) continue;
      const double candidate = d + nb.length;
      if (tree.distance[v] == kInf ||
          (candidate < tree.distance[v] &&
           !NearlyEqual(candidate, tree.distance[v], 1e-12))) {
        tree.distance[v] = candidate;
        tree.predecessor[v] = u;
        heap.push({candidate, v});
      } else if (NearlyEqual(candidate, tree.distance[v], 1e-12) &&
                 u < tree.predecessor[v]) {
        tree.predecessor[v] = u;
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (!settled[v]) {
      return absl::FailedPreconditionError(
          absl::StrCat("unit ", v, " unreachable from ", source,
                       ": graph is disconnected"));
    }
  }
  return tree;
}

absl::StatusOr<ShortestPathDag> AllShortestPaths(const AdjacencyGraph& graph,
                                                 int source, double tol) {
  absl::StatusOr<ShortestPathTree> tree = ShortestPaths(graph, source);
  if (!tree.ok()) return tree.status();
  const int n = graph.num_units();
  ShortestPathDag dag;
  dag.source = source;
  dag.distance = tree->distance;
  dag.predecessors.assign(n, {});
  for (int v = 0; v < n; ++v) {
    if (v == source) continue;
    for (const auto& nb : graph.neighbors(v)) {
      const int u = nb.unit;
      if (dag.distance[u] < dag.distance[v] &&
          NearlyEqual(dag.distance[u] + nb.length, dag.distance[v], tol)) {
        dag.predecessors[v].push_back(u);
      }
    }
  }
  dag.order.resize(n);
  for (int v = 0; v < n; ++v) dag.order[v] = v;
  std::stable_sort(dag.order.begin(), dag.order.end(), [&](int a, int b) {
    return dag.distance[a] < dag.distance[b];
  });
  return dag;
}

namespace {

double PointDistance(const Metric& metric, Point site, Point x) {
  if (const auto* e = std::get_if<EllipsoidalMetric>(&metric)) {
    return EllipsoidalNorm(e->matrix, x - site);
  }
  return Norm(x - site);
}

}  // namespace

absl::StatusOr<double> EvalF(const DistanceModel& model,
                             const Instance& instance, int cluster,
                             const Location& x) {
  if (cluster < 0 || cluster >= model.k()) {
    return absl::InvalidArgumentError("cluster index out of range");
  }
  const Metric& metric = model.metrics[cluster];
  const Site& site = model.sites[cluster];
  double d = 0.0;
  if (IsGraphMetric(metric)) {
    const auto* target = std::get_if<UnitSite>(&x);
    if (target == nullptr) {
      return absl::InvalidArgumentError(
          "graph metric is only defined on units, got a point");
    }
    const auto* source = std::get_if<UnitSite>(&site);
    if (source == nullptr || !instance.graph) {
      return absl::InvalidArgumentError("graph metric needs a unit site");
    }
    if (target->unit < 0 || target->unit >= instance.num_units()) {
      return absl::InvalidArgumentError("unit out of range");
    }
    absl::StatusOr<ShortestPathTree> tree =
        ShortestPaths(*instance.graph, source->unit);
    if (!tree.ok()) return tree.status();
    d = tree->distance[target->unit];
  } else {
    const auto* s = std::get_if<Point>(&site);
    if (s == nullptr) {
      return absl::InvalidArgumentError("point metric needs a point site");
    }
    Point p;
    if (const auto* u = std::get_if<UnitSite>(&x)) {
      if (u->unit < 0 || u->unit >= instance.num_units()) {
        return absl::InvalidArgumentError("unit out of range");
      }
      p = instance.units[u->unit].position;
    } else {
      p = std::get<Point>(x);
    }
    d = PointDistance(metric, *s, p);
  }
  return ApplyTransform(model.transform, d) + model.mu[cluster];
}

double CostMatrix::MaxAbs() const {
  double out = 0.0;
  for (double v : data_) out = std::max(out, std::abs(v));
  return out;
}

absl::StatusOr<CostMatrix> ComputeCostMatrix(const Instance& instance,
                                             const DistanceModel& model) {
  if (absl::Status s = ValidateModel(model, instance); !s.ok()) return s;
  const int k = model.k();
  const int m = instance.num_units();
  CostMatrix costs(k, m);
  for (int i = 0; i < k; ++i) {
    const Metric& metric = model.metrics[i];
    if (IsGraphMetric(metric)) {
      absl::StatusOr<ShortestPathTree> tree = ShortestPaths(
          *instance.graph, std::get<UnitSite>(model.sites[i]).unit);
      if (!tree.ok()) return tree.status();
      for (int j = 0; j < m; ++j) {
        costs(i, j) = ApplyTransform(model.transform, tree->distance[j]);
      }
    } else {
      const Point site = std::get<Point>(model.sites[i]);
      for (int j = 0; j < m; ++j) {
        costs(i, j) = ApplyTransform(
            model.transform,
            PointDistance(metric, site, instance.units[j].position));
      }
    }
  }
  return costs;
}

absl::StatusOr<AnisotropyEstimate> EstimateAnisotropy(
    const Instance& instance, const FractionalClustering& reference,
    const Tolerances& tol) {
  if (!reference.IsInteger(tol.integer)) {
    return absl::InvalidArgumentError("reference clustering is not integral");
  }
  absl::StatusOr<std::vector<double>> weights =
      ClusterWeights(reference, instance);
  if (!weights.ok()) return weights.status();
  absl::StatusOr<std::vector<Point>> centroids =
      ClusterCentroids(reference, instance);
  if (!centroids.ok()) return centroids.status();

  const int k = instance.k;
  std::vector<Covariance2> cov(k);
  for (int j = 0; j < reference.m(); ++j) {
    const Unit& u = instance.units[j];
    for (const auto& e : reference.column(j)) {
      const double w = e.value * u.weight / (*weights)[e.cluster];
      const Point d = u.position - (*centroids)[e.cluster];
      cov[e.cluster].xx += w * d.x * d.x;
      cov[e.cluster].xy += w * d.x * d.y;
      cov[e.cluster].yy += w * d.y * d.y;
    }
  }

  AnisotropyEstimate out;
  out.covariances = cov;
  for (int i = 0; i < k; ++i) {
    Eigen::Matrix2d v;
    v << cov[i].xx, cov[i].xy, cov[i].xy, cov[i].yy;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(v);
    if (solver.info() != Eigen::Success) {
      return absl::InternalError(
          absl::StrCat("eigendecomposition failed for cluster ", i));
    }
    Eigen::Vector2d sigma = solver.eigenvalues();
    const double floor =
        tol.covariance_floor * std::max(sigma.maxCoeff(), tol.covariance_floor);
    bool clamped = false;
    for (int t = 0; t < 2; ++t) {
      if (sigma[t] < floor) {
        sigma[t] = floor;
        clamped = true;
      }
    }
    const Eigen::Matrix2d& q = solver.eigenvectors();
    const Eigen::Matrix2d m =
        q * sigma.cwiseInverse().asDiagonal() * q.transpose();
    absl::StatusOr<SpdMatrix2> spd =
        SpdMatrix2::Create(m(0, 0), m(0, 1), m(0, 1), m(1, 1));
    if (!spd.ok()) {
      return absl::InternalError(absl::StrCat(
          "cluster ", i, ": inverse covariance not SPD: ", spd.status().message()));
    }
    out.matrices.push_back(*spd);
    out.regularized.push_back(clamped);
  }
  return out;
}

}  // namespace gvd

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

// Distance functions f_i(x) = h(d_i(s_i, x)) + μ_i: metrics, the shared
// transformation h, graph shortest paths and anisotropy estimation.

#ifndef GVD_DISTANCE_H_
#define GVD_DISTANCE_H_

#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "gvd/model.h"

namespace gvd {

// Symmetric positive definite 2×2 matrix [[xx, xy], [xy, yy]].
class SpdMatrix2 {
 public:
  static absl::StatusOr<SpdMatrix2> Create(double xx, double xy, double yx,
                                           double yy);
  static SpdMatrix2 Identity() { return SpdMatrix2(1.0, 0.0, 1.0); }

  double xx() const { return xx_; }
  double xy() const { return xy_; }
  double yy() const { return yy_; }
  double QuadraticForm(Point v) const {
    return xx_ * v.x * v.x + 2.0 * xy_ * v.x * v.y + yy_ * v.y * v.y;
  }

  friend bool operator==(const SpdMatrix2&, const SpdMatrix2&) = default;

 private:
  SpdMatrix2(double xx, double xy, double yy) : xx_(xx), xy_(xy), yy_(yy) {}
  double xx_;
  double xy_;
  double yy_;
};

// sqrt(vᵀ M v).
double EllipsoidalNorm(const SpdMatrix2& m, Point v);

struct EuclideanMetric {
  friend bool operator==(const EuclideanMetric&,
                         const EuclideanMetric&) = default;
};
struct EllipsoidalMetric {
  SpdMatrix2 matrix;
  friend bool operator==(const EllipsoidalMetric&,
                         const EllipsoidalMetric&) = default;
};
// Shortest-path metric of the instance's adjacency graph.
struct GraphMetric {
  friend bool operator==(const GraphMetric&, const GraphMetric&) = default;
};
using Metric = std::variant<EuclideanMetric, EllipsoidalMetric, GraphMetric>;

bool IsGraphMetric(const Metric& metric);

struct IdentityTransform {};
struct SquareTransform {};
struct AffineTransform {
  double alpha = 1.0;
  double beta = 0.0;
};
// h, shared by all clusters.
using Transform =
    std::variant<IdentityTransform, SquareTransform, AffineTransform>;

double ApplyTransform(const Transform& h, double distance);
bool IsAffine(const Transform& h);

// A site is a planar point or, under the graph metric, a unit index.
struct UnitSite {
  int unit = 0;
  friend bool operator==(const UnitSite&, const UnitSite&) = default;
};
using Site = std::variant<Point, UnitSite>;

struct DistanceModel {
  std::vector<Metric> metrics;
  Transform transform = SquareTransform{};
  std::vector<Site> sites;
  std::vector<double> mu;

  int k() const { return static_cast<int>(metrics.size()); }
  bool HasGraphMetric() const;
  // Site unit indices; only meaningful when every site is a UnitSite.
  std::vector<int> SiteUnits() const;
  std::vector<Point> SitePoints() const;
};

// Uniform model: same metric for every cluster, μ = 0.
DistanceModel MakeModel(const Metric& metric, const Transform& h,
                        std::vector<Site> sites);

absl::Status ValidateModel(const DistanceModel& model,
                           const Instance& instance);

struct ShortestPathTree {
  int source = 0;
  std::vector<double> distance;
  // -1 for the source.
  std::vector<int> predecessor;
};

// Dijkstra; among equally short predecessors the smallest unit index wins.
absl::StatusOr<ShortestPathTree> ShortestPaths(const AdjacencyGraph& graph,
                                               int source);

// Every shortest path from `source`: predecessors[v] lists all u with
// d(u) + δ(u, v) = d(v) (relative tolerance `tol`). `order` sorts units by
// distance, so predecessors always come first.
struct ShortestPathDag {
  int source = 0;
  std::vector<double> distance;
  std::vector<std::vector<int>> predecessors;
  std::vector<int> order;
};

absl::StatusOr<ShortestPathDag> AllShortestPaths(const AdjacencyGraph& graph,
                                                 int source,
                                                 double tol = 1e-12);

// Unit `x` or a planar point, for EvalF.
using Location = std::variant<Point, UnitSite>;

absl::StatusOr<double> EvalF(const DistanceModel& model,
                             const Instance& instance, int cluster,
                             const Location& x);

// costs(i, j) = h(d_i(s_i, x_j)); μ and ω are not included.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(int k, int m) : k_(k), m_(m), data_(static_cast<size_t>(k) * m) {}
  CostMatrix(int k, int m, std::vector<double> row_major)
      : k_(k), m_(m), data_(std::move(row_major)) {}

  int k() const { return k_; }
  int m() const { return m_; }
  double operator()(int i, int j) const {
    return data_[static_cast<size_t>(i) * m_ + j];
  }
  double& operator()(int i, int j) {
    return data_[static_cast<size_t>(i) * m_ + j];
  }
  double MaxAbs() const;

 private:
  int k_ = 0;
  int m_ = 0;
  std::vector<double> data_;
};

absl::StatusOr<CostMatrix> ComputeCostMatrix(const Instance& instance,
                                             const DistanceModel& model);

// Weighted covariance; may be singular.
struct Covariance2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

struct AnisotropyEstimate {
  std::vector<SpdMatrix2> matrices;
  std::vector<Covariance2> covariances;
  // Clusters whose covariance needed eigenvalue clamping.
  std::vector<bool> regularized;
};

// Per reference cluster: weighted covariance V_i, eigendecomposition
// V_i = Q diag(σ) Qᵀ and M_i = Q diag(1/σ) Qᵀ. Eigenvalues below
// f = covariance_floor × max(σ_max, covariance_floor) are clamped to f.
absl::StatusOr<AnisotropyEstimate> EstimateAnisotropy(
    const Instance& instance, const FractionalClustering& reference,
    const Tolerances& tol = DefaultTolerances());

}  // namespace gvd

#endif  // GVD_DISTANCE_H_

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

// Core records: units, adjacency graph, instances and (fractional)
// clusterings, plus the balance predicates on top of them.

#ifndef GVD_MODEL_H_
#define GVD_MODEL_H_

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace gvd {

// Every tolerance the library uses. Tests may tighten these.
struct Tolerances {
  // Relative capacity-sum mismatch below which κ is rescaled silently.
  double capacity_normalize = 1e-6;
  // Column sums of a clustering must equal one within this.
  double column_sum = 1e-9;
  // Hybrid absolute/relative tolerance for strong balance.
  double balance = 1e-9;
  // Entry counts as integral if within this of 0 or 1.
  double integer = 1e-12;
  // Ties between f-values (scaled by max(1, |cost|)).
  double tie = 1e-9;
  // Eigenvalue floor factor for covariance regularization.
  double covariance_floor = 1e-10;
};

const Tolerances& DefaultTolerances();

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double Dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double SquaredNorm(Point a) { return Dot(a, a); }
inline double Norm(Point a) { return std::hypot(a.x, a.y); }

struct Unit {
  std::string id;
  Point position;
  double weight = 1.0;
};

// Undirected edge between two unit indices.
struct Edge {
  int a = 0;
  int b = 0;
  double length = 1.0;
};

class AdjacencyGraph {
 public:
  struct Neighbor {
    int unit;
    double length;
  };

  // Edges are stored as given; use Validate() to check the invariants.
  AdjacencyGraph(int num_units, std::vector<Edge> edges);

  int num_units() const { return static_cast<int>(adjacency_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Neighbor> neighbors(int unit) const {
    return adjacency_[unit];
  }

  // Positive lengths, no self-loops, endpoints in range.
  absl::Status Validate() const;
  bool IsConnected() const;
  // Connectivity of the subgraph induced by `members` (true when empty).
  bool InducesConnected(std::span<const int> members) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

struct Instance {
  std::vector<Unit> units;
  std::optional<AdjacencyGraph> graph;
  int k = 1;
  std::vector<double> capacities;

  int num_units() const { return static_cast<int>(units.size()); }
  double TotalWeight() const;
  double TotalCapacity() const;
  std::optional<int> FindUnit(const std::string& id) const;
};

struct Diagnostic {
  enum class Kind {
    kDimension,
    kNonpositiveWeight,
    kNonpositiveCapacity,
    kCapacitySum,
    kBadEdge,
    kDisconnected,
    kDuplicateId,
  };
  Kind kind;
  std::string message;
};

// Checks all instance invariants. Never fails; returns an empty list when
// the instance is valid. The capacity sum is checked exactly (relative
// 1e-9), i.e. before any normalization.
std::vector<Diagnostic> ValidateInstance(const Instance& instance);

// Rescales capacities when the relative sum mismatch is within
// tol.capacity_normalize and then validates. Any remaining diagnostic is
// reported as InvalidArgument.
absl::StatusOr<Instance> NormalizeInstance(
    Instance instance, const Tolerances& tol = DefaultTolerances());

// Sparse k×m matrix ξ with column sums one. Stored column-wise: every unit
// keeps its (cluster, value) entries sorted by cluster.
class FractionalClustering {
 public:
  struct Entry {
    int cluster;
    double value;
  };

  FractionalClustering() = default;
  FractionalClustering(int k, int m) : k_(k), columns_(m) {}

  // Integer clustering from one label per unit.
  static FractionalClustering FromLabels(int k, std::span<const int> labels);

  int k() const { return k_; }
  int m() const { return static_cast<int>(columns_.size()); }

  // Setting a value <= 0 erases the entry.
  void Set(int cluster, int unit, double value);
  double Get(int cluster, int unit) const;
  std::span<const Entry> column(int unit) const { return columns_[unit]; }

  std::vector<int> Support(int cluster) const;
  std::vector<std::vector<int>> Supports() const;
  int NumNonzeros() const;
  // Units with some entry strictly between 0 and 1.
  std::vector<int> FractionalUnits(double tol = 1e-12) const;
  int NumFractionalEntries(double tol = 1e-12) const;
  bool IsInteger(double tol = 1e-12) const;
  // Cluster with the largest entry per unit (lowest index on ties).
  std::vector<int> Labels() const;

  // Column sums one, entries in (0, 1], indices in range.
  absl::Status Validate(double column_tol = 1e-9) const;

  friend bool operator==(const FractionalClustering& a,
                         const FractionalClustering& b);

 private:
  int k_ = 0;
  std::vector<std::vector<Entry>> columns_;
};

struct BalanceReport {
  std::vector<double> cluster_weights;
  double max_rel_deviation = 0.0;
  double avg_rel_deviation = 0.0;
};

struct BalanceCheck {
  BalanceReport report;
  bool strong = false;
  bool epsilon_balanced = false;
  bool integer = false;
};

// ω(C_i) for every cluster. Fails on dimension mismatch or an empty
// (all-zero) cluster.
absl::StatusOr<std::vector<double>> ClusterWeights(
    const FractionalClustering& clustering, const Instance& instance);

absl::StatusOr<BalanceCheck> CheckBalance(
    const FractionalClustering& clustering, const Instance& instance,
    double epsilon, const Tolerances& tol = DefaultTolerances());

// c(C_i) = Σ_j ξ_ij ω_j x_j / ω(C_i).
absl::StatusOr<std::vector<Point>> ClusterCentroids(
    const FractionalClustering& clustering, const Instance& instance);

}  // namespace gvd

#endif  // GVD_MODEL_H_

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

#include "gvd/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include "absl/strings/str_cat.h"

namespace gvd {

const Tolerances& DefaultTolerances() {
  static const Tolerances kDefaults;
  return kDefaults;
}

AdjacencyGraph::AdjacencyGraph(int num_units, std::vector<Edge> edges)
    : edges_(std::move(edges)), adjacency_(std::max(num_units, 0)) {
  for (const Edge& e : edges_) {
    if (e.a < 0 || e.b < 0 || e.a >= num_units || e.b >= num_units) continue;
    adjacency_[e.a].push_back({e.b, e.length});
    if (e.a != e.b) adjacency_[e.b].push_back({e.a, e.length});
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& l, const Neighbor& r) {
                return l.unit < r.unit;
              });
  }
}

absl::Status AdjacencyGraph::Validate() const {
  const int n = num_units();
  for (size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.a < 0 || edge.b < 0 || edge.a >= n || edge.b >= n) {
      return absl::InvalidArgumentError(
          absl::StrCat("edge ", e, " references a unit out of range"));
    }
    if (edge.a == edge.b) {
      return absl::InvalidArgumentError(
          absl::StrCat("edge ", e, " is a self-loop"));
    }
    if (!(edge.length > 0.0) || !std::isfinite(edge.length)) {
      return absl::InvalidArgumentError(
          absl::StrCat("edge ", e, " has nonpositive length"));
    }
  }
  return absl::OkStatus();
}

bool AdjacencyGraph::IsConnected() const {
  std::vector<int> all(num_units());
  std::iota(all.begin(), all.end(), 0);
  return InducesConnected(all);
}

bool AdjacencyGraph::InducesConnected(std::span<const int> members) const {
  if (members.empty()) return true;
  std::vector<char> inside(num_units(), 0), seen(num_units(), 0);
  for (int u : members) inside[u] = 1;
  std::queue<int> queue;
  queue.push(members.front());
  seen[members.front()] = 1;
  size_t reached = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop();
    for (const Neighbor& nb : adjacency_[u]) {
      if (inside[nb.unit] && !seen[nb.unit]) {
        seen[nb.unit] = 1;
        ++reached;
        queue.push(nb.unit);
      }
    }
  }
  std::set<int> distinct(members.begin(), members.end());
  return reached == distinct.size();
}

double Instance::TotalWeight() const {
  double total = 0.0;
  for (const Unit& u : units) total += u.weight;
  return total;
}

double Instance::TotalCapacity() const {
  return std::accumulate(capacities.begin(), capacities.end(), 0.0);
}

std::optional<int> Instance::FindUnit(const std::string& id) const {
  for (int j = 0; j < num_units(); ++j) {
    if (units[j].id == id) return j;
  }
  return std::nullopt;
}

std::vector<Diagnostic> ValidateInstance(const Instance& instance) {
  std::vector<Diagnostic> out;
  using Kind = Diagnostic::Kind;
  const int m = instance.num_units();
  if (instance.k < 1 || m < instance.k) {
    out.push_back({Kind::kDimension,
                   absl::StrCat("need m >= k >= 1, got m=", m,
                                " k=", instance.k)});
  }
  if (static_cast<int>(instance.capacities.size()) != instance.k) {
    out.push_back({Kind::kDimension,
                   absl::StrCat("expected ", instance.k, " capacities, got ",
                                instance.capacities.size())});
  }
  std::set<std::string> ids;
  for (int j = 0; j < m; ++j) {
    const Unit& u = instance.units[j];
    if (!(u.weight > 0.0) || !std::isfinite(u.weight)) {
      out.push_back({Kind::kNonpositiveWeight,
                     absl::StrCat("unit '", u.id, "' has weight ", u.weight)});
    }
    if (!ids.insert(u.id).second) {
      out.push_back(
          {Kind::kDuplicateId, absl::StrCat("duplicate unit id '", u.id, "'")});
    }
  }
  for (size_t i = 0; i < instance.capacities.size(); ++i) {
    if (!(instance.capacities[i] > 0.0)) {
      out.push_back({Kind::kNonpositiveCapacity,
                     absl::StrCat("capacity ", i, " is ",
                                  instance.capacities[i])});
    }
  }
  const double total_w = instance.TotalWeight();
  const double total_c = instance.TotalCapacity();
  if (std::abs(total_c - total_w) > 1e-9 * std::max(1.0, std::abs(total_w))) {
    out.push_back({Kind::kCapacitySum,
                   absl::StrCat("capacities sum to ", total_c,
                                " but weights sum to ", total_w)});
  }
  if (instance.graph) {
    const AdjacencyGraph& g = *instance.graph;
    if (g.num_units() != m) {
      out.push_back({Kind::kDimension,
                     absl::StrCat("graph has ", g.num_units(),
                                  " nodes for ", m, " units")});
    } else if (absl::Status s = g.Validate(); !s.ok()) {
      out.push_back({Kind::kBadEdge, std::string(s.message())});
    } else if (!g.IsConnected()) {
      out.push_back({Kind::kDisconnected, "adjacency graph is disconnected"});
    }
  }
  return out;
}

absl::StatusOr<Instance> NormalizeInstance(Instance instance,
                                           const Tolerances& tol) {
  const double total_w = instance.TotalWeight();
  const double total_c = instance.TotalCapacity();
  if (static_cast<int>(instance.capacities.size()) == instance.k &&
      total_w > 0.0 && total_c > 0.0 &&
      std::abs(total_c - total_w) / total_w <= tol.capacity_normalize) {
    const double scale = total_w / total_c;
    for (double& c : instance.capacities) c *= scale;
  }
  std::vector<Diagnostic> diagnostics = ValidateInstance(instance);
  if (!diagnostics.empty()) {
    std::string message;
    for (const Diagnostic& d : diagnostics) {
      if (!message.empty()) message += "; ";
      message += d.message;
    }
    return absl::InvalidArgumentError(message);
  }
  return instance;
}

FractionalClustering FractionalClustering::FromLabels(
    int k, std::span<const int> labels) {
  FractionalClustering c(k, static_cast<int>(labels.size()));
  for (size_t j = 0; j < labels.size(); ++j) {
    c.columns_[j].push_back({labels[j], 1.0});
  }
  return c;
}

void FractionalClustering::Set(int cluster, int unit, double value) {
  auto& col = columns_[unit];
  auto it = std::lower_bound(
      col.begin(), col.end(), cluster,
      [](const Entry& e, int c) { return e.cluster < c; });
  const bool present = it != col.end() && it->cluster == cluster;
  if (value <= 0.0) {
    if (present) col.erase(it);
    return;
  }
  if (present) {
    it->value = value;
  } else {
    col.insert(it, {cluster, value});
  }
}

double FractionalClustering::Get(int cluster, int unit) const {
  for (const Entry& e : columns_[unit]) {
    if (e.cluster == cluster) return e.value;
  }
  return 0.0;
}

std::vector<int> FractionalClustering::Support(int cluster) const {
  std::vector<int> out;
  for (int j = 0; j < m(); ++j) {
    if (Get(cluster, j) > 0.0) out.push_back(j);
  }
  return out;
}

std::vector<std::vector<int>> FractionalClustering::Supports() const {
  std::vector<std::vector<int>> out(k_);
  for (int j = 0; j < m(); ++j) {
    for (const Entry& e : columns_[j]) out[e.cluster].push_back(j);
  }
  return out;
}

int FractionalClustering::NumNonzeros() const {
  int n = 0;
  for (const auto& col : columns_) n += static_cast<int>(col.size());
  return n;
}

std::vector<int> FractionalClustering::FractionalUnits(double tol) const {
  std::vector<int> out;
  for (int j = 0; j < m(); ++j) {
    for (const Entry& e : columns_[j]) {
      if (e.value < 1.0 - tol) {
        out.push_back(j);
        break;
      }
    }
  }
  return out;
}

int FractionalClustering::NumFractionalEntries(double tol) const {
  int n = 0;
  for (const auto& col : columns_) {
    for (const Entry& e : col) {
      if (e.value > tol && e.value < 1.0 - tol) ++n;
    }
  }
  return n;
}

bool FractionalClustering::IsInteger(double tol) const {
  for (const auto& col : columns_) {
    for (const Entry& e : col) {
      if (e.value > tol && e.value < 1.0 - tol) return false;
    }
  }
  return true;
}

std::vector<int> FractionalClustering::Labels() const {
  std::vector<int> labels(m(), -1);
  for (int j = 0; j < m(); ++j) {
    double best = -1.0;
    for (const Entry& e : columns_[j]) {
      if (e.value > best) {
        best = e.value;
        labels[j] = e.cluster;
      }
    }
  }
  return labels;
}

absl::Status FractionalClustering::Validate(double column_tol) const {
  for (int j = 0; j < m(); ++j) {
    double sum = 0.0;
    for (const Entry& e : columns_[j]) {
      if (e.cluster < 0 || e.cluster >= k_) {
        return absl::InvalidArgumentError(
            absl::StrCat("unit ", j, " references cluster ", e.cluster));
      }
      if (!(e.value > 0.0) || e.value > 1.0 + column_tol) {
        return absl::InvalidArgumentError(
            absl::StrCat("entry (", e.cluster, ",", j, ") = ", e.value));
      }
      sum += e.value;
    }
    if (std::abs(sum - 1.0) > column_tol) {
      return absl::InvalidArgumentError(
          absl::StrCat("column ", j, " sums to ", sum));
    }
  }
  return absl::OkStatus();
}

bool operator==(const FractionalClustering& a, const FractionalClustering& b) {
  if (a.k_ != b.k_ || a.m() != b.m()) return false;
  for (int j = 0; j < a.m(); ++j) {
    const auto& ca = a.columns_[j];
    const auto& cb = b.columns_[j];
    if (ca.size() != cb.size()) return false;
    for (size_t t = 0; t < ca.size(); ++t) {
      if (ca[t].cluster != cb[t].cluster || ca[t].value != cb[t].value) {
        return false;
      }
    }
  }
  return true;
}

absl::StatusOr<std::vector<double>> ClusterWeights(
    const FractionalClustering& clustering, const Instance& instance) {
  if (clustering.k() != instance.k ||
      clustering.m() != instance.num_units()) {
    return absl::InvalidArgumentError(
        absl::StrCat("clustering is ", clustering.k(), "x", clustering.m(),
                     ", instance is ", instance.k, "x",
                     instance.num_units()));
  }
  std::vector<double> weights(instance.k, 0.0);
  std::vector<char> touched(instance.k, 0);
  for (int j = 0; j < clustering.m(); ++j) {
    for (const auto& e : clustering.column(j)) {
      weights[e.cluster] += e.value * instance.units[j].weight;
      touched[e.cluster] = 1;
    }
  }
  for (int i = 0; i < instance.k; ++i) {
    if (!touched[i]) {
      return absl::InvalidArgumentError(
          absl::StrCat("cluster ", i, " is empty"));
    }
  }
  return weights;
}

absl::StatusOr<BalanceCheck> CheckBalance(
    const FractionalClustering& clustering, const Instance& instance,
    double epsilon, const Tolerances& tol) {
  if (epsilon < 0.0) return absl::InvalidArgumentError("epsilon < 0");
  absl::StatusOr<std::vector<double>> weights =
      ClusterWeights(clustering, instance);
  if (!weights.ok()) return weights.status();
  BalanceCheck check;
  check.report.cluster_weights = *std::move(weights);
  check.strong = true;
  check.epsilon_balanced = true;
  double total_dev = 0.0;
  for (int i = 0; i < instance.k; ++i) {
    const double w = check.report.cluster_weights[i];
    const double kappa = instance.capacities[i];
    const double dev = std::abs(w - kappa) / kappa;
    check.report.max_rel_deviation = std::max(check.report.max_rel_deviation,
                                              dev);
    total_dev += dev;
    if (std::abs(w - kappa) > tol.balance * std::max(1.0, kappa)) {
      check.strong = false;
    }
    // A hair of slack so that exact bounds survive floating point sums.
    const double slack = tol.balance * std::max(1.0, kappa);
    if (w < (1.0 - epsilon) * kappa - slack ||
        w > (1.0 + epsilon) * kappa + slack) {
      check.epsilon_balanced = false;
    }
  }
  check.report.avg_rel_deviation = total_dev / instance.k;
  check.integer = clustering.IsInteger(tol.integer);
  return check;
}

absl::StatusOr<std::vector<Point>> ClusterCentroids(
    const FractionalClustering& clustering, const Instance& instance) {
  absl::StatusOr<std::vector<double>> weights =
      ClusterWeights(clustering, instance);
  if (!weights.ok()) return weights.status();
  std::vector<Point> centroids(instance.k);
  for (int j = 0; j < clustering.m(); ++j) {
    const Unit& u = instance.units[j];
    for (const auto& e : clustering.column(j)) {
      centroids[e.cluster] =
          centroids[e.cluster] + (e.value * u.weight) * u.position;
    }
  }
  for (int i = 0; i < instance.k; ++i) {
    centroids[i] = (1.0 / (*weights)[i]) * centroids[i];
  }
  return centroids;
}

}  // namespace gvd

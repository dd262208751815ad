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

#include "gvd/rounding.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <tuple>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace gvd {
namespace {

constexpr double kDropTol = 1e-12;

absl::Status CheckDimensions(const Instance& instance,
                             const FractionalClustering& clustering) {
  if (clustering.k() != instance.k || clustering.m() != instance.num_units()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "clustering is ", clustering.k(), "x", clustering.m(),
        ", instance has k=", instance.k, ", m=", instance.num_units()));
  }
  return clustering.Validate();
}

absl::Status CheckStrongBalance(const Instance& instance,
                                const FractionalClustering& clustering) {
  absl::StatusOr<BalanceCheck> check = CheckBalance(clustering, instance, 0.0);
  if (!check.ok()) return check.status();
  if (!check->strong) {
    return absl::InvalidArgumentError(
        absl::StrCat("input is not strongly balanced (max deviation ",
                     check->report.max_rel_deviation, ")"));
  }
  return absl::OkStatus();
}

// Drops negligible entries and renormalizes the affected columns.
FractionalClustering Clean(const FractionalClustering& in) {
  FractionalClustering out(in.k(), in.m());
  for (int j = 0; j < in.m(); ++j) {
    double sum = 0.0;
    for (const auto& e : in.column(j)) {
      if (e.value > kDropTol) sum += e.value;
    }
    for (const auto& e : in.column(j)) {
      if (e.value > kDropTol) out.Set(e.cluster, j, e.value / sum);
    }
    if (out.column(j).size() == 1) out.Set(out.column(j)[0].cluster, j, 1.0);
  }
  return out;
}

bool IsSplit(const FractionalClustering& c, int j) {
  return c.column(j).size() > 1;
}

// One cycle of the graph on clusters [0, k) and split units k + j, as an
// alternating node list starting and ending at a cluster (last == first
// omitted). Empty when acyclic.
std::vector<int> FindCycle(const FractionalClustering& c) {
  const int k = c.k();
  const int n = k + c.m();
  std::vector<std::vector<int>> adj(n);
  for (int j = 0; j < c.m(); ++j) {
    if (!IsSplit(c, j)) continue;
    for (const auto& e : c.column(j)) {
      adj[e.cluster].push_back(k + j);
      adj[k + j].push_back(e.cluster);
    }
  }
  std::vector<int> parent(n, -2);
  std::vector<size_t> next(n, 0);
  for (int root = 0; root < k; ++root) {
    if (parent[root] != -2) continue;
    parent[root] = -1;
    std::vector<int> stack = {root};
    while (!stack.empty()) {
      const int v = stack.back();
      if (next[v] == adj[v].size()) {
        stack.pop_back();
        continue;
      }
      const int w = adj[v][next[v]++];
      if (w == parent[v]) continue;
      if (parent[w] == -2) {
        parent[w] = v;
        stack.push_back(w);
        continue;
      }
      // Back edge v–w: w is an ancestor of v on the stack.
      std::vector<int> cycle;
      for (int x = v; x != w; x = parent[x]) cycle.push_back(x);
      cycle.push_back(w);
      std::reverse(cycle.begin(), cycle.end());
      if (cycle.front() >= k) std::rotate(cycle.begin(), cycle.begin() + 1,
                                          cycle.end());
      return cycle;
    }
  }
  return {};
}

}  // namespace

double RoundingBound(const Instance& instance) {
  double best = 0.0;
  for (const Unit& u : instance.units) {
    for (double kappa : instance.capacities) {
      best = std::max(best, u.weight / kappa);
    }
  }
  return best;
}

absl::StatusOr<double> MaxRelativeDeviation(
    const FractionalClustering& clustering, const Instance& instance) {
  if (absl::Status s = CheckDimensions(instance, clustering); !s.ok()) {
    return s;
  }
  // Empty clusters are allowed here.
  std::vector<double> weights(instance.k, 0.0);
  for (int j = 0; j < clustering.m(); ++j) {
    for (const auto& e : clustering.column(j)) {
      weights[e.cluster] += e.value * instance.units[j].weight;
    }
  }
  double worst = 0.0;
  for (int i = 0; i < instance.k; ++i) {
    worst = std::max(worst, std::abs(weights[i] - instance.capacities[i]) /
                                instance.capacities[i]);
  }
  return worst;
}

absl::StatusOr<FractionalClustering> CancelCycles(
    const FractionalClustering& clustering, const Instance& instance,
    int* cycles) {
  if (absl::Status s = CheckDimensions(instance, clustering); !s.ok()) {
    return s;
  }
  FractionalClustering c = Clean(clustering);
  const int k = c.k();
  int count = 0;
  for (std::vector<int> cycle = FindCycle(c); !cycle.empty();
       cycle = FindCycle(c)) {
    // cycle = c0, u0, c1, u1, ...; unit u_r moves weight from c_{r+1} to c_r.
    const int len = static_cast<int>(cycle.size());
    double t = std::numeric_limits<double>::infinity();
    for (int r = 1; r < len; r += 2) {
      const int j = cycle[r] - k;
      const int next = cycle[(r + 1) % len];
      t = std::min(t, c.Get(next, j) * instance.units[j].weight);
    }
    for (int r = 1; r < len; r += 2) {
      const int j = cycle[r] - k;
      const int prev = cycle[r - 1];
      const int next = cycle[(r + 1) % len];
      const double w = instance.units[j].weight;
      const double down = c.Get(next, j) - t / w;
      c.Set(prev, j, c.Get(prev, j) + t / w);
      c.Set(next, j, down <= kDropTol ? 0.0 : down);
      if (c.column(j).size() == 1) c.Set(c.column(j)[0].cluster, j, 1.0);
    }
    ++count;
  }
  if (cycles != nullptr) *cycles = count;
  return c;
}

absl::StatusOr<RoundingOutcome> RoundTree(const Instance& instance,
                                          const FractionalClustering& input,
                                          const RoundTreeOptions& options) {
  if (absl::Status s = CheckDimensions(instance, input); !s.ok()) return s;
  if (absl::Status s = CheckStrongBalance(instance, input); !s.ok()) return s;
  RoundingOutcome out;
  out.epsilon_bound = RoundingBound(instance);
  FractionalClustering c = Clean(input);
  if (!FindCycle(c).empty()) {
    if (options.require_extremal) {
      return absl::FailedPreconditionError(
          "assignment graph has a cycle; input is not extremal");
    }
    absl::StatusOr<FractionalClustering> acyclic =
        CancelCycles(c, instance, &out.cycles_cancelled);
    if (!acyclic.ok()) return acyclic.status();
    c = *std::move(acyclic);
  }

  const int k = c.k();
  const int m = c.m();
  std::vector<double> integral_load(k, 0.0);
  std::vector<std::vector<int>> split_units(k);
  std::vector<std::vector<int>> split_clusters(m);
  for (int j = 0; j < m; ++j) {
    for (const auto& e : c.column(j)) {
      if (IsSplit(c, j)) {
        split_units[e.cluster].push_back(j);
        split_clusters[j].push_back(e.cluster);
      } else {
        integral_load[e.cluster] += instance.units[j].weight;
      }
    }
  }
  if (options.order == RoundingOrder::kBestFit) {
    for (auto& units : split_units) {
      std::stable_sort(units.begin(), units.end(), [&](int a, int b) {
        return instance.units[a].weight > instance.units[b].weight;
      });
    }
  }

  std::vector<int> label(m, -1);
  for (int j = 0; j < m; ++j) {
    if (!IsSplit(c, j)) label[j] = c.column(j)[0].cluster;
  }
  std::vector<bool> visited(k, false);
  for (int root = 0; root < k; ++root) {
    if (visited[root] || split_units[root].empty()) continue;
    // BFS over clusters; lowest index first among equal hop distance.
    std::vector<std::pair<int, int>> order;  // (cluster, predecessor unit)
    std::vector<int> frontier = {root};
    std::vector<int> pred_unit(k, -1);
    visited[root] = true;
    while (!frontier.empty()) {
      std::sort(frontier.begin(), frontier.end());
      std::vector<int> next;
      for (int i : frontier) {
        order.emplace_back(i, pred_unit[i]);
        for (int j : split_units[i]) {
          if (j == pred_unit[i]) continue;
          for (int l : split_clusters[j]) {
            if (visited[l]) continue;
            visited[l] = true;
            pred_unit[l] = j;
            next.push_back(l);
          }
        }
      }
      frontier = std::move(next);
    }
    for (const auto& [i, j0] : order) {
      double room = instance.capacities[i] - integral_load[i];
      if (j0 >= 0 && label[j0] < 0) {
        label[j0] = i;
        room -= instance.units[j0].weight;
      }
      double taken = 0.0;
      for (int j : split_units[i]) {
        if (j == j0) continue;
        if (label[j] >= 0) continue;
        taken += instance.units[j].weight;
        if (taken > room + 1e-12 * std::max(1.0, instance.capacities[i])) {
          break;
        }
        label[j] = i;
      }
    }
  }
  // Units no cluster claimed go to their lowest supporting cluster; this
  // cannot happen on a forest but keeps the output total.
  for (int j = 0; j < m; ++j) {
    if (label[j] < 0) label[j] = c.column(j)[0].cluster;
  }
  for (int j = 0; j < m; ++j) {
    if (IsSplit(c, j)) {
      out.moved_units.push_back(
          {j, {c.column(j).begin(), c.column(j).end()}, label[j]});
    }
  }
  out.clustering = FractionalClustering::FromLabels(k, label);
  absl::StatusOr<double> dev = MaxRelativeDeviation(out.clustering, instance);
  if (!dev.ok()) return dev.status();
  out.epsilon_achieved = *dev;
  return out;
}

namespace {

// Graph distance from `sources` to every unit.
std::vector<double> MultiSourceDistances(const AdjacencyGraph& graph,
                                         const std::vector<int>& sources) {
  std::vector<double> dist(graph.num_units(),
                           std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int s : sources) {
    dist[s] = 0.0;
    heap.emplace(0.0, s);
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& nb : graph.neighbors(u)) {
      if (d + nb.length < dist[nb.unit]) {
        dist[nb.unit] = d + nb.length;
        heap.emplace(dist[nb.unit], nb.unit);
      }
    }
  }
  return dist;
}

}  // namespace

absl::StatusOr<RoundingOutcome> RoundConnected(
    const Instance& instance, const FractionalClustering& input,
    const DistanceModel& model) {
  if (!instance.graph) {
    return absl::InvalidArgumentError("connected rounding needs a graph");
  }
  if (model.k() != instance.k) {
    return absl::InvalidArgumentError("model and instance disagree on k");
  }
  for (const Metric& metric : model.metrics) {
    if (!IsGraphMetric(metric)) {
      return absl::InvalidArgumentError(
          "connected rounding needs graph metrics");
    }
  }
  if (!IsAffine(model.transform)) {
    return absl::InvalidArgumentError(
        "connected rounding needs an affine transform");
  }
  if (absl::Status s = CheckDimensions(instance, input); !s.ok()) return s;
  const AdjacencyGraph& graph = *instance.graph;
  const std::vector<int> sites = model.SiteUnits();
  const int k = instance.k;
  const int m = instance.num_units();

  FractionalClustering c = Clean(input);
  std::vector<int> label(m, -1);
  std::vector<std::vector<int>> region(k);
  std::vector<double> load(k, 0.0);
  std::vector<int> pending;
  for (int j = 0; j < m; ++j) {
    for (const auto& e : c.column(j)) {
      load[e.cluster] += e.value * instance.units[j].weight;
    }
    if (IsSplit(c, j)) {
      pending.push_back(j);
    } else {
      label[j] = c.column(j)[0].cluster;
      region[label[j]].push_back(j);
    }
  }
  for (int i = 0; i < k; ++i) {
    if (!graph.InducesConnected(region[i])) {
      return absl::FailedPreconditionError(
          absl::StrCat("integral part of cluster ", i, " is disconnected"));
    }
  }

  RoundingOutcome out;
  out.epsilon_bound = RoundingBound(instance);
  while (!pending.empty()) {
    std::vector<std::vector<double>> dist(k);
    for (int i = 0; i < k; ++i) {
      dist[i] = MultiSourceDistances(
          graph, region[i].empty() ? std::vector<int>{sites[i]} : region[i]);
    }
    // (max deviation, distance, cluster, unit)
    std::tuple<double, double, int, int> best = {
        std::numeric_limits<double>::infinity(), 0.0, -1, -1};
    for (int j : pending) {
      for (const auto& e : c.column(j)) {
        const int i = e.cluster;
        // An empty cluster starts at its site when the site is still open.
        bool touches = false;
        if (region[i].empty()) {
          const int s = sites[i];
          touches = j == s || label[s] >= 0 || c.Get(i, s) <= 0.0;
        }
        for (const auto& nb : graph.neighbors(j)) {
          if (label[nb.unit] == i) touches = true;
        }
        if (!touches) continue;
        double worst = 0.0;
        for (int l = 0; l < k; ++l) {
          const double w = instance.units[j].weight;
          const double after =
              load[l] + (l == i ? w : 0.0) - c.Get(l, j) * w;
          worst = std::max(worst, std::abs(after - instance.capacities[l]) /
                                      instance.capacities[l]);
        }
        const auto key = std::make_tuple(worst, dist[i][j], i, j);
        if (key < best) best = key;
      }
    }
    const auto [worst, d, i, j] = best;
    if (i < 0) {
      return absl::FailedPreconditionError(absl::StrCat(
          "no connectivity-preserving assignment for units ",
          absl::StrJoin(pending, ",", [&](std::string* s, int u) {
            absl::StrAppend(s, instance.units[u].id);
          })));
    }
    const double w = instance.units[j].weight;
    for (const auto& e : c.column(j)) load[e.cluster] -= e.value * w;
    load[i] += w;
    out.moved_units.push_back({j, {c.column(j).begin(), c.column(j).end()}, i});
    label[j] = i;
    region[i].push_back(j);
    pending.erase(std::find(pending.begin(), pending.end(), j));
  }
  out.clustering = FractionalClustering::FromLabels(k, label);
  absl::StatusOr<double> dev = MaxRelativeDeviation(out.clustering, instance);
  if (!dev.ok()) return dev.status();
  out.epsilon_achieved = *dev;
  return out;
}

}  // namespace gvd

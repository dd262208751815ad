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

#include "gvd/transport.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <tuple>
#include <utility>

#include "absl/strings/str_cat.h"

namespace gvd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lexicographic cost: artificial part first. Artificial parts are integer
// valued, so comparing them exactly is safe.
struct LexCost {
  double art = 0.0;
  double real = 0.0;

  friend LexCost operator+(LexCost a, LexCost b) {
    return {a.art + b.art, a.real + b.real};
  }
  friend LexCost operator-(LexCost a, LexCost b) {
    return {a.art - b.art, a.real - b.real};
  }
};

// Restricted problem after pin substitution.
struct Reduced {
  std::vector<int> free_units;         // global unit index per free unit
  std::vector<int> pinned_cluster;     // per global unit, -1 if free
  std::vector<double> residual;        // κ_i minus pinned weight
  // allowed[j * k + i] for global unit j.
  std::vector<char> allowed;
};

absl::StatusOr<Reduced> Reduce(const TransportProblem& problem) {
  const int k = problem.k();
  const int m = problem.m();
  if (static_cast<int>(problem.weights.size()) != m ||
      static_cast<int>(problem.capacities.size()) != k) {
    return absl::InvalidArgumentError("problem dimensions do not match");
  }
  if (absl::Status s = problem.constraints.Validate(k, m); !s.ok()) return s;
  double total_w = 0.0;
  for (double w : problem.weights) {
    if (!(w > 0.0)) return absl::InvalidArgumentError("nonpositive weight");
    total_w += w;
  }
  const double total_c = std::accumulate(problem.capacities.begin(),
                                         problem.capacities.end(), 0.0);
  if (std::abs(total_c - total_w) > 1e-9 * std::max(1.0, total_w)) {
    return absl::InvalidArgumentError(
        absl::StrCat("capacities sum to ", total_c, ", weights to ", total_w));
  }

  Reduced r;
  r.pinned_cluster.assign(m, -1);
  r.residual = problem.capacities;
  r.allowed.assign(static_cast<size_t>(m) * k, 1);
  for (const Assignment& p : problem.constraints.pins) {
    r.pinned_cluster[p.unit] = p.cluster;
    r.residual[p.cluster] -= problem.weights[p.unit];
  }
  for (const Assignment& e : problem.constraints.exclusions) {
    r.allowed[static_cast<size_t>(e.unit) * k + e.cluster] = 0;
  }
  const double slack = 1e-9 * std::max(1.0, total_w);
  for (int i = 0; i < k; ++i) {
    if (r.residual[i] < -slack) {
      return absl::FailedPreconditionError(absl::StrCat(
          "pins exceed the capacity of cluster ", i, " by ", -r.residual[i]));
    }
    r.residual[i] = std::max(0.0, r.residual[i]);
  }
  for (int j = 0; j < m; ++j) {
    if (r.pinned_cluster[j] >= 0) continue;
    r.free_units.push_back(j);
    bool any = false;
    for (int i = 0; i < k; ++i) any = any || r.allowed[static_cast<size_t>(j) * k + i];
    if (!any) {
      return absl::FailedPreconditionError(
          absl::StrCat("unit ", j, " is excluded from every cluster"));
    }
  }
  return r;
}

// Primal network simplex over units → clusters with an artificial root.
// Nodes: free units [0, n), clusters [n, n + k), root n + k.
class NetworkSimplex {
 public:
  NetworkSimplex(const TransportProblem& problem, const Reduced& reduced,
                 double tolerance)
      : problem_(problem), reduced_(reduced) {
    const int k = problem.k();
    num_units_ = static_cast<int>(reduced.free_units.size());
    num_nodes_ = num_units_ + k + 1;
    root_ = num_units_ + k;
    for (int a = 0; a < num_units_; ++a) {
      const int j = reduced.free_units[a];
      for (int i = 0; i < k; ++i) {
        if (!reduced.allowed[static_cast<size_t>(j) * k + i]) continue;
        AddArc(a, num_units_ + i, {0.0, problem.costs(i, j)}, 0.0);
      }
    }
    num_real_arcs_ = static_cast<int>(from_.size());
    for (int a = 0; a < num_units_; ++a) {
      AddArc(a, root_, {1.0, 0.0},
             problem.weights[reduced.free_units[a]]);
    }
    for (int i = 0; i < k; ++i) {
      AddArc(root_, num_units_ + i, {1.0, 0.0}, reduced.residual[i]);
    }
    cost_tol_ = tolerance * std::max(1.0, problem.costs.MaxAbs());
    double wmax = 1.0;
    for (double w : problem.weights) wmax = std::max(wmax, w);
    flow_tol_ = 1e-13 * wmax;

    parent_.assign(num_nodes_, -1);
    parent_arc_.assign(num_nodes_, -1);
    depth_.assign(num_nodes_, 0);
    potential_.assign(num_nodes_, {});
    in_tree_.assign(from_.size(), 0);
    tree_arcs_.assign(num_nodes_, {});
    for (int arc = num_real_arcs_; arc < static_cast<int>(from_.size());
         ++arc) {
      in_tree_[arc] = 1;
      const int child = from_[arc] == root_ ? to_[arc] : from_[arc];
      tree_arcs_[child].push_back(arc);
      tree_arcs_[root_].push_back(arc);
    }
    Rehang(root_, -1, -1);
  }

  absl::Status Run() {
    while (true) {
      const int entering = Price();
      if (entering < 0) break;
      Pivot(entering);
      ++pivots_;
    }
    double artificial = 0.0;
    for (int arc = num_real_arcs_; arc < static_cast<int>(from_.size());
         ++arc) {
      artificial += flow_[arc];
    }
    double total = 0.0;
    for (double w : problem_.weights) total += w;
    if (artificial > 1e-9 * std::max(1.0, total)) {
      return absl::FailedPreconditionError(
          absl::StrCat("restricted program is infeasible (", artificial,
                       " weight cannot be placed)"));
    }
    return absl::OkStatus();
  }

  // ξ for all units, pins included.
  FractionalClustering Clustering() const {
    const int k = problem_.k();
    const int m = problem_.m();
    FractionalClustering out(k, m);
    for (int j = 0; j < m; ++j) {
      if (reduced_.pinned_cluster[j] >= 0) out.Set(reduced_.pinned_cluster[j], j, 1.0);
    }
    std::vector<std::vector<std::pair<int, double>>> per_unit(num_units_);
    for (int arc = 0; arc < num_real_arcs_; ++arc) {
      if (flow_[arc] > flow_tol_) {
        per_unit[from_[arc]].push_back({to_[arc] - num_units_, flow_[arc]});
      }
    }
    for (int a = 0; a < num_units_; ++a) {
      const int j = reduced_.free_units[a];
      double sum = 0.0;
      for (const auto& [i, f] : per_unit[a]) sum += f;
      for (const auto& [i, f] : per_unit[a]) {
        double xi = f / sum;
        if (xi > 1.0 - 1e-12) xi = 1.0;
        out.Set(i, j, xi);
      }
    }
    return out;
  }

  int pivots() const { return pivots_; }

 private:
  void AddArc(int from, int to, LexCost cost, double flow) {
    from_.push_back(from);
    to_.push_back(to);
    cost_.push_back(cost);
    flow_.push_back(flow);
  }

  // Recomputes parent/depth/potential below `node`, which hangs from
  // `parent` via `arc`.
  void Rehang(int node, int parent, int arc) {
    std::vector<std::tuple<int, int, int>> stack = {{node, parent, arc}};
    while (!stack.empty()) {
      auto [v, p, a] = stack.back();
      stack.pop_back();
      parent_[v] = p;
      parent_arc_[v] = a;
      if (p < 0) {
        depth_[v] = 0;
        potential_[v] = {};
      } else {
        depth_[v] = depth_[p] + 1;
        potential_[v] = from_[a] == p ? potential_[p] + cost_[a]
                                      : potential_[p] - cost_[a];
      }
      for (int t : tree_arcs_[v]) {
        if (t == a) continue;
        const int w = from_[t] == v ? to_[t] : from_[t];
        stack.push_back({w, v, t});
      }
    }
  }

  LexCost ReducedCost(int arc) const {
    return cost_[arc] + potential_[from_[arc]] - potential_[to_[arc]];
  }

  // Dantzig pricing on the lexicographic reduced cost, lowest index on ties.
  int Price() const {
    int best = -1;
    LexCost best_rc;
    for (int arc = 0; arc < num_real_arcs_; ++arc) {
      if (in_tree_[arc]) continue;
      const LexCost rc = ReducedCost(arc);
      const bool eligible =
          rc.art < 0.0 || (rc.art == 0.0 && rc.real < -cost_tol_);
      if (!eligible) continue;
      if (best < 0 || rc.art < best_rc.art ||
          (rc.art == best_rc.art && rc.real < best_rc.real)) {
        best = arc;
        best_rc = rc;
      }
    }
    return best;
  }

  void Pivot(int entering) {
    const int u = from_[entering];
    const int v = to_[entering];
    // Paths up to the apex. Flow is pushed u → v, then up from v to the
    // apex, then down from the apex to u.
    std::vector<int> u_side, v_side;  // nodes whose parent arc is on cycle
    int a = u, b = v;
    while (a != b) {
      if (depth_[a] >= depth_[b]) {
        u_side.push_back(a);
        a = parent_[a];
      } else {
        v_side.push_back(b);
        b = parent_[b];
      }
    }
    auto forward_on_v = [&](int x) { return from_[parent_arc_[x]] == x; };
    auto forward_on_u = [&](int x) { return to_[parent_arc_[x]] == x; };

    double theta = kInf;
    for (int x : v_side) {
      if (!forward_on_v(x)) theta = std::min(theta, flow_[parent_arc_[x]]);
    }
    for (int x : u_side) {
      if (!forward_on_u(x)) theta = std::min(theta, flow_[parent_arc_[x]]);
    }
    // Strongly feasible rule: last blocking arc in traversal order from the
    // apex, i.e. nearest the apex on the v side, else nearest u.
    int leaving_child = -1;
    bool leaving_on_v = false;
    for (auto it = v_side.rbegin(); it != v_side.rend(); ++it) {
      if (!forward_on_v(*it) && flow_[parent_arc_[*it]] <= theta + flow_tol_) {
        leaving_child = *it;
        leaving_on_v = true;
        break;
      }
    }
    if (leaving_child < 0) {
      for (int x : u_side) {
        if (!forward_on_u(x) && flow_[parent_arc_[x]] <= theta + flow_tol_) {
          leaving_child = x;
          break;
        }
      }
    }

    flow_[entering] += theta;
    for (int x : v_side) {
      double& f = flow_[parent_arc_[x]];
      f += forward_on_v(x) ? theta : -theta;
      if (std::abs(f) <= flow_tol_) f = 0.0;
    }
    for (int x : u_side) {
      double& f = flow_[parent_arc_[x]];
      f += forward_on_u(x) ? theta : -theta;
      if (std::abs(f) <= flow_tol_) f = 0.0;
    }

    const int leaving = parent_arc_[leaving_child];
    in_tree_[leaving] = 0;
    in_tree_[entering] = 1;
    auto drop = [&](int node, int arc) {
      auto& list = tree_arcs_[node];
      list.erase(std::find(list.begin(), list.end(), arc));
    };
    drop(from_[leaving], leaving);
    drop(to_[leaving], leaving);
    tree_arcs_[u].push_back(entering);
    tree_arcs_[v].push_back(entering);
    if (leaving_on_v) {
      Rehang(v, u, entering);
    } else {
      Rehang(u, v, entering);
    }
  }

  const TransportProblem& problem_;
  const Reduced& reduced_;
  int num_units_ = 0;
  int num_nodes_ = 0;
  int root_ = 0;
  int num_real_arcs_ = 0;
  double cost_tol_ = 0.0;
  double flow_tol_ = 0.0;
  int pivots_ = 0;

  std::vector<int> from_, to_;
  std::vector<LexCost> cost_;
  std::vector<double> flow_;
  std::vector<char> in_tree_;
  std::vector<std::vector<int>> tree_arcs_;
  std::vector<int> parent_, parent_arc_, depth_;
  std::vector<LexCost> potential_;
};

struct SimplexOutcome {
  FractionalClustering clustering;
  int pivots = 0;
};

absl::StatusOr<SimplexOutcome> RunSimplex(const TransportProblem& problem,
                                          const Reduced& reduced,
                                          double tolerance) {
  NetworkSimplex simplex(problem, reduced, tolerance);
  if (absl::Status s = simplex.Run(); !s.ok()) return s;
  return SimplexOutcome{simplex.Clustering(), simplex.pivots()};
}

// Centre of the dual optimal face. Optimal duals are exactly the dual
// feasible points complementary to `primal`; after eliminating η this is a
// system of difference constraints μ_a − μ_l ≤ w_la. The average of the
// 2k extreme potentials (longest stretch up and down from every cluster)
// is strictly inside every constraint that is not an implicit equality.
Duals CentralDuals(const TransportProblem& problem, const Reduced& reduced,
                   const FractionalClustering& primal) {
  const int k = problem.k();
  const int m = problem.m();
  const double bound =
      2.0 * k * (2.0 * problem.costs.MaxAbs() + 1.0);
  // w[l][a]: μ_a ≤ μ_l + w[l][a].
  std::vector<std::vector<double>> w(k, std::vector<double>(k, bound));
  for (int i = 0; i < k; ++i) w[i][i] = 0.0;
  for (int j : reduced.free_units) {
    for (const auto& e : primal.column(j)) {
      const int a = e.cluster;
      for (int l = 0; l < k; ++l) {
        if (l == a || !reduced.allowed[static_cast<size_t>(j) * k + l]) {
          continue;
        }
        w[l][a] = std::min(w[l][a], problem.costs(l, j) - problem.costs(a, j));
      }
    }
  }
  for (int via = 0; via < k; ++via) {
    for (int s = 0; s < k; ++s) {
      for (int t = 0; t < k; ++t) {
        w[s][t] = std::min(w[s][t], w[s][via] + w[via][t]);
      }
    }
  }
  std::vector<double> mu(k, 0.0);
  for (int r = 0; r < k; ++r) {
    for (int i = 0; i < k; ++i) mu[i] += w[r][i] - w[i][r];
  }
  for (double& x : mu) x /= 2.0 * k;
  const double shift = *std::min_element(mu.begin(), mu.end());
  for (double& x : mu) x -= shift;

  Duals duals;
  duals.mu = mu;
  duals.eta.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    if (reduced.pinned_cluster[j] >= 0) {
      const int i = reduced.pinned_cluster[j];
      duals.eta[j] = problem.costs(i, j) + mu[i];
      continue;
    }
    double best = kInf;
    for (int i = 0; i < k; ++i) {
      if (reduced.allowed[static_cast<size_t>(j) * k + i]) {
        best = std::min(best, problem.costs(i, j) + mu[i]);
      }
    }
    duals.eta[j] = best;
  }
  return duals;
}

bool IsAcyclic(int k, const FractionalClustering& clustering) {
  const int m = clustering.m();
  std::vector<int> parent(k + m);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int j = 0; j < m; ++j) {
    for (const auto& e : clustering.column(j)) {
      const int a = find(e.cluster), b = find(k + j);
      if (a == b) return false;
      parent[a] = b;
    }
  }
  return true;
}

}  // namespace

absl::Status Constraints::Validate(int k, int m) const {
  std::set<int> pinned_units;
  std::set<Assignment> pin_set;
  for (const Assignment& p : pins) {
    if (p.cluster < 0 || p.cluster >= k || p.unit < 0 || p.unit >= m) {
      return absl::InvalidArgumentError("pin index out of range");
    }
    if (!pinned_units.insert(p.unit).second && !pin_set.contains(p)) {
      return absl::AbortedError(
          absl::StrCat("unit ", p.unit, " is pinned to two clusters"));
    }
    pin_set.insert(p);
  }
  for (const Assignment& e : exclusions) {
    if (e.cluster < 0 || e.cluster >= k || e.unit < 0 || e.unit >= m) {
      return absl::InvalidArgumentError("exclusion index out of range");
    }
    if (pin_set.contains(e)) {
      return absl::AbortedError(absl::StrCat("unit ", e.unit,
                                             " is both pinned to and excluded "
                                             "from cluster ",
                                             e.cluster));
    }
  }
  return absl::OkStatus();
}

TransportProblem MakeProblem(const Instance& instance, CostMatrix costs,
                             Constraints constraints) {
  TransportProblem problem;
  problem.costs = std::move(costs);
  for (const Unit& u : instance.units) problem.weights.push_back(u.weight);
  problem.capacities = instance.capacities;
  problem.constraints = std::move(constraints);
  return problem;
}

double PrimalObjective(const TransportProblem& problem,
                       const FractionalClustering& clustering) {
  double total = 0.0;
  for (int j = 0; j < clustering.m(); ++j) {
    for (const auto& e : clustering.column(j)) {
      total += e.value * problem.weights[j] * problem.costs(e.cluster, j);
    }
  }
  return total;
}

double DualObjective(const TransportProblem& problem, const Duals& duals) {
  double total = 0.0;
  for (int j = 0; j < problem.m(); ++j) {
    total += problem.weights[j] * duals.eta[j];
  }
  for (int i = 0; i < problem.k(); ++i) {
    total -= problem.capacities[i] * duals.mu[i];
  }
  return total;
}

absl::StatusOr<SolveResult> Solve(const TransportProblem& problem,
                                  const SolverOptions& options) {
  absl::StatusOr<Reduced> reduced = Reduce(problem);
  if (!reduced.ok()) return reduced.status();
  absl::StatusOr<SimplexOutcome> outcome =
      RunSimplex(problem, *reduced, options.tolerance);
  if (!outcome.ok()) return outcome.status();

  SolveResult result;
  result.clustering = std::move(outcome->clustering);
  result.pivots = outcome->pivots;
  result.duals = CentralDuals(problem, *reduced, result.clustering);
  result.objective = PrimalObjective(problem, result.clustering);
  result.dual_objective = DualObjective(problem, result.duals);
  result.is_vertex = IsAcyclic(problem.k(), result.clustering);
  for (int j = 0; j < result.clustering.m(); ++j) {
    for (const auto& e : result.clustering.column(j)) {
      result.assignment_forest.push_back({e.cluster, j});
    }
  }
  std::sort(result.assignment_forest.begin(), result.assignment_forest.end());
  return result;
}

absl::StatusOr<RelativeInteriorResult> RelativeInteriorSolution(
    const TransportProblem& problem, const SolverOptions& options) {
  absl::StatusOr<Reduced> reduced = Reduce(problem);
  if (!reduced.ok()) return reduced.status();
  absl::StatusOr<SolveResult> base = Solve(problem, options);
  if (!base.ok()) return base.status();

  const int k = problem.k();
  const double tol = options.tolerance * std::max(1.0, problem.costs.MaxAbs());
  const Duals& duals = base->duals;
  auto reduced_cost = [&](int i, int j) {
    return problem.costs(i, j) + duals.mu[i] - duals.eta[j];
  };

  // covered[j * k + i]: some collected vertex has ξ_ij > 0.
  std::vector<char> tight(static_cast<size_t>(problem.m()) * k, 0);
  std::vector<char> covered(tight.size(), 0);
  for (int j : reduced->free_units) {
    for (int i = 0; i < k; ++i) {
      const size_t idx = static_cast<size_t>(j) * k + i;
      if (reduced->allowed[idx] && reduced_cost(i, j) <= tol) tight[idx] = 1;
    }
    for (const auto& e : base->clustering.column(j)) {
      covered[static_cast<size_t>(j) * k + e.cluster] = 1;
    }
  }

  std::vector<FractionalClustering> vertices = {base->clustering};
  while (true) {
    bool pending = false;
    TransportProblem restricted = problem;
    restricted.costs = CostMatrix(k, problem.m());
    for (int j : reduced->free_units) {
      for (int i = 0; i < k; ++i) {
        const size_t idx = static_cast<size_t>(j) * k + i;
        if (!reduced->allowed[idx]) continue;
        if (!tight[idx]) {
          restricted.constraints.exclusions.push_back({i, j});
        } else if (!covered[idx]) {
          restricted.costs(i, j) = -1.0;
          pending = true;
        }
      }
    }
    if (!pending) break;
    absl::StatusOr<Reduced> rr = Reduce(restricted);
    if (!rr.ok()) return rr.status();
    absl::StatusOr<SimplexOutcome> vertex =
        RunSimplex(restricted, *rr, options.tolerance);
    if (!vertex.ok()) return vertex.status();
    bool progress = false;
    for (int j : reduced->free_units) {
      for (const auto& e : vertex->clustering.column(j)) {
        const size_t idx = static_cast<size_t>(j) * k + e.cluster;
        if (!covered[idx]) {
          covered[idx] = 1;
          progress = true;
        }
      }
    }
    if (!progress) break;
    vertices.push_back(std::move(vertex->clustering));
  }

  RelativeInteriorResult out;
  out.vertices_averaged = static_cast<int>(vertices.size());
  out.clustering = FractionalClustering(k, problem.m());
  const double share = 1.0 / static_cast<double>(vertices.size());
  for (int j = 0; j < problem.m(); ++j) {
    std::vector<double> column(k, 0.0);
    for (const auto& v : vertices) {
      for (const auto& e : v.column(j)) column[e.cluster] += share * e.value;
    }
    double sum = std::accumulate(column.begin(), column.end(), 0.0);
    for (int i = 0; i < k; ++i) {
      double xi = column[i] / sum;
      if (xi > 1.0 - 1e-12) xi = 1.0;
      out.clustering.Set(i, j, xi);
    }
  }
  out.duals = duals;
  out.objective = PrimalObjective(problem, out.clustering);
  out.strictly_complementary = true;
  for (int j : reduced->free_units) {
    for (int i = 0; i < k; ++i) {
      const size_t idx = static_cast<size_t>(j) * k + i;
      if (!reduced->allowed[idx]) continue;
      const bool positive = out.clustering.Get(i, j) > 0.0;
      const bool slack = reduced_cost(i, j) > tol;
      if (positive == slack) out.strictly_complementary = false;
    }
  }
  return out;
}

absl::StatusOr<DistanceModel> PerturbSites(const DistanceModel& model,
                                           double epsilon, uint64_t seed) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError("perturbation epsilon must be > 0");
  }
  if (model.HasGraphMetric()) {
    return absl::InvalidArgumentError(
        "site perturbation is undefined for graph metrics");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DistanceModel out = model;
  const double max_radius = epsilon / std::max(1, model.k());
  for (Site& site : out.sites) {
    auto* p = std::get_if<Point>(&site);
    if (p == nullptr) {
      return absl::InvalidArgumentError("point metric with a unit site");
    }
    const double radius = 0.999 * max_radius * unit(rng);
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    *p = *p + Point{radius * std::cos(angle), radius * std::sin(angle)};
  }
  return out;
}

absl::StatusOr<AdjacencyGraph> JitterEdgeLengths(const AdjacencyGraph& graph,
                                                 double epsilon,
                                                 uint64_t seed) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError("jitter epsilon must be > 0");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges = graph.edges();
  for (Edge& e : edges) e.length *= 1.0 + epsilon * unit(rng);
  return AdjacencyGraph(graph.num_units(), std::move(edges));
}

absl::StatusOr<OracleResult> BruteForceOracle(const TransportProblem& problem) {
  const int k = problem.k();
  const int m = problem.m();
  if (absl::Status s = problem.constraints.Validate(k, m); !s.ok()) return s;
  for (double w : problem.weights) {
    if (w != 1.0) {
      return absl::InvalidArgumentError("oracle needs unit weights");
    }
  }
  std::vector<int> remaining(k);
  for (int i = 0; i < k; ++i) {
    const double c = problem.capacities[i];
    if (c != std::round(c) || c < 0) {
      return absl::InvalidArgumentError("oracle needs integer capacities");
    }
    remaining[i] = static_cast<int>(c);
  }
  if (m * std::log10(std::max(k, 1)) > 7.0 + 1e-12) {
    return absl::ResourceExhaustedError(
        absl::StrCat("k^m = ", k, "^", m, " exceeds 10^7"));
  }
  std::vector<int> fixed(m, -1);
  std::vector<char> allowed(static_cast<size_t>(m) * k, 1);
  for (const Assignment& p : problem.constraints.pins) fixed[p.unit] = p.cluster;
  for (const Assignment& e : problem.constraints.exclusions) {
    allowed[static_cast<size_t>(e.unit) * k + e.cluster] = 0;
  }

  OracleResult result;
  result.objective = kInf;
  std::vector<int> labels(m, -1);
  const double scale = std::max(1.0, problem.costs.MaxAbs());
  auto recurse = [&](auto&& self, int j, double cost) -> void {
    if (j == m) {
      if (cost < result.objective - 1e-12 * scale * m) {
        result.objective = cost;
        result.minimizers.clear();
      }
      if (std::abs(cost - result.objective) <= 1e-12 * scale * m) {
        result.objective = std::min(result.objective, cost);
        result.minimizers.push_back(labels);
      }
      return;
    }
    for (int i = 0; i < k; ++i) {
      if (remaining[i] == 0) continue;
      if (fixed[j] >= 0 && fixed[j] != i) continue;
      if (!allowed[static_cast<size_t>(j) * k + i]) continue;
      --remaining[i];
      labels[j] = i;
      self(self, j + 1, cost + problem.costs(i, j));
      ++remaining[i];
    }
  };
  recurse(recurse, 0, 0.0);
  if (result.minimizers.empty()) {
    return absl::FailedPreconditionError("no integer assignment is feasible");
  }
  return result;
}

}  // namespace gvd

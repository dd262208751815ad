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

// The balanced transportation program
//
//   min  Σ_ij ξ_ij ω_j c_ij
//   s.t. Σ_i ξ_ij = 1,  Σ_j ξ_ij ω_j = κ_i,  ξ ≥ 0
//
// and its dual  max Σ_j ω_j η_j − Σ_i κ_i μ_i  s.t. η_j ≤ c_ij + μ_i.
// Solved as a transportation problem (units supply ω_j, clusters demand κ_i)
// with a primal network simplex on a strongly feasible spanning tree.

#ifndef GVD_TRANSPORT_H_
#define GVD_TRANSPORT_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "gvd/distance.h"
#include "gvd/model.h"

namespace gvd {

struct Assignment {
  int cluster = 0;
  int unit = 0;
  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

// Operator constraints: pins force ξ_ij = 1, exclusions force ξ_ij = 0.
struct Constraints {
  std::vector<Assignment> pins;
  std::vector<Assignment> exclusions;

  bool empty() const { return pins.empty() && exclusions.empty(); }
  // Disjoint pins/exclusions, at most one pin per unit, indices in range.
  // Conflicts are reported as Aborted.
  absl::Status Validate(int k, int m) const;
};

struct TransportProblem {
  CostMatrix costs;
  std::vector<double> weights;
  std::vector<double> capacities;
  Constraints constraints;

  int k() const { return costs.k(); }
  int m() const { return costs.m(); }
};

TransportProblem MakeProblem(const Instance& instance, CostMatrix costs,
                             Constraints constraints = {});

struct Duals {
  std::vector<double> mu;
  std::vector<double> eta;
};

struct SolveResult {
  FractionalClustering clustering;
  Duals duals;
  double objective = 0.0;
  double dual_objective = 0.0;
  bool is_vertex = true;
  // Edges (i, x_j) of the bipartite assignment graph, ξ_ij > 0.
  std::vector<Assignment> assignment_forest;
  int pivots = 0;
};

struct SolverOptions {
  // Ties on reduced costs and complementarity, scaled by max(1, max|c|).
  double tolerance = 1e-9;
};

// Optimal vertex of the (restricted) program and optimal duals. The duals
// are the centre of the dual optimal face, shifted so that min μ = 0.
// Infeasible restrictions are reported as FailedPrecondition.
absl::StatusOr<SolveResult> Solve(const TransportProblem& problem,
                                  const SolverOptions& options = {});

struct RelativeInteriorResult {
  FractionalClustering clustering;
  Duals duals;
  double objective = 0.0;
  int vertices_averaged = 1;
  // Every allowed pair is either in the support or has a strictly positive
  // reduced cost, but never both.
  bool strictly_complementary = false;
};

// A point in the relative interior of the optimal face.
absl::StatusOr<RelativeInteriorResult> RelativeInteriorSolution(
    const TransportProblem& problem, const SolverOptions& options = {});

// Σ_j ω_j η_j − Σ_i κ_i μ_i, pinned units and excluded pairs dropped.
double DualObjective(const TransportProblem& problem, const Duals& duals);
double PrimalObjective(const TransportProblem& problem,
                       const FractionalClustering& clustering);

// Moves each point site by an independent uniform offset of norm below
// epsilon / k. Deterministic in `seed`.
absl::StatusOr<DistanceModel> PerturbSites(const DistanceModel& model,
                                           double epsilon, uint64_t seed);

// Multiplies every edge length by an independent factor in
// (1, 1 + epsilon). Unlike PerturbSites this carries no uniqueness
// guarantee for graph metrics; it is a heuristic tie breaker.
absl::StatusOr<AdjacencyGraph> JitterEdgeLengths(const AdjacencyGraph& graph,
                                                 double epsilon,
                                                 uint64_t seed);

struct OracleResult {
  double objective = 0.0;
  // Label vectors of every minimizer, in lexicographic order.
  std::vector<std::vector<int>> minimizers;
};

// Exhaustive enumeration of integer assignments for unit weights and
// integer capacities. Refuses k^m > 10^7.
absl::StatusOr<OracleResult> BruteForceOracle(const TransportProblem& problem);

}  // namespace gvd

#endif  // GVD_TRANSPORT_H_

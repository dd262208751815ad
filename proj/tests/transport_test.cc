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
#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing.h"

namespace gvd {
namespace {

using ::testing::Contains;
using ::testing::ElementsAre;

TransportProblem GoldenProblem(const Transform& h) {
  const Instance in = testing::Golden4();
  return MakeProblem(in,
                     *ComputeCostMatrix(in, testing::Golden4Model(h)));
}

// Symmetric instance: two sites, two units equidistant from both.
TransportProblem SymmetricProblem() {
  Instance in;
  in.k = 2;
  in.units = {{"a", {1, 1}, 1}, {"b", {1, -1}, 1}};
  in.capacities = {1.0, 1.0};
  DistanceModel model = MakeModel(EuclideanMetric{}, SquareTransform{},
                                  {Point{0, 0}, Point{2, 0}});
  return MakeProblem(in, *ComputeCostMatrix(in, model));
}

bool Allowed(const TransportProblem& p, int i, int j) {
  for (const Assignment& a : p.constraints.exclusions) {
    if (a.cluster == i && a.unit == j) return false;
  }
  for (const Assignment& a : p.constraints.pins) {
    if (a.unit == j && a.cluster != i) return false;
  }
  return true;
}

void ExpectOptimalPair(const TransportProblem& p, const SolveResult& r) {
  const double scale = std::max(1.0, std::abs(r.objective));
  EXPECT_NEAR(r.objective, PrimalObjective(p, r.clustering), 1e-9 * scale);
  EXPECT_NEAR(r.objective, DualObjective(p, r.duals), 1e-9 * scale);
  EXPECT_NEAR(*std::min_element(r.duals.mu.begin(), r.duals.mu.end()), 0.0,
              1e-12);
  for (int i = 0; i < p.k(); ++i) {
    for (int j = 0; j < p.m(); ++j) {
      if (!Allowed(p, i, j)) continue;
      EXPECT_LE(r.duals.eta[j], p.costs(i, j) + r.duals.mu[i] + 1e-9 * scale);
    }
  }
}

TEST(SolveTest, GoldenIdentity) {
  const TransportProblem p = GoldenProblem(IdentityTransform{});
  absl::StatusOr<SolveResult> r = Solve(p);
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r->objective, 4.0);
  EXPECT_THAT(r->duals.mu, ElementsAre(1.0, 0.0));
  EXPECT_TRUE(r->is_vertex);
  EXPECT_TRUE(r->clustering.IsInteger());
  ExpectOptimalPair(p, *r);
}

TEST(SolveTest, GoldenSquare) {
  const TransportProblem p = GoldenProblem(SquareTransform{});
  absl::StatusOr<SolveResult> r = Solve(p);
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r->objective, 8.0);
  EXPECT_THAT(r->duals.mu, ElementsAre(4.0, 0.0));
  EXPECT_EQ(r->clustering, testing::GoldenB());
  ExpectOptimalPair(p, *r);
}

TEST(SolveTest, UnitWeightsGiveIntegralVertices) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const TransportProblem p = testing::RandomIntegerProblem(rng, 30, 4);
    absl::StatusOr<SolveResult> r = Solve(p);
    ASSERT_TRUE(r.ok());
    EXPECT_TRUE(r->clustering.IsInteger());
  }
}

TEST(SolveTest, VertexFractionalCountsOnRandomInstances) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 6;
    const Instance in = testing::RandomPoints(rng, 40, k, false);
    const TransportProblem p = testing::RandomProblem(rng, in);
    absl::StatusOr<SolveResult> r = Solve(p);
    ASSERT_TRUE(r.ok());
    EXPECT_LE(static_cast<int>(r->clustering.FractionalUnits().size()), k - 1);
    EXPECT_LE(r->clustering.NumFractionalEntries(), 2 * (k - 1));
    EXPECT_TRUE(r->clustering.Validate().ok());
    ExpectOptimalPair(p, *r);
    EXPECT_EQ(static_cast<int>(r->assignment_forest.size()),
              r->clustering.NumNonzeros());
  }
}

TEST(SolveTest, RespectsPinsAndExclusions) {
  TransportProblem p = GoldenProblem(SquareTransform{});
  p.constraints.pins = {{0, 3}};
  p.constraints.exclusions = {{0, 0}};
  absl::StatusOr<SolveResult> r = Solve(p);
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r->clustering.Get(0, 3), 1.0);
  EXPECT_DOUBLE_EQ(r->clustering.Get(0, 0), 0.0);
  ExpectOptimalPair(p, *r);
}

TEST(SolveTest, InfeasibleConstraints) {
  TransportProblem p = GoldenProblem(SquareTransform{});
  // Three units pinned into a cluster of capacity two.
  p.constraints.pins = {{0, 0}, {0, 1}, {0, 2}};
  EXPECT_EQ(Solve(p).status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(SolveTest, ConflictingConstraintsAbort) {
  TransportProblem p = GoldenProblem(SquareTransform{});
  p.constraints.pins = {{0, 1}};
  p.constraints.exclusions = {{0, 1}};
  EXPECT_EQ(Solve(p).status().code(), absl::StatusCode::kAborted);
}

TEST(SolveTest, HandSolvedAssignment) {
  // Rows are clusters. Cheapest permutation: cluster 0 takes unit 1,
  // cluster 1 takes unit 2, cluster 2 takes unit 0; cost 1 + 2 + 1.
  TransportProblem p;
  p.costs = CostMatrix(3, 3, {9, 1, 9, 9, 9, 2, 1, 9, 9});
  p.weights = {1, 1, 1};
  p.capacities = {1, 1, 1};
  absl::StatusOr<SolveResult> r = Solve(p);
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r->objective, 4.0);
  EXPECT_THAT(r->clustering.Labels(), ElementsAre(2, 0, 1));
  absl::StatusOr<OracleResult> o = BruteForceOracle(p);
  ASSERT_TRUE(o.ok());
  EXPECT_DOUBLE_EQ(o->objective, 4.0);
}

TEST(RelativeInteriorTest, GoldenIdentityIsHalfSplit) {
  absl::StatusOr<RelativeInteriorResult> r =
      RelativeInteriorSolution(GoldenProblem(IdentityTransform{}));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->clustering, testing::GoldenA());
  EXPECT_THAT(r->duals.mu, ElementsAre(1.0, 0.0));
  EXPECT_DOUBLE_EQ(r->objective, 4.0);
  EXPECT_TRUE(r->strictly_complementary);
}

TEST(RelativeInteriorTest, UniqueOptimumMatchesSolve) {
  const TransportProblem p = GoldenProblem(SquareTransform{});
  absl::StatusOr<RelativeInteriorResult> r = RelativeInteriorSolution(p);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->clustering, Solve(p)->clustering);
  EXPECT_TRUE(r->strictly_complementary);
}

TEST(RelativeInteriorTest, SymmetricUnitsAreSplit) {
  absl::StatusOr<RelativeInteriorResult> r =
      RelativeInteriorSolution(SymmetricProblem());
  ASSERT_TRUE(r.ok());
  EXPECT_THAT(r->clustering.FractionalUnits(), ElementsAre(0, 1));
  EXPECT_TRUE(r->strictly_complementary);
}

TEST(RelativeInteriorTest, RandomOptimalAndComplementary) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance in = testing::RandomGraphInstance(rng, 20, 3);
    const TransportProblem p = MakeProblem(
        in, *ComputeCostMatrix(
                in, MakeModel(GraphMetric{}, IdentityTransform{},
                              testing::RandomUnitSites(rng, 20, 3))));
    absl::StatusOr<RelativeInteriorResult> r = RelativeInteriorSolution(p);
    ASSERT_TRUE(r.ok());
    absl::StatusOr<SolveResult> v = Solve(p);
    EXPECT_NEAR(r->objective, v->objective, 1e-9 * std::max(1.0, v->objective));
    EXPECT_NEAR(PrimalObjective(p, r->clustering), v->objective,
                1e-9 * std::max(1.0, v->objective));
    EXPECT_TRUE(r->strictly_complementary);
    EXPECT_TRUE(r->clustering.Validate().ok());
  }
}

TEST(PerturbSitesTest, BreaksSymmetry) {
  Instance in;
  in.k = 2;
  in.units = {{"a", {1, 1}, 1}, {"b", {1, -1}, 1}};
  in.capacities = {1.0, 1.0};
  DistanceModel model = MakeModel(EuclideanMetric{}, SquareTransform{},
                                  {Point{0, 0}, Point{2, 0}});
  absl::StatusOr<DistanceModel> moved = PerturbSites(model, 1e-6, 42);
  ASSERT_TRUE(moved.ok());
  absl::StatusOr<SolveResult> r =
      Solve(MakeProblem(in, *ComputeCostMatrix(in, *moved)));
  ASSERT_TRUE(r.ok());
  EXPECT_LE(static_cast<int>(r->clustering.FractionalUnits().size()), 1);
  for (int i = 0; i < 2; ++i) {
    const Point a = std::get<Point>(model.sites[i]);
    const Point b = std::get<Point>(moved->sites[i]);
    EXPECT_LT(Norm(a - b), 1e-6 / 2);
  }
}

TEST(PerturbSitesTest, DeterministicInSeed) {
  DistanceModel model = MakeModel(EuclideanMetric{}, SquareTransform{},
                                  {Point{0, 0}, Point{2, 0}});
  absl::StatusOr<DistanceModel> a = PerturbSites(model, 1e-3, 9);
  absl::StatusOr<DistanceModel> b = PerturbSites(model, 1e-3, 9);
  EXPECT_EQ(a->SitePoints(), b->SitePoints());
}

TEST(JitterEdgeLengthsTest, LengthsGrowSlightly) {
  const AdjacencyGraph g = *testing::Golden4().graph;
  absl::StatusOr<AdjacencyGraph> j = JitterEdgeLengths(g, 1e-3, 4);
  ASSERT_TRUE(j.ok());
  for (size_t e = 0; e < g.edges().size(); ++e) {
    EXPECT_GT(j->edges()[e].length, g.edges()[e].length);
    EXPECT_LT(j->edges()[e].length, g.edges()[e].length * (1 + 1e-3));
  }
}

TEST(BruteForceOracleTest, GoldenIdentityHasTwoMinimizers) {
  absl::StatusOr<OracleResult> o =
      BruteForceOracle(GoldenProblem(IdentityTransform{}));
  ASSERT_TRUE(o.ok());
  EXPECT_DOUBLE_EQ(o->objective, 4.0);
  EXPECT_EQ(o->minimizers.size(), 2u);
  EXPECT_THAT(o->minimizers, Contains(ElementsAre(0, 1, 0, 1)));
}

TEST(BruteForceOracleTest, GoldenSquareIsUnique) {
  absl::StatusOr<OracleResult> o =
      BruteForceOracle(GoldenProblem(SquareTransform{}));
  ASSERT_TRUE(o.ok());
  EXPECT_DOUBLE_EQ(o->objective, 8.0);
  EXPECT_THAT(o->minimizers, ElementsAre(ElementsAre(0, 1, 0, 1)));
}

TEST(BruteForceOracleTest, MatchesSolveOnSmallInstances) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const TransportProblem p =
        testing::RandomIntegerProblem(rng, 3 + trial % 6, 1 + trial % 3);
    absl::StatusOr<OracleResult> o = BruteForceOracle(p);
    absl::StatusOr<SolveResult> r = Solve(p);
    ASSERT_TRUE(o.ok());
    ASSERT_TRUE(r.ok());
    EXPECT_NEAR(r->objective, o->objective, 1e-12);
    EXPECT_THAT(o->minimizers, Contains(r->clustering.Labels()));
  }
}

TEST(BruteForceOracleTest, RejectsFractionalWeights) {
  TransportProblem p = GoldenProblem(IdentityTransform{});
  p.weights[0] = 1.5;
  p.capacities = {2.5, 2.0};
  EXPECT_FALSE(BruteForceOracle(p).ok());
}

}  // namespace
}  // namespace gvd

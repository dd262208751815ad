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

#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing.h"

namespace gvd {
namespace {

using ::testing::ElementsAre;
using ::testing::Field;
using ::testing::Contains;

TEST(ClusterWeightsTest, SumsWeightedEntries) {
  Instance in = testing::Golden4();
  in.units[3].weight = 3.0;
  in.capacities = {3.0, 3.0};
  FractionalClustering c(2, 4);
  c.Set(0, 0, 1.0);
  c.Set(0, 2, 1.0);
  c.Set(1, 1, 1.0);
  c.Set(1, 3, 1.0);
  // Cluster 1 holds x1 and x3; cluster 2 holds x2 and the heavy x4.
  EXPECT_THAT(*ClusterWeights(c, in), ElementsAre(2.0, 4.0));
}

TEST(ClusterWeightsTest, HalfSplitClustering) {
  EXPECT_THAT(*ClusterWeights(testing::GoldenA(), testing::Golden4()),
              ElementsAre(2.0, 2.0));
}

TEST(ClusterWeightsTest, EmptyClusterIsAnError) {
  const int labels[] = {0, 0, 0, 0};
  FractionalClustering c = FractionalClustering::FromLabels(2, labels);
  EXPECT_EQ(ClusterWeights(c, testing::Golden4()).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(ClusterWeightsTest, DimensionMismatch) {
  FractionalClustering c(3, 4);
  EXPECT_FALSE(ClusterWeights(c, testing::Golden4()).ok());
}

TEST(CheckBalanceTest, GoldenAIsStronglyBalanced) {
  absl::StatusOr<BalanceCheck> b =
      CheckBalance(testing::GoldenA(), testing::Golden4(), 0.0);
  ASSERT_TRUE(b.ok());
  EXPECT_TRUE(b->strong);
  EXPECT_TRUE(b->epsilon_balanced);
  EXPECT_FALSE(b->integer);
  EXPECT_DOUBLE_EQ(b->report.max_rel_deviation, 0.0);
}

TEST(CheckBalanceTest, TenPercentOverWithinFifteen) {
  Instance in;
  in.k = 2;
  in.units = {{"a", {0, 0}, 2.2}, {"b", {1, 0}, 1.8}};
  in.capacities = {2.0, 2.0};
  const int labels[] = {0, 1};
  absl::StatusOr<BalanceCheck> b =
      CheckBalance(FractionalClustering::FromLabels(2, labels), in, 0.15);
  ASSERT_TRUE(b.ok());
  EXPECT_TRUE(b->epsilon_balanced);
  EXPECT_FALSE(b->strong);
  EXPECT_TRUE(b->integer);
  EXPECT_NEAR(b->report.max_rel_deviation, 0.1, 1e-12);
  EXPECT_NEAR(b->report.avg_rel_deviation, 0.1, 1e-12);

  absl::StatusOr<BalanceCheck> tight =
      CheckBalance(FractionalClustering::FromLabels(2, labels), in, 0.05);
  EXPECT_FALSE(tight->epsilon_balanced);
}

TEST(CheckBalanceTest, NegativeEpsilonRejected) {
  EXPECT_FALSE(CheckBalance(testing::GoldenA(), testing::Golden4(), -1).ok());
}

TEST(ValidateInstanceTest, Golden4IsValid) {
  EXPECT_TRUE(ValidateInstance(testing::Golden4()).empty());
}

TEST(ValidateInstanceTest, LargeSyntheticIsValid) {
  std::mt19937_64 rng(3);
  EXPECT_TRUE(ValidateInstance(testing::GridInstance(rng, 25, 20, 5)).empty());
}

TEST(ValidateInstanceTest, CapacitySumMismatch) {
  Instance in;
  in.k = 2;
  in.units = {{"a", {0, 0}, 1}, {"b", {1, 0}, 1}, {"c", {2, 0}, 1}};
  in.capacities = {1.0, 1.0};
  EXPECT_THAT(ValidateInstance(in),
              Contains(Field(&Diagnostic::kind, Diagnostic::Kind::kCapacitySum)));
  EXPECT_EQ(NormalizeInstance(in).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(ValidateInstanceTest, IsolatedUnit) {
  Instance in = testing::Golden4();
  in.graph = AdjacencyGraph(4, {{0, 1, 1.0}, {1, 2, 1.0}});
  EXPECT_THAT(ValidateInstance(in),
              Contains(Field(&Diagnostic::kind, Diagnostic::Kind::kDisconnected)));
}

TEST(ValidateInstanceTest, BadEdgesAndWeights) {
  Instance in = testing::Golden4();
  in.graph = AdjacencyGraph(4, {{0, 1, -1.0}, {1, 2, 1.0}, {1, 3, 2.0}});
  EXPECT_THAT(ValidateInstance(in),
              Contains(Field(&Diagnostic::kind, Diagnostic::Kind::kBadEdge)));

  Instance w = testing::Golden4();
  w.units[0].weight = 0.0;
  EXPECT_THAT(ValidateInstance(w), Contains(Field(
      &Diagnostic::kind, Diagnostic::Kind::kNonpositiveWeight)));

  Instance d = testing::Golden4();
  d.units[1].id = "x1";
  EXPECT_THAT(ValidateInstance(d),
              Contains(Field(&Diagnostic::kind, Diagnostic::Kind::kDuplicateId)));
}

TEST(NormalizeInstanceTest, RescalesTinyMismatch) {
  Instance in = testing::Golden4();
  in.capacities = {2.0 + 1e-8, 2.0};
  absl::StatusOr<Instance> n = NormalizeInstance(in);
  ASSERT_TRUE(n.ok());
  EXPECT_NEAR(n->TotalCapacity(), 4.0, 1e-12);
}

TEST(FractionalClusteringTest, SetGetAndSupports) {
  FractionalClustering c = testing::GoldenA();
  EXPECT_DOUBLE_EQ(c.Get(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(c.Get(0, 3), 0.0);
  EXPECT_THAT(c.Support(0), ElementsAre(0, 1, 2));
  EXPECT_THAT(c.Support(1), ElementsAre(1, 2, 3));
  EXPECT_EQ(c.NumNonzeros(), 6);
  EXPECT_THAT(c.FractionalUnits(), ElementsAre(1, 2));
  EXPECT_EQ(c.NumFractionalEntries(), 4);
  EXPECT_FALSE(c.IsInteger());
  EXPECT_TRUE(c.Validate().ok());
  c.Set(0, 1, 0.0);
  EXPECT_THAT(c.Support(0), ElementsAre(0, 2));
  EXPECT_FALSE(c.Validate().ok());
}

TEST(FractionalClusteringTest, LabelsPreferLowestIndexOnTies) {
  EXPECT_THAT(testing::GoldenA().Labels(), ElementsAre(0, 0, 0, 1));
  EXPECT_THAT(testing::GoldenB().Labels(), ElementsAre(0, 1, 0, 1));
}

TEST(AdjacencyGraphTest, InducedConnectivity) {
  const AdjacencyGraph g = *testing::Golden4().graph;
  const int connected[] = {0, 1, 2};
  const int split[] = {0, 2};
  EXPECT_TRUE(g.IsConnected());
  EXPECT_TRUE(g.InducesConnected(connected));
  EXPECT_FALSE(g.InducesConnected(split));
  EXPECT_TRUE(g.InducesConnected({}));
}

TEST(ClusterCentroidsTest, WeightedMeans) {
  absl::StatusOr<std::vector<Point>> c =
      ClusterCentroids(testing::GoldenB(), testing::Golden4());
  ASSERT_TRUE(c.ok());
  EXPECT_EQ((*c)[0], (Point{1.0, 0.0}));
  EXPECT_EQ((*c)[1], (Point{1.0, 0.5}));
}

}  // namespace
}  // namespace gvd

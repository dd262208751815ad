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

#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "gvd/siteopt.h"
#include "gvd/transport.h"
#include "testing.h"

namespace gvd {
namespace {

using ::testing::ElementsAre;
using ::testing::IsEmpty;

DistanceModel GoldenModel(const Transform& h, std::vector<double> mu) {
  DistanceModel model = testing::Golden4Model(h);
  model.mu = std::move(mu);
  return model;
}

TEST(ComputeCellsTest, GoldenIdentity) {
  absl::StatusOr<Cells> cells = ComputeCells(
      testing::Golden4(), GoldenModel(IdentityTransform{}, {1, 0}));
  ASSERT_TRUE(cells.ok());
  EXPECT_THAT(cells->Cell(0), ElementsAre(0, 1, 2));
  EXPECT_THAT(cells->Cell(1), ElementsAre(1, 2, 3));
  EXPECT_THAT(cells->eta, ElementsAre(1, 2, 3, 0));
}

TEST(ComputeCellsTest, GoldenSquare) {
  absl::StatusOr<Cells> cells = ComputeCells(
      testing::Golden4(), GoldenModel(SquareTransform{}, {4, 0}));
  ASSERT_TRUE(cells.ok());
  EXPECT_THAT(cells->Cell(0), ElementsAre(0, 2));
  EXPECT_THAT(cells->Cell(1), ElementsAre(1, 3));
}

TEST(ComputeCellsTest, SingleCellHoldsEverything) {
  Instance in = testing::Golden4();
  in.k = 1;
  in.capacities = {4.0};
  DistanceModel model =
      MakeModel(GraphMetric{}, IdentityTransform{}, {UnitSite{2}});
  model.mu = {0.0};
  EXPECT_THAT(ComputeCells(in, model)->Cell(0), ElementsAre(0, 1, 2, 3));
}

TEST(ComputeCellsTest, AffineTransformKeepsMembership) {
  const Instance in = testing::Golden4();
  const double alpha = 2.5;
  absl::StatusOr<Cells> base =
      ComputeCells(in, GoldenModel(IdentityTransform{}, {1, 0}));
  absl::StatusOr<Cells> affine = ComputeCells(
      in, GoldenModel(AffineTransform{alpha, 7.0}, {alpha * 1, alpha * 0}));
  ASSERT_TRUE(affine.ok());
  EXPECT_EQ(base->membership, affine->membership);

  absl::StatusOr<DiagramReport> a = Verify(
      in, GoldenModel(AffineTransform{alpha, 7.0}, {alpha, 0}),
      testing::GoldenA());
  EXPECT_TRUE(a->feasible);
  EXPECT_TRUE(a->supports);
}

TEST(VerifyTest, GoldenIdentitySupportsOnlyA) {
  const Instance in = testing::Golden4();
  const DistanceModel model = GoldenModel(IdentityTransform{}, {1, 0});
  absl::StatusOr<DiagramReport> a = Verify(in, model, testing::GoldenA());
  absl::StatusOr<DiagramReport> b = Verify(in, model, testing::GoldenB());
  ASSERT_TRUE(a.ok());
  ASSERT_TRUE(b.ok());
  EXPECT_TRUE(a->feasible);
  EXPECT_TRUE(a->supports);
  EXPECT_THAT(a->violations, IsEmpty());
  EXPECT_TRUE(b->feasible);
  EXPECT_FALSE(b->supports);
  EXPECT_FALSE(b->violations.empty());
}

TEST(VerifyTest, GoldenSquareIsInfeasibleForA) {
  const Instance in = testing::Golden4();
  const DistanceModel model = GoldenModel(SquareTransform{}, {4, 0});
  absl::StatusOr<DiagramReport> a = Verify(in, model, testing::GoldenA());
  absl::StatusOr<DiagramReport> b = Verify(in, model, testing::GoldenB());
  EXPECT_FALSE(a->feasible);
  EXPECT_TRUE(b->feasible);
  EXPECT_TRUE(b->supports);
  EXPECT_EQ(b->star_shaped, false);
  EXPECT_THAT(b->connected, ElementsAre(false, true));
}

TEST(CheckStarShapedTest, GoldenClusterings) {
  const Instance in = testing::Golden4();
  const int sites[] = {0, 3};
  absl::StatusOr<StarShapedResult> a =
      CheckStarShaped(in, testing::GoldenA(), sites);
  absl::StatusOr<StarShapedResult> b =
      CheckStarShaped(in, testing::GoldenB(), sites);
  ASSERT_TRUE(a.ok());
  ASSERT_TRUE(b.ok());
  EXPECT_TRUE(a->star_shaped);
  EXPECT_FALSE(b->star_shaped);
  ASSERT_FALSE(b->witnesses.empty());
  EXPECT_EQ(b->witnesses.front(), (StarWitness{0, 2, 1}));
}

TEST(CheckStarShapedTest, SingleClusterIsStarShaped) {
  Instance in = testing::Golden4();
  in.k = 1;
  in.capacities = {4.0};
  const int labels[] = {0, 0, 0, 0};
  const int sites[] = {3};
  EXPECT_TRUE(CheckStarShaped(in, FractionalClustering::FromLabels(1, labels),
                              sites)
                  ->star_shaped);
}

TEST(CheckStarShapedTest, ChecksEveryShortestPath) {
  // Two equal routes 0-1-3 and 0-2-3; cluster 0 keeps only one of them.
  Instance in;
  in.k = 2;
  for (int j = 0; j < 5; ++j) in.units.push_back({testing::UnitName(j), {}, 1});
  in.graph = AdjacencyGraph(
      5, {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}, {2, 3, 1}, {3, 4, 5}});
  in.capacities = {3.0, 2.0};
  const int labels[] = {0, 0, 1, 0, 1};
  const int sites[] = {0, 4};
  absl::StatusOr<StarShapedResult> r =
      CheckStarShaped(in, FractionalClustering::FromLabels(2, labels), sites);
  ASSERT_TRUE(r.ok());
  EXPECT_FALSE(r->star_shaped);
  EXPECT_EQ(r->witnesses.front(), (StarWitness{0, 3, 2}));
}

TEST(CheckStarShapedTest, RelativeInteriorSolutionsAgreeWithEnumeration) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 8 + trial % 20;
    const int k = 2 + trial % 3;
    const Instance in = testing::RandomGraphInstance(rng, n, k);
    DistanceModel model = MakeModel(GraphMetric{}, IdentityTransform{},
                                    testing::RandomUnitSites(rng, n, k));
    absl::StatusOr<RelativeInteriorResult> ri = RelativeInteriorSolution(
        MakeProblem(in, *ComputeCostMatrix(in, model)));
    ASSERT_TRUE(ri.ok());
    model.mu = ri->duals.mu;
    const std::vector<int> sites = model.SiteUnits();
    absl::StatusOr<StarShapedResult> star =
        CheckStarShaped(in, ri->clustering, sites);
    ASSERT_TRUE(star.ok());
    EXPECT_TRUE(star->star_shaped);
    EXPECT_TRUE(testing::StarShapedByFloydWarshall(in, ri->clustering, sites));
    absl::StatusOr<DiagramReport> report = Verify(in, model, ri->clustering);
    EXPECT_TRUE(report->supports);
  }
}

TEST(ClusterConnectivityTest, Golden) {
  const AdjacencyGraph g = *testing::Golden4().graph;
  EXPECT_THAT(ClusterConnectivity(g, testing::GoldenA()),
              ElementsAre(true, true));
  EXPECT_THAT(ClusterConnectivity(g, testing::GoldenB()),
              ElementsAre(false, true));
}

TEST(CheckCentroidalTest, SitesAtCentroids) {
  const Instance in = testing::Golden4();
  const FractionalClustering c = testing::GoldenB();
  std::vector<Point> centroids = *ClusterCentroids(c, in);
  DistanceModel model = MakeModel(EuclideanMetric{}, SquareTransform{},
                                  {centroids[0], centroids[1]});
  absl::StatusOr<CentroidalCheck> check = CheckCentroidal(in, model, c);
  ASSERT_TRUE(check.ok());
  EXPECT_TRUE(check->centroidal);

  const double shift = 0.1 * InstanceDiameter(in);
  model.sites[1] = centroids[1] + Point{shift, 0};
  check = CheckCentroidal(in, model, c);
  EXPECT_FALSE(check->centroidal);
  EXPECT_NEAR(check->gaps[1], shift, 1e-12);
}

TEST(CheckCentroidalTest, ConvergedKMeansIsCentroidal) {
  std::mt19937_64 rng(2);
  const Instance in = testing::RandomPoints(rng, 120, 4, true);
  absl::StatusOr<KMeansTrace> trace = BalancedKMeans(
      in, *SpreadSites(in, 4, 1),
      std::vector<Metric>(4, EuclideanMetric{}));
  ASSERT_TRUE(trace.ok());
  ASSERT_TRUE(trace->converged);
  EXPECT_TRUE(
      CheckCentroidal(in, trace->final_model, trace->clustering)->centroidal);
}

TEST(CheckCentroidalTest, GraphMetricsRejected) {
  EXPECT_FALSE(CheckCentroidal(testing::Golden4(),
                               GoldenModel(IdentityTransform{}, {1, 0}),
                               testing::GoldenA())
                   .ok());
}

DistanceModel TwoPointSites(std::vector<double> mu, Point s2 = {2, 0}) {
  DistanceModel model =
      MakeModel(EuclideanMetric{}, SquareTransform{}, {Point{0, 0}, s2});
  model.mu = std::move(mu);
  return model;
}

TEST(PowerCells2dTest, EqualWeightsBisectAtMidpoint) {
  absl::StatusOr<std::vector<Polygon>> cells =
      PowerCells2d(TwoPointSites({0, 0}), Box{-1, -1, 3, 1});
  ASSERT_TRUE(cells.ok());
  EXPECT_NEAR(PolygonArea((*cells)[0]), 4.0, 1e-12);
  EXPECT_NEAR(PolygonArea((*cells)[1]), 4.0, 1e-12);
  EXPECT_TRUE(PolygonContains((*cells)[0], {0.99, 0.5}));
  EXPECT_TRUE(PolygonContains((*cells)[1], {1.01, 0.5}));
}

TEST(PowerCells2dTest, AdditiveWeightMovesBisector) {
  // |x|² + 4 = |x − (2,0)|² holds on the line x = 0.
  absl::StatusOr<std::vector<Polygon>> cells =
      PowerCells2d(TwoPointSites({4, 0}), Box{-1, -1, 3, 1});
  ASSERT_TRUE(cells.ok());
  EXPECT_NEAR(PolygonArea((*cells)[0]), 2.0, 1e-12);
  EXPECT_NEAR(PolygonArea((*cells)[1]), 6.0, 1e-12);
  EXPECT_TRUE(PolygonContains((*cells)[1], {0.01, 0.0}));
}

TEST(PowerCells2dTest, DominatedCoincidentSiteIsEmpty) {
  absl::StatusOr<std::vector<Polygon>> cells =
      PowerCells2d(TwoPointSites({0, 1}, {0, 0}), Box{-1, -1, 1, 1});
  ASSERT_TRUE(cells.ok());
  EXPECT_NEAR(PolygonArea((*cells)[0]), 4.0, 1e-12);
  EXPECT_NEAR(PolygonArea((*cells)[1]), 0.0, 1e-12);
}

TEST(PowerCells2dTest, RequiresPowerModel) {
  DistanceModel model = TwoPointSites({0, 0});
  model.transform = IdentityTransform{};
  EXPECT_FALSE(PowerCells2d(model, Box{}).ok());
}

TEST(PowerCells2dTest, CellsContainTheirUnits) {
  std::mt19937_64 rng(8);
  Instance in = testing::RandomPoints(rng, 200, 5, true);
  absl::StatusOr<KMeansTrace> trace = BalancedKMeans(
      in, *SpreadSites(in, 5, 3), std::vector<Metric>(5, EuclideanMetric{}));
  ASSERT_TRUE(trace.ok());
  absl::StatusOr<std::vector<Polygon>> cells =
      PowerCells2d(trace->final_model, BoundingBox(in));
  ASSERT_TRUE(cells.ok());
  double area = 0.0;
  for (const Polygon& p : *cells) area += PolygonArea(p);
  const Box box = BoundingBox(in);
  EXPECT_NEAR(area, (box.max_x - box.min_x) * (box.max_y - box.min_y), 1e-9);
  for (int j = 0; j < in.num_units(); ++j) {
    for (const auto& e : trace->clustering.column(j)) {
      EXPECT_TRUE(PolygonContains((*cells)[e.cluster],
                                  in.units[j].position, 1e-7));
    }
  }
}

}  // namespace
}  // namespace gvd

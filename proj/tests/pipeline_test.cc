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

#include "gvd/pipeline.h"

#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "gvd/diagram.h"
#include "gvd/rounding.h"
#include "testing.h"

namespace gvd {
namespace {

using ::testing::Each;

InstanceFile Golden() { return *LoadInstance(testing::DataPath("golden4.json")); }

// 500 unit-weight points on a jittered grid, k = 5, κ = 100, with a
// column-strip reference clustering.
InstanceFile Grid500() {
  std::mt19937_64 rng(7);
  InstanceFile f;
  f.instance = testing::GridInstance(rng, 25, 20, 5);
  std::vector<int> labels(500);
  for (int j = 0; j < 500; ++j) labels[j] = (j % 25) / 5;
  f.reference = FractionalClustering::FromLabels(5, labels);
  return f;
}

TEST(ParseApproachTest, NamesRoundTrip) {
  for (Approach a : {Approach::kPower, Approach::kAnisotropic,
                     Approach::kShortestPath, Approach::kAwvd}) {
    EXPECT_EQ(*ParseApproach(ApproachName(a)), a);
  }
  EXPECT_FALSE(ParseApproach("voronoi").ok());
}

TEST(RunPipelineTest, ShortestPathOnGoldenIsConnected) {
  const InstanceFile f = Golden();
  PipelineOptions options;
  options.approach = Approach::kShortestPath;
  absl::StatusOr<ResultFile> r = RunPipeline(f, options);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_TRUE(r->clustering.IsInteger());
  EXPECT_THAT(r->summary.connectivity, Each(true));
  // No 2+2 split of this graph is connected; the best connected split is
  // 3+1.
  EXPECT_DOUBLE_EQ(r->summary.max_deviation, 0.5);
  ASSERT_TRUE(r->rounding.has_value());
  EXPECT_EQ(r->rounding->method, "connected");
  EXPECT_LE(r->rounding->epsilon_achieved, RoundingBound(f.instance));
}

TEST(RunPipelineTest, PowerOnGoldenIsBalanced) {
  absl::StatusOr<ResultFile> r = RunPipeline(Golden(), {});
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_DOUBLE_EQ(r->summary.max_deviation, 0.0);
  EXPECT_EQ(r->rounding->method, "tree");
}

TEST(RunPipelineTest, AllApproachesBalanceUnitWeightsExactly) {
  const InstanceFile f = Grid500();
  for (Approach a : {Approach::kPower, Approach::kAnisotropic,
                     Approach::kShortestPath, Approach::kAwvd}) {
    PipelineOptions options;
    options.approach = a;
    options.seed = 3;
    absl::StatusOr<ResultFile> r = RunPipeline(f, options);
    ASSERT_TRUE(r.ok()) << ApproachName(a) << ": " << r.status();
    absl::StatusOr<BalanceCheck> b = CheckBalance(r->clustering, f.instance, 0);
    EXPECT_TRUE(b->integer) << ApproachName(a);
    EXPECT_TRUE(b->strong) << ApproachName(a);
    if (a == Approach::kShortestPath) {
      EXPECT_THAT(r->summary.connectivity, Each(true));
    }
    EXPECT_TRUE(r->summary.changed_pairs_ratio.has_value());
  }
}

TEST(RunPipelineTest, AnisotropicNeedsReference) {
  PipelineOptions options;
  options.approach = Approach::kAnisotropic;
  EXPECT_EQ(RunPipeline(Golden(), options).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(RunPipelineTest, ShortestPathNeedsGraph) {
  InstanceFile f = Golden();
  f.instance.graph.reset();
  PipelineOptions options;
  options.approach = Approach::kShortestPath;
  EXPECT_EQ(RunPipeline(f, options).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(RunPipelineTest, RejectsBadOptions) {
  PipelineOptions options;
  options.restarts = 0;
  EXPECT_EQ(RunPipeline(Golden(), options).status().code(),
            absl::StatusCode::kInvalidArgument);
  options = {};
  options.constraints.pins = {{0, 1}};
  options.constraints.exclusions = {{0, 1}};
  EXPECT_EQ(RunPipeline(Golden(), options).status().code(),
            absl::StatusCode::kAborted);
}

TEST(RunPipelineTest, ConstraintsAreHonored) {
  const InstanceFile f = Grid500();
  PipelineOptions options;
  options.constraints.pins = {{4, 0}};
  options.constraints.exclusions = {{0, 499}, {1, 499}};
  absl::StatusOr<ResultFile> r = RunPipeline(f, options);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->clustering.Get(4, 0), 1.0);
  EXPECT_EQ(r->clustering.Get(0, 499), 0.0);
  EXPECT_EQ(r->clustering.Get(1, 499), 0.0);
  EXPECT_EQ(r->parameters["constraints"]["pin"].size(), 1u);
}

TEST(RunPipelineTest, DeterministicForFixedSeed) {
  std::mt19937_64 rng(4);
  InstanceFile f;
  f.instance = testing::RandomPoints(rng, 120, 4, false);
  PipelineOptions options;
  options.seed = 11;
  const std::string a = DumpJson(ResultToJson(*RunPipeline(f, options), f.instance));
  const std::string b = DumpJson(ResultToJson(*RunPipeline(f, options), f.instance));
  EXPECT_EQ(a, b);
}

TEST(RunPipelineTest, EpsilonTargetReported) {
  PipelineOptions options;
  options.approach = Approach::kShortestPath;
  options.epsilon = 0.1;
  absl::StatusOr<ResultFile> r = RunPipeline(Golden(), options);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->parameters["withinEpsilon"], false);
  options.epsilon = 0.5;
  EXPECT_EQ(RunPipeline(Golden(), options)->parameters["withinEpsilon"], true);
}

TEST(RoundResultTest, RoundsAFractionalRun) {
  std::mt19937_64 rng(6);
  InstanceFile f;
  f.instance = testing::RandomPoints(rng, 50, 4, false);
  PipelineOptions options;
  options.round = false;
  absl::StatusOr<ResultFile> r = RunPipeline(f, options);
  ASSERT_TRUE(r.ok());
  EXPECT_FALSE(r->rounding.has_value());
  ASSERT_TRUE(RoundResult(f, *r).ok());
  ASSERT_TRUE(Reevaluate(f, *r).ok());
  EXPECT_TRUE(r->clustering.IsInteger());
  EXPECT_LE(r->summary.max_deviation, RoundingBound(f.instance) + 1e-12);
}

}  // namespace
}  // namespace gvd

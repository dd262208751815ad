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

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "gvd/distance.h"
#include "gvd/evaluate.h"
#include "gvd/rounding.h"
#include "gvd/siteopt.h"

namespace gvd {

using nlohmann::json;

absl::StatusOr<Approach> ParseApproach(std::string_view name) {
  if (name == "power") return Approach::kPower;
  if (name == "anisotropic") return Approach::kAnisotropic;
  if (name == "shortest-path") return Approach::kShortestPath;
  if (name == "awvd") return Approach::kAwvd;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown approach '", std::string(name),
      "' (expected power, anisotropic, shortest-path or awvd)"));
}

std::string_view ApproachName(Approach approach) {
  switch (approach) {
    case Approach::kPower:
      return "power";
    case Approach::kAnisotropic:
      return "anisotropic";
    case Approach::kShortestPath:
      return "shortest-path";
    case Approach::kAwvd:
      return "awvd";
  }
  return "unknown";
}

namespace {

json FiniteOrNull(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Site optimization for point-site approaches.
absl::StatusOr<KMeansTrace> OptimizePointSites(
    const InstanceFile& file, const std::vector<Metric>& metrics,
    SiteUpdate update, bool from_reference, const PipelineOptions& options) {
  const Instance& in = file.instance;
  KMeansOptions kmeans;
  kmeans.max_iterations = options.max_iterations;
  kmeans.constraints = options.constraints;
  if (from_reference) {
    absl::StatusOr<std::vector<Point>> init =
        ClusterCentroids(*file.reference, in);
    if (!init.ok()) return init.status();
    return update == SiteUpdate::kCentroid
               ? BalancedKMeans(in, *std::move(init), metrics, kmeans)
               : BalancedKMedians(in, *std::move(init), kmeans);
  }
  MultiStartOptions multi;
  multi.restarts = options.restarts;
  multi.seed = options.seed;
  multi.update = update;
  multi.kmeans = kmeans;
  return MultiStartKMeans(in, metrics, multi);
}

}  // namespace

absl::StatusOr<ResultFile> RunPipeline(const InstanceFile& file,
                                       const PipelineOptions& options) {
  const Instance& in = file.instance;
  if (absl::Status s = options.constraints.Validate(in.k, in.num_units());
      !s.ok()) {
    return s;
  }
  if (options.max_iterations <= 0 || options.restarts <= 0 ||
      options.neighborhood <= 0) {
    return absl::InvalidArgumentError(
        "iterations, restarts and neighborhood must be positive");
  }
  ResultFile result;
  json& params = result.parameters;
  params["approach"] = ApproachName(options.approach);
  params["seed"] = options.seed;
  params["maxIter"] = options.max_iterations;
  params["restarts"] = options.restarts;
  params["neighborhood"] = options.neighborhood;
  params["epsilon"] = options.epsilon ? json(*options.epsilon) : json(nullptr);
  params["constraints"] = ConstraintsToJson(options.constraints, in);

  switch (options.approach) {
    case Approach::kPower:
    case Approach::kAwvd:
    case Approach::kAnisotropic: {
      std::vector<Metric> metrics(in.k, EuclideanMetric{});
      SiteUpdate update = options.approach == Approach::kAwvd
                              ? SiteUpdate::kMedian
                              : SiteUpdate::kCentroid;
      if (options.approach == Approach::kAnisotropic) {
        if (!file.reference) {
          return absl::FailedPreconditionError(
              "the anisotropic approach needs a reference clustering");
        }
        absl::StatusOr<AnisotropyEstimate> estimate =
            EstimateAnisotropy(in, *file.reference);
        if (!estimate.ok()) return estimate.status();
        for (int i = 0; i < in.k; ++i) {
          metrics[i] = EllipsoidalMetric{estimate->matrices[i]};
        }
        params["regularized"] = estimate->regularized;
      }
      absl::StatusOr<KMeansTrace> trace = OptimizePointSites(
          file, metrics, update, file.reference.has_value(), options);
      if (!trace.ok()) return trace.status();
      params["iterations"] = trace->iterations.size();
      params["converged"] = trace->converged;
      params["restart"] = trace->restart;
      result.model = trace->final_model;
      result.clustering = trace->clustering;
      break;
    }
    case Approach::kShortestPath: {
      if (!in.graph) {
        return absl::FailedPreconditionError(
            "the shortest-path approach needs an adjacency graph");
      }
      std::vector<Point> points;
      if (file.reference) {
        absl::StatusOr<std::vector<Point>> c =
            ClusterCentroids(*file.reference, in);
        if (!c.ok()) return c.status();
        points = *std::move(c);
      } else {
        absl::StatusOr<std::vector<Point>> spread =
            SpreadSites(in, in.k, options.seed);
        if (!spread.ok()) return spread.status();
        points = *std::move(spread);
      }
      LocalSearchConfig config;
      config.neighborhood = std::min(options.neighborhood, in.num_units());
      config.max_iterations = options.max_iterations;
      config.seed = options.seed;
      config.constraints = options.constraints;
      absl::StatusOr<LocalSearchResult> search =
          LocalSearchSites(in, NearestUnits(in, points), config);
      if (!search.ok()) return search.status();
      params["localSearch"] = {
          {"initialDeviation", FiniteOrNull(search->initial_deviation)},
          {"deviation", FiniteOrNull(search->deviation)},
          {"iterations", search->iterations},
          {"evaluations", search->evaluations}};
      std::vector<Site> sites;
      for (int s : search->sites) sites.push_back(UnitSite{s});
      result.model =
          MakeModel(GraphMetric{}, IdentityTransform{}, std::move(sites));
      absl::StatusOr<CostMatrix> costs = ComputeCostMatrix(in, result.model);
      if (!costs.ok()) return costs.status();
      absl::StatusOr<RelativeInteriorResult> solved = RelativeInteriorSolution(
          MakeProblem(in, *std::move(costs), options.constraints));
      if (!solved.ok()) return solved.status();
      result.model.mu = solved->duals.mu;
      result.clustering = solved->clustering;
      break;
    }
  }

  if (options.round) {
    if (absl::Status s = RoundResult(file, result); !s.ok()) return s;
  }
  if (absl::Status s = Reevaluate(file, result); !s.ok()) return s;
  if (options.epsilon) {
    params["withinEpsilon"] =
        result.summary.max_deviation <= *options.epsilon + 1e-9;
  }
  return result;
}

absl::Status RoundResult(const InstanceFile& file, ResultFile& result) {
  const Instance& in = file.instance;
  const bool graph_model =
      !result.model.metrics.empty() &&
      std::all_of(result.model.metrics.begin(), result.model.metrics.end(),
                  IsGraphMetric) &&
      IsAffine(result.model.transform);
  absl::StatusOr<RoundingOutcome> outcome;
  std::string method = "tree";
  if (graph_model) {
    outcome = RoundConnected(in, result.clustering, result.model);
    method = "connected";
    if (!outcome.ok() && absl::IsFailedPrecondition(outcome.status())) {
      outcome = RoundTree(in, result.clustering);
      method = "tree-fallback";
    }
  } else {
    outcome = RoundTree(in, result.clustering);
  }
  if (!outcome.ok()) return outcome.status();
  result.clustering = outcome->clustering;
  result.rounding = RoundingInfo{outcome->epsilon_achieved,
                                 outcome->epsilon_bound,
                                 static_cast<int>(outcome->moved_units.size()),
                                 method};
  return absl::OkStatus();
}

absl::Status Reevaluate(const InstanceFile& file, ResultFile& result) {
  absl::StatusOr<EvaluationSummary> summary =
      Summarize(file.instance, result.model, result.clustering,
                file.reference ? &*file.reference : nullptr);
  if (!summary.ok()) return summary.status();
  result.summary = *std::move(summary);
  return absl::OkStatus();
}

}  // namespace gvd

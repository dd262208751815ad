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

#include "gvd/siteopt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <utility>

#include "absl/strings/str_cat.h"
#include "gvd/diagram.h"
#include "gvd/rounding.h"

namespace gvd {

absl::StatusOr<double> ComputePhi(const Instance& instance,
                                  const FractionalClustering& clustering) {
  absl::StatusOr<std::vector<Point>> centroids =
      ClusterCentroids(clustering, instance);
  if (!centroids.ok()) return centroids.status();
  double phi = 0.0;
  for (int i = 0; i < instance.k; ++i) {
    phi += instance.capacities[i] * SquaredNorm((*centroids)[i]);
  }
  return phi;
}

absl::StatusOr<double> MetricMomentOfInertia(
    const Instance& instance, const std::vector<Metric>& metrics,
    const FractionalClustering& clustering) {
  if (static_cast<int>(metrics.size()) != clustering.k()) {
    return absl::InvalidArgumentError("one metric per cluster required");
  }
  absl::StatusOr<std::vector<Point>> centroids =
      ClusterCentroids(clustering, instance);
  if (!centroids.ok()) return centroids.status();
  double total = 0.0;
  for (int j = 0; j < clustering.m(); ++j) {
    const Unit& u = instance.units[j];
    for (const auto& e : clustering.column(j)) {
      const Point d = u.position - (*centroids)[e.cluster];
      const Metric& metric = metrics[e.cluster];
      double sq = 0.0;
      if (const auto* ell = std::get_if<EllipsoidalMetric>(&metric)) {
        sq = ell->matrix.QuadraticForm(d);
      } else if (std::holds_alternative<EuclideanMetric>(metric)) {
        sq = SquaredNorm(d);
      } else {
        return absl::InvalidArgumentError(
            "moment of inertia needs point metrics");
      }
      total += e.value * u.weight * sq;
    }
  }
  return total;
}

namespace {

// Weighted geometric median by Weiszfeld steps from `start`.
Point GeometricMedian(const std::vector<Point>& points,
                      const std::vector<double>& weights, Point start,
                      double scale) {
  auto cost = [&](Point y) {
    double s = 0.0;
    for (size_t t = 0; t < points.size(); ++t) {
      s += weights[t] * Norm(points[t] - y);
    }
    return s;
  };
  Point y = start;
  double fy = cost(y);
  const double eps = 1e-12 * std::max(scale, 1e-300);
  for (int step = 0; step < 200; ++step) {
    Point num{0.0, 0.0};
    double den = 0.0;
    for (size_t t = 0; t < points.size(); ++t) {
      const double d = Norm(points[t] - y);
      if (d < eps) continue;
      num = num + (weights[t] / d) * points[t];
      den += weights[t] / d;
    }
    if (den <= 0.0) break;
    const Point next = (1.0 / den) * num;
    const double fn = cost(next);
    if (!(fn < fy)) break;
    const double moved = Norm(next - y);
    y = next;
    fy = fn;
    if (moved < eps) break;
  }
  return y;
}

std::vector<Site> ToSites(const std::vector<Point>& points) {
  return std::vector<Site>(points.begin(), points.end());
}

absl::StatusOr<KMeansTrace> RunLoop(const Instance& instance,
                                    std::vector<Point> sites,
                                    std::vector<Metric> metrics,
                                    const Transform& transform,
                                    SiteUpdate update,
                                    const KMeansOptions& options) {
  const int k = instance.k;
  if (static_cast<int>(sites.size()) != k ||
      static_cast<int>(metrics.size()) != k) {
    return absl::InvalidArgumentError(
        absl::StrCat("need ", k, " sites and metrics"));
  }
  for (const Metric& metric : metrics) {
    if (IsGraphMetric(metric)) {
      return absl::InvalidArgumentError("k-means needs point metrics");
    }
  }
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      if (sites[a] == sites[b]) {
        return absl::InvalidArgumentError("initial sites must be distinct");
      }
    }
  }
  const double diameter = std::max(InstanceDiameter(instance), 1e-300);
  std::mt19937_64 jitter_rng(0x6776647364);
  KMeansTrace trace;
  for (int it = 0; it < options.max_iterations; ++it) {
    DistanceModel model{metrics, transform, ToSites(sites),
                        std::vector<double>(k, 0.0)};
    absl::StatusOr<CostMatrix> costs = ComputeCostMatrix(instance, model);
    if (!costs.ok()) return costs.status();
    absl::StatusOr<SolveResult> solved = Solve(
        MakeProblem(instance, *std::move(costs), options.constraints));
    if (!solved.ok()) return solved.status();
    model.mu = solved->duals.mu;

    std::vector<Point> next(k);
    absl::StatusOr<std::vector<Point>> centroids =
        ClusterCentroids(solved->clustering, instance);
    if (!centroids.ok()) return centroids.status();
    double objective = 0.0;
    if (update == SiteUpdate::kCentroid) {
      next = *centroids;
      absl::StatusOr<double> moi =
          MetricMomentOfInertia(instance, metrics, solved->clustering);
      if (!moi.ok()) return moi.status();
      objective = *moi;
    } else {
      std::vector<std::vector<Point>> pts(k);
      std::vector<std::vector<double>> wts(k);
      for (int j = 0; j < instance.num_units(); ++j) {
        for (const auto& e : solved->clustering.column(j)) {
          pts[e.cluster].push_back(instance.units[j].position);
          wts[e.cluster].push_back(e.value * instance.units[j].weight);
        }
      }
      for (int i = 0; i < k; ++i) {
        next[i] = GeometricMedian(pts[i], wts[i], sites[i], diameter);
        for (size_t t = 0; t < pts[i].size(); ++t) {
          objective += wts[i][t] * Norm(pts[i][t] - next[i]);
        }
      }
    }
    absl::StatusOr<double> phi = ComputePhi(instance, solved->clustering);
    if (!phi.ok()) return phi.status();
    trace.iterations.push_back({sites, objective, *phi});

    double moved = 0.0;
    for (int i = 0; i < k; ++i) moved = std::max(moved, Norm(next[i] - sites[i]));
    trace.final_model = model;
    trace.clustering = solved->clustering;
    if (moved < options.tolerance * diameter) {
      trace.converged = true;
      break;
    }
    // Coinciding sites would give identical cost rows.
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < a; ++b) {
        if (Norm(next[a] - next[b]) <= 1e-12 * diameter) {
          const double t = angle(jitter_rng);
          next[a] = next[a] + (1e-6 * diameter) * Point{std::cos(t), std::sin(t)};
          trace.jittered = true;
        }
      }
    }
    sites = std::move(next);
  }
  return trace;
}

}  // namespace

absl::StatusOr<KMeansTrace> BalancedKMeans(const Instance& instance,
                                           std::vector<Point> initial_sites,
                                           std::vector<Metric> metrics,
                                           const KMeansOptions& options) {
  return RunLoop(instance, std::move(initial_sites), std::move(metrics),
                 SquareTransform{}, SiteUpdate::kCentroid, options);
}

absl::StatusOr<KMeansTrace> BalancedKMedians(const Instance& instance,
                                             std::vector<Point> initial_sites,
                                             const KMeansOptions& options) {
  return RunLoop(instance, std::move(initial_sites),
                 std::vector<Metric>(instance.k, EuclideanMetric{}),
                 IdentityTransform{}, SiteUpdate::kMedian, options);
}

absl::StatusOr<std::vector<Point>> SpreadSites(const Instance& instance,
                                               int k, uint64_t seed) {
  const int m = instance.num_units();
  if (k <= 0 || m == 0) return absl::InvalidArgumentError("nothing to seed");
  std::mt19937_64 rng(seed);
  std::vector<double> weight(m);
  for (int j = 0; j < m; ++j) weight[j] = instance.units[j].weight;
  std::vector<Point> sites;
  std::vector<double> d2(m, std::numeric_limits<double>::infinity());
  for (int i = 0; i < k; ++i) {
    std::vector<double> p(m);
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      p[j] = i == 0 ? weight[j] : weight[j] * d2[j];
      total += p[j];
    }
    if (!(total > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("fewer than ", k, " distinct unit positions"));
    }
    std::discrete_distribution<int> pick(p.begin(), p.end());
    const Point s = instance.units[pick(rng)].position;
    sites.push_back(s);
    for (int j = 0; j < m; ++j) {
      d2[j] = std::min(d2[j], SquaredNorm(instance.units[j].position - s));
    }
  }
  return sites;
}

absl::StatusOr<KMeansTrace> MultiStartKMeans(const Instance& instance,
                                             const std::vector<Metric>& metrics,
                                             const MultiStartOptions& options) {
  if (options.restarts <= 0) {
    return absl::InvalidArgumentError("restarts must be positive");
  }
  std::optional<KMeansTrace> best;
  for (int r = 0; r < options.restarts; ++r) {
    std::seed_seq seq{options.seed, static_cast<uint64_t>(r)};
    uint32_t words[2];
    seq.generate(words, words + 2);
    const uint64_t restart_seed = (uint64_t{words[0]} << 32) | words[1];
    absl::StatusOr<std::vector<Point>> sites =
        SpreadSites(instance, instance.k, restart_seed);
    if (!sites.ok()) return sites.status();
    absl::StatusOr<KMeansTrace> trace =
        options.update == SiteUpdate::kCentroid
            ? BalancedKMeans(instance, *std::move(sites), metrics,
                             options.kmeans)
            : BalancedKMedians(instance, *std::move(sites), options.kmeans);
    if (!trace.ok()) return trace.status();
    trace->restart = r;
    if (!best || trace->iterations.back().objective <
                     best->iterations.back().objective) {
      best = *std::move(trace);
    }
  }
  return *std::move(best);
}

std::vector<int> NearestUnits(const Instance& instance,
                              const std::vector<Point>& points) {
  std::vector<int> out;
  std::vector<bool> used(instance.num_units(), false);
  for (const Point& p : points) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < instance.num_units(); ++j) {
      if (used[j]) continue;
      const double d = SquaredNorm(instance.units[j].position - p);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best < 0) break;
    used[best] = true;
    out.push_back(best);
  }
  return out;
}

namespace {

class SiteEvaluator {
 public:
  SiteEvaluator(const Instance& instance, const Constraints& constraints)
      : instance_(instance), constraints_(constraints) {}

  // Graph distances from `site`, cached.
  const std::vector<double>* Distances(int site) {
    auto it = cache_.find(site);
    if (it != cache_.end()) return &it->second;
    absl::StatusOr<ShortestPathTree> tree =
        ShortestPaths(*instance_.graph, site);
    if (!tree.ok()) return nullptr;
    return &cache_.emplace(site, std::move(tree->distance)).first->second;
  }

  double Deviation(const std::vector<int>& sites) {
    const int k = instance_.k;
    const int m = instance_.num_units();
    CostMatrix costs(k, m);
    for (int i = 0; i < k; ++i) {
      const std::vector<double>* d = Distances(sites[i]);
      if (d == nullptr) return kInf;
      for (int j = 0; j < m; ++j) costs(i, j) = (*d)[j];
    }
    absl::StatusOr<RelativeInteriorResult> solved = RelativeInteriorSolution(
        MakeProblem(instance_, std::move(costs), constraints_));
    if (!solved.ok()) return kInf;
    std::vector<Site> unit_sites;
    for (int s : sites) unit_sites.push_back(UnitSite{s});
    DistanceModel model =
        MakeModel(GraphMetric{}, IdentityTransform{}, std::move(unit_sites));
    absl::StatusOr<RoundingOutcome> rounded =
        RoundConnected(instance_, solved->clustering, model);
    if (!rounded.ok()) return kInf;
    return rounded->epsilon_achieved;
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

 private:
  const Instance& instance_;
  const Constraints& constraints_;
  std::map<int, std::vector<double>> cache_;
};

}  // namespace

double SiteDeviation(const Instance& instance, const std::vector<int>& sites,
                     const Constraints& constraints) {
  if (!instance.graph || static_cast<int>(sites.size()) != instance.k) {
    return std::numeric_limits<double>::infinity();
  }
  SiteEvaluator evaluator(instance, constraints);
  return evaluator.Deviation(sites);
}

absl::StatusOr<LocalSearchResult> LocalSearchSites(
    const Instance& instance, std::vector<int> initial_sites,
    const LocalSearchConfig& config) {
  if (!instance.graph) {
    return absl::InvalidArgumentError("local search needs a graph");
  }
  const int k = instance.k;
  const int m = instance.num_units();
  if (static_cast<int>(initial_sites.size()) != k) {
    return absl::InvalidArgumentError(absl::StrCat("need ", k, " sites"));
  }
  std::vector<int> sorted = initial_sites;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
      sorted.front() < 0 || sorted.back() >= m) {
    return absl::InvalidArgumentError("sites must be distinct units");
  }
  if (config.neighborhood <= 0) {
    return absl::InvalidArgumentError("neighborhood must be positive");
  }
  const int neighborhood = std::min(config.neighborhood, m);
  SiteEvaluator evaluator(instance, config.constraints);
  LocalSearchResult result;
  result.sites = std::move(initial_sites);
  result.deviation = evaluator.Deviation(result.sites);
  result.initial_deviation = result.deviation;
  result.evaluations = 1;
  std::mt19937_64 rng(config.seed);
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  while (result.iterations < config.max_iterations && result.deviation > 0.0) {
    std::shuffle(order.begin(), order.end(), rng);
    bool improved = false;
    for (int i : order) {
      const std::vector<double>* dist = evaluator.Distances(result.sites[i]);
      if (dist == nullptr) break;
      std::vector<int> near(m);
      std::iota(near.begin(), near.end(), 0);
      std::stable_sort(near.begin(), near.end(), [&](int a, int b) {
        return (*dist)[a] < (*dist)[b];
      });
      near.resize(neighborhood);
      for (int u : near) {
        if (std::find(result.sites.begin(), result.sites.end(), u) !=
            result.sites.end()) {
          continue;
        }
        std::vector<int> trial = result.sites;
        trial[i] = u;
        const double dev = evaluator.Deviation(trial);
        ++result.evaluations;
        if (dev < result.deviation - 1e-12) {
          result.sites = std::move(trial);
          result.deviation = dev;
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
    if (!improved) break;
    ++result.iterations;
  }
  return result;
}

}  // namespace gvd

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

#include "gvd/io.h"

#include <fstream>
#include <sstream>
#include <utility>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "gvd/diagram.h"

namespace gvd {

using nlohmann::json;

namespace {

absl::Status FieldError(absl::string_view path, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", what));
}

absl::StatusOr<double> GetNumber(const json& obj, const char* key,
                                 const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return FieldError(absl::StrCat(path, ".", key), "missing");
  if (!it->is_number()) {
    return FieldError(absl::StrCat(path, ".", key), "expected a number");
  }
  return it->get<double>();
}

absl::StatusOr<std::string> GetId(const json& value, const std::string& path) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return value.dump();
  return FieldError(path, "expected a string or integer id");
}

absl::StatusOr<int> GetInt(const json& obj, const char* key,
                           const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return FieldError(absl::StrCat(path, ".", key), "missing");
  if (!it->is_number_integer()) {
    return FieldError(absl::StrCat(path, ".", key), "expected an integer");
  }
  return it->get<int>();
}

absl::StatusOr<int> LookupUnit(const Instance& instance, const json& value,
                               const std::string& path) {
  absl::StatusOr<std::string> id = GetId(value, path);
  if (!id.ok()) return id.status();
  std::optional<int> unit = instance.FindUnit(*id);
  if (!unit) return FieldError(path, absl::StrCat("unknown unit '", *id, "'"));
  return *unit;
}

json PointJson(Point p) { return json::array({p.x, p.y}); }

}  // namespace

absl::StatusOr<InstanceFile> ParseInstance(const json& doc) {
  if (!doc.is_object()) return FieldError("$", "expected an object");
  InstanceFile file;
  Instance& in = file.instance;
  auto units = doc.find("units");
  if (units == doc.end() || !units->is_array()) {
    return FieldError("units", "expected an array");
  }
  for (size_t t = 0; t < units->size(); ++t) {
    const json& u = (*units)[t];
    const std::string path = absl::StrCat("units[", t, "]");
    if (!u.is_object()) return FieldError(path, "expected an object");
    if (!u.contains("id")) return FieldError(path + ".id", "missing");
    absl::StatusOr<std::string> id = GetId(u["id"], path + ".id");
    if (!id.ok()) return id.status();
    absl::StatusOr<double> x = GetNumber(u, "x", path);
    if (!x.ok()) return x.status();
    absl::StatusOr<double> y = GetNumber(u, "y", path);
    if (!y.ok()) return y.status();
    double weight = 1.0;
    if (u.contains("weight")) {
      absl::StatusOr<double> w = GetNumber(u, "weight", path);
      if (!w.ok()) return w.status();
      weight = *w;
    }
    in.units.push_back({*std::move(id), {*x, *y}, weight});
  }
  absl::StatusOr<int> k = GetInt(doc, "k", "$");
  if (!k.ok()) return k.status();
  in.k = *k;
  if (in.k <= 0) return FieldError("k", "must be positive");

  if (auto edges = doc.find("edges"); edges != doc.end()) {
    if (!edges->is_array()) return FieldError("edges", "expected an array");
    std::vector<Edge> list;
    for (size_t t = 0; t < edges->size(); ++t) {
      const json& e = (*edges)[t];
      const std::string path = absl::StrCat("edges[", t, "]");
      if (!e.is_object() || !e.contains("a") || !e.contains("b")) {
        return FieldError(path, "expected {a, b, length}");
      }
      absl::StatusOr<int> a = LookupUnit(in, e["a"], path + ".a");
      if (!a.ok()) return a.status();
      absl::StatusOr<int> b = LookupUnit(in, e["b"], path + ".b");
      if (!b.ok()) return b.status();
      double length = 1.0;
      if (e.contains("length")) {
        absl::StatusOr<double> l = GetNumber(e, "length", path);
        if (!l.ok()) return l.status();
        length = *l;
      }
      list.push_back({*a, *b, length});
    }
    in.graph.emplace(in.num_units(), std::move(list));
  }

  if (auto eps = doc.find("epsilon-target"); eps != doc.end()) {
    if (!eps->is_number() || eps->get<double>() < 0.0) {
      return FieldError("epsilon-target", "expected a non-negative number");
    }
    file.epsilon_target = eps->get<double>();
  }
  if (auto caps = doc.find("capacities"); caps != doc.end()) {
    if (!caps->is_array()) return FieldError("capacities", "expected an array");
    for (size_t t = 0; t < caps->size(); ++t) {
      if (!(*caps)[t].is_number()) {
        return FieldError(absl::StrCat("capacities[", t, "]"),
                          "expected a number");
      }
      in.capacities.push_back((*caps)[t].get<double>());
    }
  } else {
    in.capacities.assign(in.k, in.TotalWeight() / in.k);
  }

  absl::StatusOr<Instance> normalized = NormalizeInstance(std::move(in));
  if (!normalized.ok()) return normalized.status();
  file.instance = *std::move(normalized);

  if (auto ref = doc.find("reference"); ref != doc.end()) {
    if (!ref->is_array()) return FieldError("reference", "expected an array");
    const Instance& inst = file.instance;
    std::vector<int> labels(inst.num_units(), -1);
    for (size_t t = 0; t < ref->size(); ++t) {
      const json& r = (*ref)[t];
      const std::string path = absl::StrCat("reference[", t, "]");
      if (!r.is_object() || !r.contains("unit")) {
        return FieldError(path, "expected {unit, cluster}");
      }
      absl::StatusOr<int> unit = LookupUnit(inst, r["unit"], path + ".unit");
      if (!unit.ok()) return unit.status();
      absl::StatusOr<int> cluster = GetInt(r, "cluster", path);
      if (!cluster.ok()) return cluster.status();
      if (*cluster < 0 || *cluster >= inst.k) {
        return FieldError(path + ".cluster", "out of range");
      }
      labels[*unit] = *cluster;
    }
    for (int j = 0; j < inst.num_units(); ++j) {
      if (labels[j] < 0) {
        return FieldError("reference",
                          absl::StrCat("unit '", inst.units[j].id,
                                       "' has no cluster"));
      }
    }
    file.reference = FractionalClustering::FromLabels(inst.k, labels);
  }
  return file;
}

absl::StatusOr<InstanceFile> ParseInstanceText(absl::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr,
                         /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    // Re-parse with exceptions for the positional message.
    try {
      json unused = json::parse(text.begin(), text.end());
      (void)unused;
    } catch (const json::parse_error& e) {
      return absl::InvalidArgumentError(e.what());
    }
    return absl::InvalidArgumentError("malformed JSON");
  }
  return ParseInstance(doc);
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path));
  out << contents;
  return out ? absl::OkStatus()
             : absl::InternalError(absl::StrCat("write failed: ", path));
}

absl::StatusOr<InstanceFile> LoadInstance(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return absl::InvalidArgumentError(text.status().message());
  absl::StatusOr<InstanceFile> file = ParseInstanceText(*text);
  if (!file.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", file.status().message()));
  }
  return file;
}

json InstanceToJson(const InstanceFile& file) {
  const Instance& in = file.instance;
  json doc;
  json units = json::array();
  for (const Unit& u : in.units) {
    units.push_back(
        {{"id", u.id}, {"x", u.position.x}, {"y", u.position.y},
         {"weight", u.weight}});
  }
  doc["units"] = std::move(units);
  if (in.graph) {
    json edges = json::array();
    for (const Edge& e : in.graph->edges()) {
      edges.push_back({{"a", in.units[e.a].id},
                       {"b", in.units[e.b].id},
                       {"length", e.length}});
    }
    doc["edges"] = std::move(edges);
  }
  doc["k"] = in.k;
  doc["capacities"] = in.capacities;
  if (file.epsilon_target) doc["epsilon-target"] = *file.epsilon_target;
  if (file.reference) {
    json ref = json::array();
    const std::vector<int> labels = file.reference->Labels();
    for (int j = 0; j < in.num_units(); ++j) {
      ref.push_back({{"unit", in.units[j].id}, {"cluster", labels[j]}});
    }
    doc["reference"] = std::move(ref);
  }
  return doc;
}

absl::StatusOr<Assignment> ParseAssignment(absl::string_view text,
                                           const Instance& instance) {
  std::pair<absl::string_view, absl::string_view> parts =
      absl::StrSplit(text, absl::MaxSplits(':', 1));
  int cluster = 0;
  if (!absl::SimpleAtoi(parts.first, &cluster) || cluster < 0 ||
      cluster >= instance.k) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", text, "': expected CLUSTER:UNIT with cluster in [0, ",
                     instance.k, ")"));
  }
  std::optional<int> unit = instance.FindUnit(std::string(parts.second));
  if (!unit) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", text, "': unknown unit '", parts.second, "'"));
  }
  return Assignment{cluster, *unit};
}

absl::StatusOr<Constraints> ParseConstraints(const json& doc,
                                             const Instance& instance) {
  Constraints out;
  if (doc.is_null()) return out;
  if (!doc.is_object()) return FieldError("constraints", "expected an object");
  for (const char* key : {"pin", "exclude"}) {
    auto it = doc.find(key);
    if (it == doc.end()) continue;
    if (!it->is_array()) return FieldError(key, "expected an array");
    for (size_t t = 0; t < it->size(); ++t) {
      const json& a = (*it)[t];
      const std::string path = absl::StrCat(key, "[", t, "]");
      if (!a.is_object() || !a.contains("unit")) {
        return FieldError(path, "expected {unit, cluster}");
      }
      absl::StatusOr<int> unit = LookupUnit(instance, a["unit"], path + ".unit");
      if (!unit.ok()) return unit.status();
      absl::StatusOr<int> cluster = GetInt(a, "cluster", path);
      if (!cluster.ok()) return cluster.status();
      (std::string_view(key) == "pin" ? out.pins : out.exclusions)
          .push_back({*cluster, *unit});
    }
  }
  return out;
}

json ConstraintsToJson(const Constraints& constraints,
                       const Instance& instance) {
  auto list = [&](const std::vector<Assignment>& v) {
    json out = json::array();
    for (const Assignment& a : v) {
      out.push_back({{"unit", instance.units[a.unit].id},
                     {"cluster", a.cluster}});
    }
    return out;
  };
  return {{"pin", list(constraints.pins)},
          {"exclude", list(constraints.exclusions)}};
}

json SummaryToJson(const EvaluationSummary& s) {
  json doc = {{"avgDeviation", s.avg_deviation},
              {"maxDeviation", s.max_deviation},
              {"momentOfInertia", s.moment_of_inertia},
              {"clusterWeights", s.cluster_weights},
              {"connectivity", s.connectivity}};
  doc["changedPairsRatio"] =
      s.changed_pairs_ratio ? json(*s.changed_pairs_ratio) : json(nullptr);
  doc["starShaped"] = s.star_shaped ? json(*s.star_shaped) : json(nullptr);
  return doc;
}

absl::StatusOr<EvaluationSummary> SummaryFromJson(const json& doc) {
  if (!doc.is_object()) return FieldError("summary", "expected an object");
  EvaluationSummary s;
  try {
    s.avg_deviation = doc.at("avgDeviation").get<double>();
    s.max_deviation = doc.at("maxDeviation").get<double>();
    s.moment_of_inertia = doc.at("momentOfInertia").get<double>();
    s.cluster_weights = doc.at("clusterWeights").get<std::vector<double>>();
    for (const json& b : doc.at("connectivity")) {
      s.connectivity.push_back(b.get<bool>());
    }
    if (doc.contains("changedPairsRatio") &&
        !doc["changedPairsRatio"].is_null()) {
      s.changed_pairs_ratio = doc["changedPairsRatio"].get<double>();
    }
    if (doc.contains("starShaped") && !doc["starShaped"].is_null()) {
      s.star_shaped = doc["starShaped"].get<bool>();
    }
  } catch (const json::exception& e) {
    return FieldError("summary", e.what());
  }
  return s;
}

json ModelToJson(const DistanceModel& model, const Instance& instance) {
  json metrics = json::array();
  for (const Metric& metric : model.metrics) {
    if (const auto* ell = std::get_if<EllipsoidalMetric>(&metric)) {
      metrics.push_back({{"xx", ell->matrix.xx()},
                         {"xy", ell->matrix.xy()},
                         {"yy", ell->matrix.yy()}});
    } else if (IsGraphMetric(metric)) {
      metrics.push_back("graph");
    } else {
      metrics.push_back("euclidean");
    }
  }
  json transform;
  if (std::holds_alternative<IdentityTransform>(model.transform)) {
    transform = "identity";
  } else if (std::holds_alternative<SquareTransform>(model.transform)) {
    transform = "square";
  } else {
    const auto& a = std::get<AffineTransform>(model.transform);
    transform = {{"alpha", a.alpha}, {"beta", a.beta}};
  }
  json sites = json::array();
  for (const Site& s : model.sites) {
    if (const auto* u = std::get_if<UnitSite>(&s)) {
      sites.push_back({{"unit", instance.units[u->unit].id}});
    } else {
      const Point p = std::get<Point>(s);
      sites.push_back({{"x", p.x}, {"y", p.y}});
    }
  }
  return {{"metrics", std::move(metrics)},
          {"transform", std::move(transform)},
          {"sites", std::move(sites)},
          {"mu", model.mu}};
}

namespace {

absl::StatusOr<DistanceModel> ModelFromJson(const json& params,
                                            const json& sites, const json& mu,
                                            const Instance& instance) {
  DistanceModel model;
  try {
    for (const json& m : params.at("metrics")) {
      if (m.is_string() && m == "euclidean") {
        model.metrics.push_back(EuclideanMetric{});
      } else if (m.is_string() && m == "graph") {
        model.metrics.push_back(GraphMetric{});
      } else {
        const double xy = m.at("xy").get<double>();
        absl::StatusOr<SpdMatrix2> matrix = SpdMatrix2::Create(
            m.at("xx").get<double>(), xy, xy, m.at("yy").get<double>());
        if (!matrix.ok()) return matrix.status();
        model.metrics.push_back(EllipsoidalMetric{*matrix});
      }
    }
    const json& h = params.at("transform");
    if (h == "identity") {
      model.transform = IdentityTransform{};
    } else if (h == "square") {
      model.transform = SquareTransform{};
    } else {
      model.transform = AffineTransform{h.at("alpha").get<double>(),
                                        h.at("beta").get<double>()};
    }
    for (size_t t = 0; t < sites.size(); ++t) {
      const json& s = sites[t];
      if (s.contains("unit")) {
        absl::StatusOr<int> unit =
            LookupUnit(instance, s["unit"], absl::StrCat("sites[", t, "]"));
        if (!unit.ok()) return unit.status();
        model.sites.push_back(UnitSite{*unit});
      } else {
        model.sites.push_back(
            Point{s.at("x").get<double>(), s.at("y").get<double>()});
      }
    }
    model.mu = mu.get<std::vector<double>>();
  } catch (const json::exception& e) {
    return FieldError("model", e.what());
  }
  if (absl::Status s = ValidateModel(model, instance); !s.ok()) return s;
  return model;
}

}  // namespace

json ResultToJson(const ResultFile& result, const Instance& instance) {
  json doc;
  json assignments = json::array();
  for (int j = 0; j < result.clustering.m(); ++j) {
    for (const auto& e : result.clustering.column(j)) {
      assignments.push_back({{"unit", instance.units[j].id},
                             {"cluster", e.cluster},
                             {"fraction", e.value}});
    }
  }
  doc["assignments"] = std::move(assignments);
  json model = ModelToJson(result.model, instance);
  doc["mu"] = model["mu"];
  doc["sites"] = model["sites"];
  doc["summary"] = SummaryToJson(result.summary);
  json params = result.parameters;
  params["metrics"] = model["metrics"];
  params["transform"] = model["transform"];
  doc["parameters"] = std::move(params);
  if (result.rounding) {
    doc["rounding"] = {{"epsilonAchieved", result.rounding->epsilon_achieved},
                       {"epsilonBound", result.rounding->epsilon_bound},
                       {"movedUnits", result.rounding->moved_units},
                       {"method", result.rounding->method}};
  }
  return doc;
}

absl::StatusOr<ResultFile> ParseResult(const json& doc,
                                       const Instance& instance) {
  if (!doc.is_object()) return FieldError("$", "expected an object");
  for (const char* key : {"assignments", "mu", "sites", "parameters"}) {
    if (!doc.contains(key)) return FieldError(key, "missing");
  }
  ResultFile result;
  absl::StatusOr<DistanceModel> model =
      ModelFromJson(doc["parameters"], doc["sites"], doc["mu"], instance);
  if (!model.ok()) return model.status();
  result.model = *std::move(model);
  result.clustering = FractionalClustering(instance.k, instance.num_units());
  const json& assignments = doc["assignments"];
  if (!assignments.is_array()) {
    return FieldError("assignments", "expected an array");
  }
  for (size_t t = 0; t < assignments.size(); ++t) {
    const json& a = assignments[t];
    const std::string path = absl::StrCat("assignments[", t, "]");
    if (!a.is_object() || !a.contains("unit")) {
      return FieldError(path, "expected {unit, cluster, fraction}");
    }
    absl::StatusOr<int> unit = LookupUnit(instance, a["unit"], path + ".unit");
    if (!unit.ok()) return unit.status();
    absl::StatusOr<int> cluster = GetInt(a, "cluster", path);
    if (!cluster.ok()) return cluster.status();
    if (*cluster < 0 || *cluster >= instance.k) {
      return FieldError(path + ".cluster", "out of range");
    }
    absl::StatusOr<double> fraction = GetNumber(a, "fraction", path);
    if (!fraction.ok()) return fraction.status();
    result.clustering.Set(*cluster, *unit, *fraction);
  }
  if (absl::Status s = result.clustering.Validate(); !s.ok()) {
    return FieldError("assignments", s.message());
  }
  if (doc.contains("summary")) {
    absl::StatusOr<EvaluationSummary> summary = SummaryFromJson(doc["summary"]);
    if (!summary.ok()) return summary.status();
    result.summary = *std::move(summary);
  }
  result.parameters = doc["parameters"];
  result.parameters.erase("metrics");
  result.parameters.erase("transform");
  if (doc.contains("rounding")) {
    const json& r = doc["rounding"];
    try {
      result.rounding = RoundingInfo{r.at("epsilonAchieved").get<double>(),
                                     r.at("epsilonBound").get<double>(),
                                     r.at("movedUnits").get<int>(),
                                     r.at("method").get<std::string>()};
    } catch (const json::exception& e) {
      return FieldError("rounding", e.what());
    }
  }
  return result;
}

std::string DumpJson(const json& doc) { return doc.dump(2) + "\n"; }

std::string ExportCsv(const ResultFile& result, const Instance& instance) {
  std::string out = "unit,cluster,fraction\n";
  for (int j = 0; j < result.clustering.m(); ++j) {
    for (const auto& e : result.clustering.column(j)) {
      absl::StrAppend(&out, instance.units[j].id, ",", e.cluster, ",",
                      json(e.value).dump(), "\n");
    }
  }
  return out;
}

namespace {

bool IsPowerModel(const DistanceModel& model) {
  if (!std::holds_alternative<SquareTransform>(model.transform)) return false;
  for (const Metric& m : model.metrics) {
    if (!std::holds_alternative<EuclideanMetric>(m)) return false;
  }
  for (const Site& s : model.sites) {
    if (!std::holds_alternative<Point>(s)) return false;
  }
  return true;
}

json PolygonJson(const Polygon& polygon) {
  json ring = json::array();
  for (const Point& p : polygon) ring.push_back(PointJson(p));
  if (!polygon.empty()) ring.push_back(PointJson(polygon.front()));
  return ring;
}

}  // namespace

absl::StatusOr<std::string> ExportGeoJson(const ResultFile& result,
                                          const Instance& instance) {
  if (result.model.HasGraphMetric()) {
    return absl::InvalidArgumentError(
        "GeoJSON export needs planar point metrics");
  }
  json features = json::array();
  const std::vector<int> labels = result.clustering.Labels();
  for (int j = 0; j < instance.num_units(); ++j) {
    json fractions = json::array();
    for (const auto& e : result.clustering.column(j)) {
      fractions.push_back({{"cluster", e.cluster}, {"fraction", e.value}});
    }
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "Point"},
           {"coordinates", PointJson(instance.units[j].position)}}},
         {"properties",
          {{"id", instance.units[j].id},
           {"cluster", labels[j]},
           {"fractions", std::move(fractions)}}}});
  }
  if (IsPowerModel(result.model)) {
    absl::StatusOr<std::vector<Polygon>> cells =
        PowerCells2d(result.model, BoundingBox(instance));
    if (!cells.ok()) return cells.status();
    for (int i = 0; i < static_cast<int>(cells->size()); ++i) {
      const Polygon& cell = (*cells)[i];
      if (cell.empty()) continue;
      features.push_back(
          {{"type", "Feature"},
           {"geometry",
            {{"type", "Polygon"},
             {"coordinates", json::array({PolygonJson(cell)})}}},
           {"properties", {{"cluster", i}, {"kind", "cell"}}}});
    }
  }
  return DumpJson({{"type", "FeatureCollection"}, {"features", features}});
}

absl::StatusOr<json> CellsToJson(const ResultFile& result,
                                 const Instance& instance) {
  if (IsPowerModel(result.model)) {
    absl::StatusOr<std::vector<Polygon>> cells =
        PowerCells2d(result.model, BoundingBox(instance));
    if (!cells.ok()) return cells.status();
    json polygons = json::array();
    for (const Polygon& cell : *cells) {
      json ring = json::array();
      for (const Point& p : cell) ring.push_back(PointJson(p));
      polygons.push_back(std::move(ring));
    }
    return json{{"type", "polygons"}, {"polygons", std::move(polygons)}};
  }
  absl::StatusOr<Cells> cells = ComputeCells(instance, result.model);
  if (!cells.ok()) return cells.status();
  json membership = json::array();
  for (int j = 0; j < instance.num_units(); ++j) {
    membership.push_back(
        {{"unit", instance.units[j].id}, {"clusters", cells->membership[j]}});
  }
  return json{{"type", "membership"}, {"membership", std::move(membership)}};
}

}  // namespace gvd

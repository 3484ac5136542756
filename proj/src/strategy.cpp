#include "rankstrat/strategy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>

#include "rankstrat/errors.hpp"

namespace rankstrat {

namespace {

std::string fixed2(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, ptr);
}

double feature_of(const InstituteRecord& r, const std::string& feature) {
  auto v = r.feature(feature);
  if (!v) throw MissingParameter(feature + " absent for institute '" + r.institute_id + "'");
  return *v;
}

}  // namespace

std::string PathCondition::describe() const {
  return feature + (op == ConditionOp::LE ? " <= " : " > ") + fixed2(threshold);
}

LaplaceEstimate laplace_estimate(const ClassDistribution& dist, int target_class, int k) {
  if (k < 2) throw ConfigError("Laplace correction needs at least 2 classes");
  if (target_class < 1 || target_class > k) {
    throw DataError("target class " + std::to_string(target_class) + " outside 1.." + std::to_string(k));
  }
  const int hits = target_class <= dist.num_classes() ? dist.count(target_class) : 0;
  LaplaceEstimate e;
  e.numerator = hits + 1;
  e.denominator = dist.total() + k;
  e.value = static_cast<double>(e.numerator) / e.denominator;
  return e;
}

std::vector<DecisionPath> enumerate_paths(const DecisionTree& tree) {
  std::vector<DecisionPath> out;
  std::vector<PathCondition> prefix;
  std::function<void(int)> walk = [&](int id) {
    const TreeNode& n = tree.node(id);
    if (id != 0 || n.is_leaf()) {
      DecisionPath p;
      p.conditions = prefix;
      p.node_distribution = n.distribution;
      p.node_id = id;
      p.is_leaf = n.is_leaf();
      p.target_class = n.predicted_class();
      p.laplace = laplace_estimate(n.distribution, p.target_class, tree.num_classes());
      out.push_back(std::move(p));
    }
    if (n.is_leaf()) return;
    const std::string& feature = tree.feature_names()[static_cast<std::size_t>(n.feature)];
    prefix.push_back({feature, ConditionOp::LE, n.threshold});
    walk(n.left);
    prefix.back().op = ConditionOp::GT;
    walk(n.right);
    prefix.pop_back();
  };
  walk(0);
  return out;
}

std::vector<DecisionPath> leaf_paths(const DecisionTree& tree) {
  auto all = enumerate_paths(tree);
  std::erase_if(all, [](const DecisionPath& p) { return !p.is_leaf; });
  return all;
}

std::vector<FeatureBounds> tighten(std::span<const PathCondition> conditions,
                                   std::span<const std::string> feature_order) {
  std::vector<FeatureBounds> out;
  for (const auto& f : feature_order) out.push_back({canonical_feature(f), std::nullopt, std::nullopt});
  for (const auto& c : conditions) {
    const std::string key = canonical_feature(c.feature);
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& b) { return b.feature == key; });
    if (it == out.end()) {
      out.push_back({key, std::nullopt, std::nullopt});
      it = out.end() - 1;
    }
    if (c.op == ConditionOp::GT) it->lower = it->lower ? std::max(*it->lower, c.threshold) : c.threshold;
    else it->upper = it->upper ? std::min(*it->upper, c.threshold) : c.threshold;
  }
  return out;
}

std::vector<std::size_t> filter_rows(const LabeledDataset& dataset, std::span<const PathCondition> conditions) {
  std::vector<std::size_t> rows;
  const auto& records = dataset.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const bool match = std::all_of(conditions.begin(), conditions.end(), [&](const PathCondition& c) {
      return c.holds(feature_of(records[i], c.feature));
    });
    if (match) rows.push_back(i);
  }
  return rows;
}

std::vector<double> class_score_floors(const LabeledDataset& dataset) {
  const auto scores = dataset.scores(ScoreWeights::no_perception());
  std::vector<double> floors(static_cast<std::size_t>(dataset.config().num_classes),
                             std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto& f = floors[static_cast<std::size_t>(dataset.labels()[i] - 1)];
    f = std::min(f, scores[i]);
  }
  return floors;
}

FloorConstraints path_floor_constraints(const LabeledDataset& dataset,
                                        std::span<const PathCondition> conditions, int target_class,
                                        std::span<const std::string> features) {
  std::vector<std::size_t> support;
  for (std::size_t r : filter_rows(dataset, conditions)) {
    if (dataset.labels()[r] == target_class) support.push_back(r);
  }
  if (support.empty()) {
    throw NoSupport("no class-" + std::to_string(target_class) + " record satisfies the path");
  }
  FloorConstraints out;
  for (const auto& f : features) {
    const std::string key = canonical_feature(f);
    const bool has_gt = std::any_of(conditions.begin(), conditions.end(), [&](const PathCondition& c) {
      return c.op == ConditionOp::GT && canonical_feature(c.feature) == key;
    });
    if (has_gt) continue;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t r : support) lo = std::min(lo, feature_of(dataset.records()[r], key));
    out.floors.emplace_back(key, lo);
  }
  out.score_floor = class_score_floors(dataset).at(static_cast<std::size_t>(target_class - 1));
  return out;
}

std::vector<LevelRow> level_table(const LabeledDataset& dataset, const DecisionPath& path, int target_class,
                                  std::span<const std::string> features) {
  std::vector<LevelRow> rows;
  const int k = dataset.config().num_classes;
  for (std::size_t level = 1; level <= path.conditions.size(); ++level) {
    LevelRow row;
    row.level = static_cast<int>(level);
    row.conditions.assign(path.conditions.begin(), path.conditions.begin() + static_cast<long>(level));
    row.distribution = ClassDistribution(k);
    for (std::size_t r : filter_rows(dataset, row.conditions)) row.distribution.add(dataset.labels()[r]);
    row.laplace = laplace_estimate(row.distribution, target_class, k);
    try {
      row.floors = path_floor_constraints(dataset, row.conditions, target_class, features).floors;
    } catch (const NoSupport&) {
      // Prefix without same-class evidence: no floors to report.
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::vector<FeatureGap> gap_analysis(const DecisionPath& path, const std::vector<std::string>& features,
                                     const std::map<std::string, double>& subject) {
  std::map<std::string, double> canonical;
  for (const auto& [k, v] : subject) canonical[canonical_feature(k)] = v;
  std::vector<FeatureGap> gaps;
  for (const auto& bounds : tighten(path.conditions, features)) {
    auto current = canonical.find(bounds.feature);
    if (current == canonical.end()) {
      throw MissingParameter("subject lacks feature " + bounds.feature);
    }
    FeatureGap g;
    g.feature = bounds.feature;
    g.current = current->second;
    if (bounds.lower) {
      g.required = *bounds.lower;
      g.strict = true;
    } else {
      auto floor = std::find_if(path.floors.begin(), path.floors.end(),
                                [&](const auto& f) { return f.first == bounds.feature; });
      g.required = floor != path.floors.end() ? floor->second : 0.0;
    }
    g.gap = std::max(0.0, g.required - g.current);
    if (g.current > 0.0) g.percent_change = 100.0 * g.gap / g.current;
    g.ceiling = bounds.upper;
    g.above_ceiling = bounds.upper && g.current > *bounds.upper;
    gaps.push_back(std::move(g));
  }
  return gaps;
}

}  // namespace

StrategyReport strategy_report(const DecisionTree& tree, const LabeledDataset& dataset, int target_class,
                               const std::optional<std::map<std::string, double>>& subject) {
  const int k = tree.num_classes();
  if (target_class < 1 || target_class > k) {
    throw DataError("target class " + std::to_string(target_class) + " outside 1.." + std::to_string(k));
  }
  StrategyReport report;
  report.target_class = target_class;
  report.subject = subject;
  const auto& features = tree.feature_names();

  for (auto& path : leaf_paths(tree)) {
    if (path.target_class != target_class) continue;
    // Counts come from the data filtered by the path, not the tree caches.
    path.node_distribution = ClassDistribution(k);
    for (std::size_t r : filter_rows(dataset, path.conditions)) path.node_distribution.add(dataset.labels()[r]);
    path.laplace = laplace_estimate(path.node_distribution, target_class, k);
    const auto constraints = path_floor_constraints(dataset, path.conditions, target_class, features);
    path.floors = constraints.floors;
    path.score_floor = constraints.score_floor;

    PathStrategy s;
    s.levels = level_table(dataset, path, target_class, features);
    for (const auto& bounds : tighten(path.conditions, features)) {
      if (!bounds.upper) continue;
      auto floor = std::find_if(path.floors.begin(), path.floors.end(),
                                [&](const auto& f) { return f.first == bounds.feature; });
      if (floor != path.floors.end()) {
        s.recommendation.emplace_back(bounds.feature, (floor->second + *bounds.upper) / 2.0);
      }
    }
    if (subject) s.gaps = gap_analysis(path, features, *subject);
    s.path = std::move(path);
    report.paths.push_back(std::move(s));
  }
  if (report.paths.empty()) {
    throw NoPath("no leaf of the tree predicts class " + std::to_string(target_class));
  }
  std::stable_sort(report.paths.begin(), report.paths.end(), [](const PathStrategy& a, const PathStrategy& b) {
    if (a.path.laplace.value != b.path.laplace.value) return a.path.laplace.value > b.path.laplace.value;
    return a.path.node_distribution.total() > b.path.node_distribution.total();
  });
  return report;
}

WhatIfResult what_if(const DecisionTree& tree, std::span<const double> score_floors,
                     const std::map<std::string, double>& candidate) {
  std::map<std::string, double> canonical;
  for (const auto& [k, v] : candidate) {
    if (!std::isfinite(v) || v < 0.0 || v > 100.0) {
      throw DataError("candidate " + canonical_feature(k) + " = " + std::to_string(v) + " outside [0,100]");
    }
    canonical[canonical_feature(k)] = v;
  }
  InstituteRecord probe;
  for (const auto& f : primary_features()) {
    if (!canonical.contains(f)) throw MissingParameter("candidate lacks " + f);
  }
  probe.tlr = canonical["TLR"];
  probe.rpc = canonical["RPC"];
  probe.go = canonical["GO"];
  probe.oi = canonical["OI"];

  WhatIfResult out;
  const auto route = tree.route(tree.vector_from(canonical));
  out.leaf_id = route.back();
  const TreeNode& leaf = tree.node(out.leaf_id);
  out.predicted_class = leaf.predicted_class();
  out.leaf_distribution = leaf.distribution;
  out.laplace = laplace_estimate(leaf.distribution, out.predicted_class, tree.num_classes());
  for (std::size_t i = 0; i + 1 < route.size(); ++i) {
    const TreeNode& n = tree.node(route[i]);
    out.conditions.push_back({tree.feature_names()[static_cast<std::size_t>(n.feature)],
                              route[i + 1] == n.left ? ConditionOp::LE : ConditionOp::GT, n.threshold});
  }
  out.score = composite_score(probe, ScoreWeights::no_perception());
  const auto idx = static_cast<std::size_t>(out.predicted_class - 1);
  out.class_score_floor = idx < score_floors.size() ? score_floors[idx] : 0.0;
  out.below_score_floor = out.score < out.class_score_floor;
  return out;
}

WhatIfResult what_if(const DecisionTree& tree, const LabeledDataset& dataset,
                     const std::map<std::string, double>& candidate) {
  return what_if(tree, class_score_floors(dataset), candidate);
}

DecisionTree subparameter_tree(const LabeledDataset& subdata, std::span<const std::string> sub_features,
                               const ThresholdPredicate& predicate, const TreeParams& params) {
  if (sub_features.empty()) throw SchemaError("no sub-parameter features given");
  TrainingSet set;
  set.num_classes = 2;
  std::vector<std::vector<double>> columns;
  for (const auto& f : sub_features) {
    const std::string key = canonical_feature(f);
    set.feature_names.push_back(key);
    try {
      columns.push_back(subdata.column(key));
    } catch (const MissingParameter& e) {
      throw SchemaError("sub-parameter column missing: " + std::string(e.what()));
    }
  }
  std::vector<double> target;
  try {
    target = subdata.column(predicate.feature);
  } catch (const MissingParameter& e) {
    throw SchemaError("predicate column missing: " + std::string(e.what()));
  }
  set.rows.assign(subdata.size(), std::vector<double>(columns.size()));
  for (std::size_t i = 0; i < subdata.size(); ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) set.rows[i][j] = columns[j][i];
    set.labels.push_back(target[i] >= predicate.threshold ? 1 : 2);
  }
  return build_tree(set, params);
}

std::map<std::string, double> parse_feature_vector(std::string_view text) {
  std::map<std::string, double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(1, "expected NAME=VALUE, got '" + std::string(item) + "'");
    }
    const std::string key = canonical_feature(item.substr(0, eq));
    std::string value(item.substr(eq + 1));
    value.erase(0, value.find_first_not_of(' '));
    value.erase(value.find_last_not_of(' ') + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (key.empty() || value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
      throw ParseError(1, "bad feature assignment '" + std::string(item) + "'");
    }
    if (!out.emplace(key, v).second) throw ParseError(1, "feature " + key + " given twice");
    pos = comma + 1;
  }
  return out;
}

Json to_json(const LaplaceEstimate& laplace) {
  Json j;
  j["num"] = laplace.numerator;
  j["den"] = laplace.denominator;
  j["value"] = laplace.value;
  return j;
}

Json to_json(const PathCondition& condition) {
  Json j;
  j["feature"] = condition.feature;
  j["op"] = condition.op == ConditionOp::LE ? "<=" : ">";
  j["threshold"] = condition.threshold;
  return j;
}

namespace {

Json values_json(const FeatureValues& values) {
  Json j = Json::object();
  for (const auto& [name, v] : values) j[name] = v;
  return j;
}

Json conditions_json(std::span<const PathCondition> conditions) {
  Json j = Json::array();
  for (const auto& c : conditions) j.push_back(to_json(c));
  return j;
}

}  // namespace

Json to_json(const DecisionPath& path) {
  Json j;
  j["conditions"] = conditions_json(path.conditions);
  j["distribution"] = path.node_distribution.counts;
  j["laplace"] = to_json(path.laplace);
  j["floors"] = values_json(path.floors);
  j["score_floor"] = path.score_floor ? Json(*path.score_floor) : Json(nullptr);
  j["target_class"] = path.target_class;
  j["leaf_id"] = path.node_id;
  return j;
}

Json to_json(const PathStrategy& strategy) {
  Json j = to_json(strategy.path);
  if (!strategy.gaps.empty()) {
    Json gaps = Json::array();
    for (const auto& g : strategy.gaps) {
      Json gj;
      gj["feature"] = g.feature;
      gj["current"] = g.current;
      gj["required"] = g.required;
      gj["strict"] = g.strict;
      gj["gap"] = g.gap;
      gj["percent_change"] = g.percent_change ? Json(*g.percent_change) : Json(nullptr);
      gj["ceiling"] = g.ceiling ? Json(*g.ceiling) : Json(nullptr);
      gj["above_ceiling"] = g.above_ceiling;
      gaps.push_back(std::move(gj));
    }
    j["gaps"] = std::move(gaps);
  }
  if (!strategy.recommendation.empty()) j["recommendation"] = values_json(strategy.recommendation);
  Json levels = Json::array();
  for (const auto& row : strategy.levels) {
    Json lj;
    lj["level"] = row.level;
    lj["conditions"] = conditions_json(row.conditions);
    lj["distribution"] = row.distribution.counts;
    lj["laplace"] = to_json(row.laplace);
    lj["floors"] = values_json(row.floors);
    levels.push_back(std::move(lj));
  }
  j["levels"] = std::move(levels);
  return j;
}

Json to_json(const StrategyReport& report) {
  Json j;
  j["target_class"] = report.target_class;
  if (report.subject) {
    Json s = Json::object();
    for (const auto& [k, v] : *report.subject) s[canonical_feature(k)] = v;
    j["subject"] = std::move(s);
  }
  Json paths = Json::array();
  for (const auto& p : report.paths) paths.push_back(to_json(p));
  j["paths"] = std::move(paths);
  return j;
}

Json to_json(const WhatIfResult& result) {
  Json j;
  j["predicted_class"] = result.predicted_class;
  j["leaf_id"] = result.leaf_id;
  j["conditions"] = conditions_json(result.conditions);
  j["distribution"] = result.leaf_distribution.counts;
  j["laplace"] = to_json(result.laplace);
  j["score"] = result.score;
  j["class_score_floor"] = result.class_score_floor;
  j["below_score_floor"] = result.below_score_floor;
  return j;
}

namespace {

// "RPC > 29.30 & 1.68 <= TLR <= 61.58 (GO >= 47.12 & OI >= 36.54)"
std::string describe_level(const LevelRow& row, const std::vector<std::string>& features) {
  std::string conds;
  for (const auto& b : tighten(row.conditions, features)) {
    std::string part;
    if (b.lower && b.upper) {
      part = fixed2(*b.lower) + " < " + b.feature + " <= " + fixed2(*b.upper);
    } else if (b.lower) {
      part = b.feature + " > " + fixed2(*b.lower);
    } else if (b.upper) {
      auto floor = std::find_if(row.floors.begin(), row.floors.end(),
                                [&](const auto& f) { return f.first == b.feature; });
      part = (floor != row.floors.end() ? fixed2(floor->second) + " <= " : std::string()) + b.feature +
             " <= " + fixed2(*b.upper);
    } else {
      continue;
    }
    conds += (conds.empty() ? "" : " & ") + part;
  }
  std::string extra;
  for (const auto& [name, v] : row.floors) {
    const bool constrained = std::any_of(row.conditions.begin(), row.conditions.end(),
                                         [&](const PathCondition& c) { return c.feature == name; });
    if (constrained) continue;
    extra += (extra.empty() ? "" : " & ") + name + " >= " + fixed2(v);
  }
  return extra.empty() ? conds : conds + " (" + extra + ")";
}

}  // namespace

std::string render_report_markdown(const StrategyReport& report) {
  std::string md = "# Strategy report: class " + std::to_string(report.target_class) + "\n\n";
  if (report.subject) {
    md += "Subject:";
    for (const auto& [k, v] : *report.subject) md += " " + canonical_feature(k) + "=" + fixed2(v);
    md += "\n\n";
  }
  std::vector<std::string> features;
  if (!report.paths.empty()) {
    for (const auto& b : tighten(report.paths.front().path.conditions, primary_features())) {
      features.push_back(b.feature);
    }
  }
  int index = 1;
  for (const auto& s : report.paths) {
    const auto& p = s.path;
    const int n = p.node_distribution.total();
    md += "## Path " + std::to_string(index++) + " (leaf " + std::to_string(p.node_id) + ", " + std::to_string(n) +
          (n == 1 ? " sample)\n\n" : " samples)\n\n");
    if (p.score_floor) md += "Score floor (perception-free): " + fixed2(*p.score_floor) + "\n\n";
    md += "| Level | Class | Path | Laplace estimate |\n|---|---|---|---|\n";
    for (const auto& row : s.levels) {
      md += "| " + std::to_string(row.level) + " | " + std::to_string(report.target_class) + " | " +
            describe_level(row, features) + " | " + fixed2(row.laplace.value) + " (" +
            std::to_string(row.laplace.numerator) + "/" + std::to_string(row.laplace.denominator) + ") |\n";
    }
    md += "\n";
    if (!s.recommendation.empty()) {
      md += "Midpoint targets:";
      for (const auto& [name, v] : s.recommendation) md += " " + name + "=" + fixed2(v);
      md += "\n\n";
    }
    if (!s.gaps.empty()) {
      md += "| Feature | Current | Required | Gap | Change |\n|---|---|---|---|---|\n";
      for (const auto& g : s.gaps) {
        md += "| " + g.feature + " | " + fixed2(g.current) + " | " + (g.strict ? "> " : ">= ") +
              fixed2(g.required) + " | " + fixed2(g.gap) + " | " +
              (g.percent_change ? fixed2(*g.percent_change) + "%" : std::string("n/a")) +
              (g.above_ceiling ? " (above " + fixed2(*g.ceiling) + " bound)" : std::string()) + " |\n";
      }
      md += "\n";
    }
  }
  return md;
}

}  // namespace rankstrat

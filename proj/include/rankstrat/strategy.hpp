#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rankstrat/core.hpp"
#include "rankstrat/dtree.hpp"
#include "rankstrat/io.hpp"

namespace rankstrat {

enum class ConditionOp { LE, GT };

struct PathCondition {
  std::string feature;
  ConditionOp op = ConditionOp::LE;
  double threshold = 0.0;

  bool holds(double value) const { return op == ConditionOp::LE ? value <= threshold : value > threshold; }
  /// e.g. "RPC > 29.30".
  std::string describe() const;
};

/// Add-one smoothed class probability, kept as an exact fraction.
struct LaplaceEstimate {
  int numerator = 0;
  int denominator = 0;
  double value = 0.0;
};

/// (count(target) + 1) / (total + k). An empty distribution gives 1/k.
LaplaceEstimate laplace_estimate(const ClassDistribution& dist, int target_class, int k);

/// Per-feature minimum, ordered like the tree's features.
using FeatureValues = std::vector<std::pair<std::string, double>>;

struct DecisionPath {
  std::vector<PathCondition> conditions;  // root first
  ClassDistribution node_distribution;
  int node_id = 0;
  bool is_leaf = false;
  int target_class = 1;
  LaplaceEstimate laplace;
  FeatureValues floors;
  std::optional<double> score_floor;

  int level() const { return static_cast<int>(conditions.size()); }
};

/// One path per leaf plus the prefix path of every internal non-root node,
/// in preorder. Each path targets its node's majority class; floors are
/// left empty (they need data, see path_floor_constraints).
std::vector<DecisionPath> enumerate_paths(const DecisionTree& tree);
std::vector<DecisionPath> leaf_paths(const DecisionTree& tree);

/// Tightest bounds per feature implied by a condition list.
struct FeatureBounds {
  std::string feature;
  std::optional<double> lower;  // strict: value > lower
  std::optional<double> upper;  // value <= upper
};
std::vector<FeatureBounds> tighten(std::span<const PathCondition> conditions,
                                   std::span<const std::string> feature_order);

/// Rows of `dataset` satisfying every condition.
std::vector<std::size_t> filter_rows(const LabeledDataset& dataset, std::span<const PathCondition> conditions);

struct FloorConstraints {
  FeatureValues floors;
  double score_floor = 0.0;
};

/// Floors are minima over target-class records satisfying the path, for
/// every feature without a GT condition. score_floor is the minimum
/// perception-free score over all target-class records. Throws NoSupport
/// when no target-class record satisfies the path.
FloorConstraints path_floor_constraints(const LabeledDataset& dataset,
                                        std::span<const PathCondition> conditions, int target_class,
                                        std::span<const std::string> features = primary_features());

/// Minimum perception-free score per class (index 0 = class 1).
std::vector<double> class_score_floors(const LabeledDataset& dataset);

struct LevelRow {
  int level = 0;
  std::vector<PathCondition> conditions;
  ClassDistribution distribution;
  LaplaceEstimate laplace;
  FeatureValues floors;
};

/// Laplace estimate and floors for each prefix 1..L of a path, counting
/// matches in the full dataset.
std::vector<LevelRow> level_table(const LabeledDataset& dataset, const DecisionPath& path, int target_class,
                                  std::span<const std::string> features = primary_features());

/// Requirement on one feature for a subject to follow a path. When
/// `strict`, the value must exceed `required`; otherwise reach it.
struct FeatureGap {
  std::string feature;
  double current = 0.0;
  double required = 0.0;
  bool strict = false;
  double gap = 0.0;
  std::optional<double> percent_change;
  std::optional<double> ceiling;
  bool above_ceiling = false;
};

struct PathStrategy {
  DecisionPath path;
  std::vector<LevelRow> levels;
  std::vector<FeatureGap> gaps;        // empty without a subject
  FeatureValues recommendation;        // midpoint of floor and LE bound
};

struct StrategyReport {
  int target_class = 1;
  std::optional<std::map<std::string, double>> subject;
  std::vector<PathStrategy> paths;  // Laplace descending, then leaf size
};

/// Throws NoPath when no leaf predicts `target_class`.
StrategyReport strategy_report(const DecisionTree& tree, const LabeledDataset& dataset, int target_class,
                               const std::optional<std::map<std::string, double>>& subject = std::nullopt);

struct WhatIfResult {
  int predicted_class = 0;
  int leaf_id = 0;
  std::vector<PathCondition> conditions;
  ClassDistribution leaf_distribution;
  LaplaceEstimate laplace;
  double score = 0.0;
  double class_score_floor = 0.0;
  bool below_score_floor = false;
};

/// Routes a candidate (TLR, RPC, GO, OI in [0,100]) through the tree and
/// checks its perception-free score against the predicted class's floor.
/// Throws DataError / MissingParameter.
WhatIfResult what_if(const DecisionTree& tree, std::span<const double> score_floors,
                     const std::map<std::string, double>& candidate);
WhatIfResult what_if(const DecisionTree& tree, const LabeledDataset& dataset,
                     const std::map<std::string, double>& candidate);

struct ThresholdPredicate {
  std::string feature;
  double threshold = 0.0;
};

/// Binary tree over sub-parameter columns: class 1 = feature >= threshold,
/// class 2 = below. Throws SchemaError for missing columns.
DecisionTree subparameter_tree(const LabeledDataset& subdata, std::span<const std::string> sub_features,
                               const ThresholdPredicate& predicate, const TreeParams& params = {});

/// Parses "TLR=60,RPC=25,GO=60,OI=50". Throws ParseError.
std::map<std::string, double> parse_feature_vector(std::string_view text);

Json to_json(const LaplaceEstimate& laplace);
Json to_json(const PathCondition& condition);
Json to_json(const DecisionPath& path);
Json to_json(const PathStrategy& strategy);
Json to_json(const StrategyReport& report);
Json to_json(const WhatIfResult& result);

/// Markdown with one level-wise table per path.
std::string render_report_markdown(const StrategyReport& report);

}  // namespace rankstrat

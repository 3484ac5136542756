#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankstrat/core.hpp"
#include "rankstrat/io.hpp"

namespace rankstrat {

/// Per-class sample counts; index 0 holds class 1.
struct ClassDistribution {
  std::vector<int> counts;

  ClassDistribution() = default;
  explicit ClassDistribution(int num_classes) : counts(static_cast<std::size_t>(num_classes), 0) {}
  explicit ClassDistribution(std::vector<int> c) : counts(std::move(c)) {}

  int num_classes() const { return static_cast<int>(counts.size()); }
  int total() const;
  int count(int cls) const { return counts.at(static_cast<std::size_t>(cls - 1)); }
  void add(int cls) { ++counts.at(static_cast<std::size_t>(cls - 1)); }
  /// Class with the largest count; ties go to the lower class index.
  int majority_class() const;
  bool is_pure() const;

  ClassDistribution& operator+=(const ClassDistribution& other);
  friend ClassDistribution operator+(ClassDistribution a, const ClassDistribution& b) { return a += b; }
  bool operator==(const ClassDistribution&) const = default;
};

/// 1 - sum(p_i^2). Throws DegenerateInput for an empty distribution.
double gini_impurity(const ClassDistribution& dist);
/// sum(-p_i log2 p_i), bounded by log2(k). Throws DegenerateInput when empty.
double entropy(const ClassDistribution& dist);

enum class SplitCriterion { GiniImpurity, InformationGain };

std::string_view to_string(SplitCriterion criterion);
/// "gini" or "ig"; throws ConfigError otherwise.
SplitCriterion parse_criterion(std::string_view name);

double impurity(const ClassDistribution& dist, SplitCriterion criterion);

/// Class distribution of a subset of rows.
ClassDistribution distribution_of(const TrainingSet& data, std::span<const std::size_t> rows);

/// Parent impurity minus the sample-weighted sum of child impurities, with
/// children split at `value <= threshold` / `value > threshold`. Both
/// criteria combine children by weighted sum. Throws InvalidSplit when a
/// child would be empty.
double split_quality(const TrainingSet& data, std::span<const std::size_t> rows, std::size_t feature,
                     double threshold, SplitCriterion criterion);

/// Midpoints between consecutive distinct sorted values.
std::vector<double> candidate_thresholds(std::span<const double> values);

/// Gains closer than this are treated as ties.
inline constexpr double kGainTieEpsilon = 1e-12;

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

/// Best (feature, threshold) by gain among `features` (column indices).
/// Ties go to the earlier feature in `features`, then the smaller threshold.
/// Candidates leaving fewer than `min_leaf` rows in a child are skipped.
/// Returns std::nullopt when no candidate has positive gain.
std::optional<Split> best_split(const TrainingSet& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> features, SplitCriterion criterion,
                                int min_leaf = 1);

/// One node of a tree stored in a flat arena. A node is a leaf iff
/// `left < 0`. Level is 1 at the root and grows by one per edge.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  ClassDistribution distribution;
  int level = 1;

  bool is_leaf() const { return left < 0; }
  int predicted_class() const { return distribution.majority_class(); }
};

struct TreeParams {
  SplitCriterion criterion = SplitCriterion::InformationGain;
  /// Maximum number of decision levels along any root-to-leaf path.
  int max_depth = 5;
  int min_leaf = 1;
};

class DecisionTree {
 public:
  DecisionTree(std::vector<std::string> feature_names, int num_classes, TreeParams params,
               std::vector<TreeNode> nodes);

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  int num_classes() const { return num_classes_; }
  const TreeParams& params() const { return params_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }
  const TreeNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }

  std::size_t leaf_count() const;
  /// Deepest node level (a single-leaf tree has depth 1).
  int depth() const;

  /// Node ids visited from the root to a leaf; `values` is in
  /// feature_names() order. Equal-to-threshold goes left.
  std::vector<int> route(std::span<const double> values) const;
  int predict(std::span<const double> values) const;
  /// Named-feature form; throws MissingParameter if a feature used by any
  /// decision node is absent.
  int predict(const std::map<std::string, double>& values) const;
  std::vector<double> vector_from(const std::map<std::string, double>& values) const;

  bool operator==(const DecisionTree&) const;

 private:
  std::vector<std::string> feature_names_;
  int num_classes_;
  TreeParams params_;
  std::vector<TreeNode> nodes_;
};

bool operator==(const TreeNode& a, const TreeNode& b);

/// Recursive top-down induction. A node becomes a leaf when pure, at
/// `max_depth` decision levels, with fewer than 2*min_leaf rows, or when no
/// split has positive gain. Throws DegenerateInput for empty data and
/// ConfigError for bad parameters.
DecisionTree build_tree(const TrainingSet& data, const TreeParams& params = {});

/// Nested JSON: decision nodes {feature, threshold, distribution, left,
/// right}; leaves {leaf, predicted}.
Json tree_to_json(const DecisionTree& tree);
/// Parses tree_to_json output back. Throws SchemaError.
DecisionTree tree_from_json(const Json& j);

/// Node-link diagram with per-node class distribution bars.
std::string render_tree(const DecisionTree& tree);

}  // namespace rankstrat

#include "rankstrat/dtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rankstrat/errors.hpp"

namespace rankstrat {

int ClassDistribution::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

int ClassDistribution::majority_class() const {
  if (counts.empty()) return 1;
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin()) + 1;
}

bool ClassDistribution::is_pure() const {
  return std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) <= 1;
}

ClassDistribution& ClassDistribution::operator+=(const ClassDistribution& other) {
  if (counts.size() < other.counts.size()) counts.resize(other.counts.size(), 0);
  for (std::size_t i = 0; i < other.counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

double gini_impurity(const ClassDistribution& dist) {
  const int total = dist.total();
  if (total <= 0) throw DegenerateInput("gini impurity of an empty distribution");
  double sum_sq = 0.0;
  for (int c : dist.counts) {
    const double p = static_cast<double>(c) / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double entropy(const ClassDistribution& dist) {
  const int total = dist.total();
  if (total <= 0) throw DegenerateInput("entropy of an empty distribution");
  double h = 0.0;
  for (int c : dist.counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

std::string_view to_string(SplitCriterion criterion) {
  return criterion == SplitCriterion::GiniImpurity ? "gini" : "ig";
}

SplitCriterion parse_criterion(std::string_view name) {
  const std::string key = canonical_feature(name);
  if (key == "GINI") return SplitCriterion::GiniImpurity;
  if (key == "IG" || key == "ENTROPY") return SplitCriterion::InformationGain;
  throw ConfigError("unknown split criterion '" + std::string(name) + "' (expected gini or ig)");
}

double impurity(const ClassDistribution& dist, SplitCriterion criterion) {
  return criterion == SplitCriterion::GiniImpurity ? gini_impurity(dist) : entropy(dist);
}

ClassDistribution distribution_of(const TrainingSet& data, std::span<const std::size_t> rows) {
  ClassDistribution dist(data.num_classes);
  for (std::size_t r : rows) dist.add(data.labels[r]);
  return dist;
}

namespace {

double midpoint(double a, double b) {
  const double mid = a + (b - a) / 2.0;
  // Adjacent doubles have no midpoint; `a` still separates under <=.
  return mid < b ? mid : a;
}

double weighted_children(const ClassDistribution& left, const ClassDistribution& right,
                         SplitCriterion criterion) {
  const double nl = left.total();
  const double nr = right.total();
  const double n = nl + nr;
  return nl / n * impurity(left, criterion) + nr / n * impurity(right, criterion);
}

}  // namespace

double split_quality(const TrainingSet& data, std::span<const std::size_t> rows, std::size_t feature,
                     double threshold, SplitCriterion criterion) {
  if (rows.empty()) throw InvalidSplit("split of an empty subset");
  ClassDistribution left(data.num_classes), right(data.num_classes);
  for (std::size_t r : rows) {
    if (data.rows[r][feature] <= threshold) left.add(data.labels[r]);
    else right.add(data.labels[r]);
  }
  if (left.total() == 0 || right.total() == 0) {
    throw InvalidSplit("threshold " + std::to_string(threshold) + " on " +
                       data.feature_names.at(feature) + " leaves a child empty");
  }
  return impurity(left + right, criterion) - weighted_children(left, right, criterion);
}

std::vector<double> candidate_thresholds(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] != sorted[i - 1]) out.push_back(midpoint(sorted[i - 1], sorted[i]));
  }
  return out;
}

std::optional<Split> best_split(const TrainingSet& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> features, SplitCriterion criterion,
                                int min_leaf) {
  if (rows.size() < 2) return std::nullopt;
  const ClassDistribution parent = distribution_of(data, rows);
  if (parent.is_pure()) return std::nullopt;
  const double parent_impurity = impurity(parent, criterion);
  const std::size_t n = rows.size();
  const std::size_t min_child = static_cast<std::size_t>(std::max(1, min_leaf));

  std::optional<Split> best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t feature : features) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return data.rows[a][feature] < data.rows[b][feature];
    });
    ClassDistribution left(data.num_classes);
    ClassDistribution right = parent;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const int label = data.labels[order[i]];
      left.add(label);
      --right.counts[static_cast<std::size_t>(label - 1)];
      const double here = data.rows[order[i]][feature];
      const double next = data.rows[order[i + 1]][feature];
      if (here == next) continue;
      if (i + 1 < min_child || n - i - 1 < min_child) continue;
      const double gain = parent_impurity - weighted_children(left, right, criterion);
      const bool better = best ? gain > best->gain + kGainTieEpsilon : gain > kGainTieEpsilon;
      if (better) best = Split{feature, midpoint(here, next), gain};
    }
  }
  return best;
}

DecisionTree::DecisionTree(std::vector<std::string> feature_names, int num_classes, TreeParams params,
                           std::vector<TreeNode> nodes)
    : feature_names_(std::move(feature_names)),
      num_classes_(num_classes),
      params_(params),
      nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw SchemaError("decision tree has no nodes");
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int DecisionTree::depth() const {
  int deepest = 0;
  for (const auto& n : nodes_) {
    if (!n.is_leaf()) deepest = std::max(deepest, n.level);
  }
  return deepest;
}

std::vector<int> DecisionTree::route(std::span<const double> values) const {
  if (values.size() != feature_names_.size()) {
    throw DimensionError("expected " + std::to_string(feature_names_.size()) + " feature values, got " +
                         std::to_string(values.size()));
  }
  std::vector<int> path{0};
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    const double v = values[static_cast<std::size_t>(node->feature)];
    const int next = v <= node->threshold ? node->left : node->right;
    path.push_back(next);
    node = &nodes_[static_cast<std::size_t>(next)];
  }
  return path;
}

int DecisionTree::predict(std::span<const double> values) const {
  return node(route(values).back()).predicted_class();
}

std::vector<double> DecisionTree::vector_from(const std::map<std::string, double>& values) const {
  std::map<std::string, double> canonical;
  for (const auto& [k, v] : values) canonical[canonical_feature(k)] = v;
  std::vector<bool> used(feature_names_.size(), false);
  for (const auto& n : nodes_) {
    if (!n.is_leaf()) used[static_cast<std::size_t>(n.feature)] = true;
  }
  std::vector<double> out(feature_names_.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < feature_names_.size(); ++i) {
    auto it = canonical.find(feature_names_[i]);
    if (it != canonical.end()) {
      out[i] = it->second;
    } else if (used[i]) {
      throw MissingParameter("feature " + feature_names_[i] + " required by the tree is missing");
    }
  }
  return out;
}

int DecisionTree::predict(const std::map<std::string, double>& values) const {
  return predict(vector_from(values));
}

bool operator==(const TreeNode& a, const TreeNode& b) {
  return a.feature == b.feature && a.threshold == b.threshold && a.left == b.left &&
         a.right == b.right && a.distribution == b.distribution && a.level == b.level;
}

bool DecisionTree::operator==(const DecisionTree& other) const {
  return feature_names_ == other.feature_names_ && num_classes_ == other.num_classes_ &&
         params_.criterion == other.params_.criterion && params_.max_depth == other.params_.max_depth &&
         params_.min_leaf == other.params_.min_leaf && nodes_ == other.nodes_;
}

namespace {

class Builder {
 public:
  Builder(const TrainingSet& data, const TreeParams& params) : data_(data), params_(params) {
    features_.resize(data.feature_names.size());
    std::iota(features_.begin(), features_.end(), 0);
  }

  // Preorder: a node's id is always smaller than its descendants'.
  int grow(std::vector<std::size_t> rows, int level) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{});
    nodes_[static_cast<std::size_t>(id)].distribution = distribution_of(data_, rows);
    nodes_[static_cast<std::size_t>(id)].level = level;

    const auto& dist = nodes_[static_cast<std::size_t>(id)].distribution;
    const bool can_split = !dist.is_pure() && level <= params_.max_depth &&
                           rows.size() >= 2 * static_cast<std::size_t>(params_.min_leaf);
    if (!can_split) return id;
    const auto split = best_split(data_, rows, features_, params_.criterion, params_.min_leaf);
    if (!split) return id;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
      (data_.rows[r][split->feature] <= split->threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int left = grow(std::move(left_rows), level + 1);
    const int right = grow(std::move(right_rows), level + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = static_cast<int>(split->feature);
    node.threshold = split->threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  std::vector<TreeNode> take() { return std::move(nodes_); }

 private:
  const TrainingSet& data_;
  const TreeParams& params_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree build_tree(const TrainingSet& data, const TreeParams& params) {
  if (data.size() == 0) throw DegenerateInput("cannot build a tree from an empty dataset");
  if (params.max_depth < 1) throw ConfigError("max_depth must be at least 1");
  if (params.min_leaf < 1) throw ConfigError("min_leaf must be at least 1");
  if (data.num_classes < 2) throw ConfigError("need at least 2 classes");
  if (data.labels.size() != data.rows.size()) throw DimensionError("labels and rows differ in length");
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    if (data.rows[i].size() != data.feature_names.size()) {
      throw DimensionError("row " + std::to_string(i) + " has the wrong number of features");
    }
    if (data.labels[i] < 1 || data.labels[i] > data.num_classes) {
      throw DataError("label " + std::to_string(data.labels[i]) + " outside 1.." +
                      std::to_string(data.num_classes));
    }
  }
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  Builder builder(data, params);
  builder.grow(std::move(rows), 1);
  return DecisionTree(data.feature_names, data.num_classes, params, builder.take());
}

namespace {

Json node_to_json(const DecisionTree& tree, int id) {
  const TreeNode& n = tree.node(id);
  Json j;
  if (n.is_leaf()) {
    j["leaf"] = n.distribution.counts;
    j["predicted"] = n.predicted_class();
  } else {
    j["feature"] = tree.feature_names()[static_cast<std::size_t>(n.feature)];
    j["threshold"] = n.threshold;
    j["distribution"] = n.distribution.counts;
    j["left"] = node_to_json(tree, n.left);
    j["right"] = node_to_json(tree, n.right);
  }
  j["id"] = id;
  return j;
}

int node_from_json(const Json& j, const std::vector<std::string>& features, int level,
                   std::vector<TreeNode>& nodes) {
  if (!j.is_object()) throw SchemaError("tree node must be an object");
  const int id = static_cast<int>(nodes.size());
  nodes.push_back(TreeNode{});
  nodes.back().level = level;
  try {
    if (j.contains("leaf")) {
      nodes[static_cast<std::size_t>(id)].distribution =
          ClassDistribution(j.at("leaf").get<std::vector<int>>());
      return id;
    }
    const std::string name = canonical_feature(j.at("feature").get<std::string>());
    auto it = std::find(features.begin(), features.end(), name);
    if (it == features.end()) throw SchemaError("tree node uses unknown feature '" + name + "'");
    const double threshold = j.at("threshold").get<double>();
    auto dist = ClassDistribution(j.at("distribution").get<std::vector<int>>());
    const int left = node_from_json(j.at("left"), features, level + 1, nodes);
    const int right = node_from_json(j.at("right"), features, level + 1, nodes);
    auto& node = nodes[static_cast<std::size_t>(id)];
    node.feature = static_cast<int>(it - features.begin());
    node.threshold = threshold;
    node.distribution = std::move(dist);
    node.left = left;
    node.right = right;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed tree node: ") + e.what());
  }
  return id;
}

}  // namespace

Json tree_to_json(const DecisionTree& tree) {
  Json j;
  j["criterion"] = std::string(to_string(tree.params().criterion));
  j["max_depth"] = tree.params().max_depth;
  j["min_leaf"] = tree.params().min_leaf;
  j["num_classes"] = tree.num_classes();
  j["features"] = tree.feature_names();
  j["root"] = node_to_json(tree, 0);
  return j;
}

DecisionTree tree_from_json(const Json& j) {
  try {
    TreeParams params;
    params.criterion = parse_criterion(j.at("criterion").get<std::string>());
    params.max_depth = j.at("max_depth").get<int>();
    params.min_leaf = j.at("min_leaf").get<int>();
    const int num_classes = j.at("num_classes").get<int>();
    std::vector<std::string> features;
    for (const auto& f : j.at("features")) features.push_back(canonical_feature(f.get<std::string>()));
    std::vector<TreeNode> nodes;
    node_from_json(j.at("root"), features, 1, nodes);
    for (const auto& n : nodes) {
      if (n.distribution.num_classes() != num_classes) {
        throw SchemaError("node distribution length differs from num_classes");
      }
    }
    return DecisionTree(std::move(features), num_classes, params, std::move(nodes));
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed tree: ") + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("malformed tree: ") + e.what());
  }
}

}  // namespace rankstrat

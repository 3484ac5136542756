#include "rankstrat/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankstrat/errors.hpp"

namespace rankstrat {

long ConfusionMatrix::total() const {
  long n = 0;
  for (const auto& row : counts) n = std::accumulate(row.begin(), row.end(), n);
  return n;
}

std::vector<long> ConfusionMatrix::row_marginals() const {
  std::vector<long> out;
  for (const auto& row : counts) out.push_back(std::accumulate(row.begin(), row.end(), 0L));
  return out;
}

std::vector<long> ConfusionMatrix::column_marginals() const {
  std::vector<long> out(counts.size(), 0);
  for (const auto& row : counts) {
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
  }
  return out;
}

bool ConfusionMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      if (i != j && counts[i][j] != 0) return false;
    }
  }
  return true;
}

ConfusionMatrix confusion_matrix(std::span<const int> actual, std::span<const int> predicted, int k) {
  if (actual.size() != predicted.size()) {
    throw DimensionError("actual and predicted differ in length (" + std::to_string(actual.size()) +
                         " vs " + std::to_string(predicted.size()) + ")");
  }
  if (actual.empty()) throw DimensionError("confusion matrix needs at least one observation");
  if (k < 1) throw ConfigError("number of classes must be positive");
  ConfusionMatrix cm;
  cm.counts.assign(static_cast<std::size_t>(k), std::vector<long>(static_cast<std::size_t>(k), 0));
  for (std::size_t i = 0; i < actual.size(); ++i) {
    for (int label : {actual[i], predicted[i]}) {
      if (label < 1 || label > k) {
        throw DataError("label " + std::to_string(label) + " outside 1.." + std::to_string(k));
      }
    }
    ++cm.counts[static_cast<std::size_t>(actual[i] - 1)][static_cast<std::size_t>(predicted[i] - 1)];
  }
  return cm;
}

Matrix weight_matrix(int k) {
  if (k < 2) throw ConfigError("weight matrix needs at least 2 classes");
  const double denom = static_cast<double>(k - 1) * (k - 1);
  Matrix w(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k)));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<double>((i - j) * (i - j)) / denom;
    }
  }
  return w;
}

Matrix expected_matrix(const ConfusionMatrix& cm) {
  const double n = static_cast<double>(cm.total());
  if (n <= 0) throw DegenerateInput("expected matrix of an empty confusion matrix");
  const auto rows = cm.row_marginals();
  const auto cols = cm.column_marginals();
  Matrix m(rows.size(), std::vector<double>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      m[i][j] = static_cast<double>(rows[i]) * static_cast<double>(cols[j]) / n;
    }
  }
  return m;
}

double quadratic_weighted_kappa(const ConfusionMatrix& cm, const Matrix& weights) {
  const std::size_t k = cm.counts.size();
  if (weights.size() != k) throw DimensionError("weight matrix size differs from confusion matrix");
  const Matrix expected = expected_matrix(cm);
  double observed_disagreement = 0.0;
  double chance_disagreement = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      observed_disagreement += weights[i][j] * static_cast<double>(cm.counts[i][j]);
      chance_disagreement += weights[i][j] * expected[i][j];
    }
  }
  if (chance_disagreement == 0.0) {
    throw DegenerateInput("kappa undefined: all mass in a single class");
  }
  return 1.0 - observed_disagreement / chance_disagreement;
}

double quadratic_weighted_kappa(const ConfusionMatrix& cm) {
  return quadratic_weighted_kappa(cm, weight_matrix(cm.num_classes()));
}

double accuracy(const ConfusionMatrix& cm) {
  const long n = cm.total();
  if (n <= 0) throw DegenerateInput("accuracy of an empty confusion matrix");
  long trace = 0;
  for (std::size_t i = 0; i < cm.counts.size(); ++i) trace += cm.counts[i][i];
  return static_cast<double>(trace) / static_cast<double>(n);
}

std::string kappa_band(double kappa) {
  if (kappa <= 0.4) return "poor";
  if (kappa < 0.75) return "fair";
  return "excellent";
}

KappaReport kappa_report(const ConfusionMatrix& cm) {
  KappaReport r;
  r.confusion = cm;
  r.weights = weight_matrix(cm.num_classes());
  r.expected = expected_matrix(cm);
  r.kappa = quadratic_weighted_kappa(cm, r.weights);
  r.accuracy = accuracy(cm);
  r.band = kappa_band(r.kappa);
  return r;
}

namespace {

std::vector<int> predict_all(const DecisionTree& tree, const TrainingSet& test) {
  std::vector<std::size_t> columns;
  for (const auto& name : tree.feature_names()) {
    auto idx = test.feature_index(name);
    if (!idx) throw MissingParameter("test data lacks feature " + name);
    columns.push_back(*idx);
  }
  std::vector<int> predicted;
  predicted.reserve(test.size());
  std::vector<double> v(columns.size());
  for (const auto& row : test.rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) v[i] = row[columns[i]];
    predicted.push_back(tree.predict(v));
  }
  return predicted;
}

}  // namespace

KappaReport evaluate(const DecisionTree& tree, const TrainingSet& test) {
  const auto predicted = predict_all(tree, test);
  return kappa_report(confusion_matrix(test.labels, predicted, tree.num_classes()));
}

std::vector<SweepPoint> depth_sweep(const TrainingSet& train, const TrainingSet& test,
                                    SplitCriterion criterion, std::span<const int> depths,
                                    int min_leaf) {
  if (depths.empty()) throw ConfigError("depth sweep needs at least one depth");
  std::vector<int> ordered(depths.begin(), depths.end());
  std::stable_sort(ordered.begin(), ordered.end());
  std::vector<SweepPoint> out;
  for (int depth : ordered) {
    if (depth < 1) throw ConfigError("depths must be at least 1");
    const auto tree = build_tree(train, TreeParams{criterion, depth, min_leaf});
    const auto report = evaluate(tree, test);
    out.push_back({depth, report.kappa, report.accuracy});
  }
  return out;
}

std::vector<SweepPoint> depth_sweep(const LabeledDataset& train, const LabeledDataset& test,
                                    SplitCriterion criterion, std::span<const int> depths,
                                    int min_leaf) {
  return depth_sweep(train.training_set(), test.training_set(), criterion, depths, min_leaf);
}

namespace {

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (const auto& row : m) rows.push_back(row);
  return rows;
}

}  // namespace

Json to_json(const KappaReport& report) {
  Json j;
  Json confusion = Json::array();
  for (const auto& row : report.confusion.counts) confusion.push_back(row);
  j["confusion"] = std::move(confusion);
  j["weights"] = matrix_json(report.weights);
  j["expected"] = matrix_json(report.expected);
  j["kappa"] = report.kappa;
  j["accuracy"] = report.accuracy;
  j["band"] = report.band;
  return j;
}

std::string sweep_to_csv(std::span<const SweepPoint> sweep) {
  std::string out = "depth,kappa,accuracy\n";
  for (const auto& p : sweep) {
    Json row = Json::array({p.depth, p.kappa, p.accuracy});
    std::string line = dump_json(row, -1);
    out += line.substr(1, line.size() - 2) + "\n";
  }
  return out;
}

}  // namespace rankstrat

#pragma once

#include <span>
#include <string>
#include <vector>

#include "rankstrat/core.hpp"
#include "rankstrat/dtree.hpp"
#include "rankstrat/io.hpp"

namespace rankstrat {

using Matrix = std::vector<std::vector<double>>;

/// Rows are actual classes, columns predicted classes (both 1-based labels,
/// stored 0-based).
struct ConfusionMatrix {
  std::vector<std::vector<long>> counts;

  int num_classes() const { return static_cast<int>(counts.size()); }
  long total() const;
  std::vector<long> row_marginals() const;
  std::vector<long> column_marginals() const;
  bool is_diagonal() const;
};

/// Throws DimensionError for unequal or empty inputs and DataError for a
/// label outside 1..k.
ConfusionMatrix confusion_matrix(std::span<const int> actual, std::span<const int> predicted, int k);

/// w_ij = (i - j)^2 / (k - 1)^2. Throws ConfigError for k < 2.
Matrix weight_matrix(int k);

/// Chance-agreement table m_ij = row_i * col_j / n. Throws DegenerateInput
/// when n = 0.
Matrix expected_matrix(const ConfusionMatrix& cm);

/// kappa = 1 - sum(w*x) / sum(w*m). Throws DegenerateInput when the
/// denominator is zero.
double quadratic_weighted_kappa(const ConfusionMatrix& cm);
double quadratic_weighted_kappa(const ConfusionMatrix& cm, const Matrix& weights);

/// Trace / n. Throws DegenerateInput when n = 0.
double accuracy(const ConfusionMatrix& cm);

/// "poor" (<= 0.4), "fair" (0.4, 0.75) or "excellent" (>= 0.75).
std::string kappa_band(double kappa);

struct KappaReport {
  ConfusionMatrix confusion;
  Matrix weights;
  Matrix expected;
  double kappa = 0.0;
  double accuracy = 0.0;
  std::string band;
};

KappaReport kappa_report(const ConfusionMatrix& cm);

/// Predicts every row of `test` (matching features by name) and scores
/// against its labels.
KappaReport evaluate(const DecisionTree& tree, const TrainingSet& test);

struct SweepPoint {
  int depth = 0;
  double kappa = 0.0;
  double accuracy = 0.0;
};

/// One tree per depth cap, trained on `train`, scored on `test`, ordered
/// by depth. Throws ConfigError for an empty list or a depth < 1.
std::vector<SweepPoint> depth_sweep(const TrainingSet& train, const TrainingSet& test,
                                    SplitCriterion criterion, std::span<const int> depths,
                                    int min_leaf = 1);
/// Same over the four primary parameters of two labeled years.
std::vector<SweepPoint> depth_sweep(const LabeledDataset& train, const LabeledDataset& test,
                                    SplitCriterion criterion, std::span<const int> depths,
                                    int min_leaf = 1);

Json to_json(const KappaReport& report);
/// "depth,kappa,accuracy" rows, 6-decimal numbers.
std::string sweep_to_csv(std::span<const SweepPoint> sweep);

}  // namespace rankstrat

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rankstrat {

/// The four parameters used for tree induction, in tie-break order.
inline const std::vector<std::string>& primary_features() {
  static const std::vector<std::string> kFeatures{"TLR", "RPC", "GO", "OI"};
  return kFeatures;
}

/// Upper-cased, whitespace-trimmed feature name; lookups are case-insensitive.
std::string canonical_feature(std::string_view name);

/// One institution-year row of a ranking table.
struct InstituteRecord {
  std::string institute_id;
  std::string name;
  int year = 0;
  int rank = 0;
  double tlr = 0.0;
  double rpc = 0.0;
  double go = 0.0;
  double oi = 0.0;
  std::optional<double> pr;
  std::optional<double> reported_score;
  /// Additional numeric columns (sub-parameters), keyed by canonical name,
  /// in input column order.
  std::vector<std::pair<std::string, double>> extras;

  /// Value of a named parameter or extra column; std::nullopt when absent.
  /// "SCORE" resolves to reported_score.
  std::optional<double> feature(std::string_view name) const;

  bool operator==(const InstituteRecord&) const = default;
};

struct ScoreWeights {
  double tlr = 0.3;
  double rpc = 0.3;
  double go = 0.2;
  double oi = 0.1;
  double pr = 0.1;

  static ScoreWeights full() { return {}; }
  /// Perception dropped, other weights unchanged (sum 0.9, not renormalized).
  static ScoreWeights no_perception() { return {0.3, 0.3, 0.2, 0.1, 0.0}; }
  /// "full" or "no-perception"; anything else throws ConfigError.
  static ScoreWeights from_profile(std::string_view profile);

  double sum() const { return tlr + rpc + go + oi + pr; }
  std::string profile_name() const;

  bool operator==(const ScoreWeights&) const = default;
};

/// Weighted sum of the parameter scores. Throws MissingParameter("PR") when
/// the weights need perception and the record has none.
double composite_score(const InstituteRecord& record, const ScoreWeights& weights);

struct RankRange {
  int first = 0;
  int last = 0;
  bool operator==(const RankRange&) const = default;
};

struct ClassConfig {
  int num_classes = 4;
  int class_size = 25;
  std::vector<RankRange> boundaries;

  /// Equal-width contiguous classes over ranks 1..total. Throws ConfigError
  /// unless num_classes >= 2 and divides total.
  static ClassConfig equal_bands(int total, int num_classes = 4);

  int total() const { return num_classes * class_size; }
  /// Class (1-based) of a rank, ceil(rank / class_size).
  int class_of_rank(int rank) const;
};

/// Class label per record; `records` must be sorted by rank and cover
/// 1..N exactly once. Throws ConfigError / DataError.
std::vector<int> assign_classes(std::span<const InstituteRecord> records, const ClassConfig& config);

/// Feature matrix plus 1-based class labels; the input to tree induction.
struct TrainingSet {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return rows.size(); }
  /// Column index of a feature, or std::nullopt.
  std::optional<std::size_t> feature_index(std::string_view name) const;
};

/// Records sorted by rank with quartile-style class labels. Immutable.
class LabeledDataset {
 public:
  /// Sorts by rank, validates scores and rank coverage, assigns classes.
  static LabeledDataset create(std::vector<InstituteRecord> records, ScoreWeights weights,
                               int num_classes = 4);

  const std::vector<InstituteRecord>& records() const { return records_; }
  const std::vector<int>& labels() const { return labels_; }
  const ScoreWeights& weights() const { return weights_; }
  const ClassConfig& config() const { return config_; }
  const std::vector<std::string>& feature_order() const { return primary_features(); }
  std::size_t size() const { return records_.size(); }
  int year() const { return records_.empty() ? 0 : records_.front().year; }

  /// Column of a named feature across all records. Throws MissingParameter
  /// naming the feature and the first record lacking it.
  std::vector<double> column(std::string_view feature) const;
  /// Composite score of every record under `weights`.
  std::vector<double> scores(const ScoreWeights& weights) const;

  TrainingSet training_set(std::span<const std::string> features) const;
  TrainingSet training_set() const { return training_set(primary_features()); }

 private:
  LabeledDataset() = default;

  std::vector<InstituteRecord> records_;
  std::vector<int> labels_;
  ScoreWeights weights_;
  ClassConfig config_;
};

}  // namespace rankstrat

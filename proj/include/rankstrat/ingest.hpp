#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rankstrat/core.hpp"

namespace rankstrat {

struct DatasetManifest {
  std::string path;
  int year = 0;
  std::string category = "engineering";
  std::string weight_profile = "no-perception";
  int num_classes = 4;

  /// Throws ConfigError for a non-positive year or unknown profile.
  void validate() const;
};

/// Published scores are printed to two decimals.
inline constexpr double kScoreTolerance = 0.005;

struct ScoreMismatch {
  std::string institute_id;
  double reported = 0.0;
  double recomputed = 0.0;
  double delta = 0.0;
};

struct RangeViolation {
  std::string institute_id;
  std::string field;
  double value = 0.0;
};

struct ValidationReport {
  std::size_t row_count = 0;
  std::vector<ScoreMismatch> score_mismatches;
  std::vector<RangeViolation> range_violations;
  std::vector<int> rank_gaps;
  std::vector<int> duplicate_ranks;
  /// Institutes whose reported score could not be recomputed (no score or
  /// missing perception under perception-weighted profiles).
  std::vector<std::string> unverifiable;
  /// False when the input carries no reported scores at all.
  bool verifiable = true;

  bool ok() const {
    return score_mismatches.empty() && range_violations.empty() && rank_gaps.empty() &&
           duplicate_ranks.empty();
  }
};

/// Lenient CSV parse: checks the header and cell syntax only. Rows keep
/// file order. Throws SchemaError / ParseError.
std::vector<InstituteRecord> parse_records(std::string_view csv, int year = 0);

/// Strict parse into a labeled dataset sorted by rank. Adds DataError for
/// out-of-range scores (naming line and field) and rank gaps.
LabeledDataset parse_dataset(const DatasetManifest& manifest, std::string_view csv);

/// Reads `manifest.path` and parses it. Throws IoError when unreadable.
LabeledDataset load_dataset(const DatasetManifest& manifest);

std::string read_file(const std::string& path);

/// CSV with the canonical header plus any extra columns; numbers are
/// written in shortest round-trip form so parse(serialize(d)) == d.
std::string serialize_dataset(const LabeledDataset& dataset);

ValidationReport validate_scores(const LabeledDataset& dataset,
                                 const ScoreWeights& weights = ScoreWeights::full(),
                                 double tolerance = kScoreTolerance);

/// Same checks over unvalidated records, also collecting range violations
/// and rank gaps instead of throwing.
ValidationReport validate_records(const std::vector<InstituteRecord>& records,
                                  const ScoreWeights& weights = ScoreWeights::full(),
                                  double tolerance = kScoreTolerance);

}  // namespace rankstrat

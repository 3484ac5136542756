#include "rankstrat/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "rankstrat/errors.hpp"

namespace rankstrat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingParameter: return "MissingParameter";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::DataError: return "DataError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::DimensionError: return "DimensionError";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::InvalidSplit: return "InvalidSplit";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NoSupport: return "NoSupport";
    case ErrorKind::NoPath: return "NoPath";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

void raise(ErrorKind kind, const std::string& message) {
  switch (kind) {
    case ErrorKind::MissingParameter: throw MissingParameter(message);
    case ErrorKind::ConfigError: throw ConfigError(message);
    case ErrorKind::DataError: throw DataError(message);
    case ErrorKind::SchemaError: throw SchemaError(message);
    case ErrorKind::DimensionError: throw DimensionError(message);
    case ErrorKind::DegenerateInput: throw DegenerateInput(message);
    case ErrorKind::InvalidSplit: throw InvalidSplit(message);
    case ErrorKind::EmptyInput: throw EmptyInput(message);
    case ErrorKind::NoSupport: throw NoSupport(message);
    case ErrorKind::NoPath: throw NoPath(message);
    case ErrorKind::IoError: throw IoError(message);
    case ErrorKind::ParseError: break;
  }
  throw Error(kind, message);
}

std::string canonical_feature(std::string_view name) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!name.empty() && is_space(name.front())) name.remove_prefix(1);
  while (!name.empty() && is_space(name.back())) name.remove_suffix(1);
  std::string out(name);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::optional<double> InstituteRecord::feature(std::string_view name) const {
  const std::string key = canonical_feature(name);
  if (key == "TLR") return tlr;
  if (key == "RPC") return rpc;
  if (key == "GO") return go;
  if (key == "OI") return oi;
  if (key == "PR") return pr;
  if (key == "SCORE") return reported_score;
  for (const auto& [extra_name, value] : extras) {
    if (extra_name == key) return value;
  }
  return std::nullopt;
}

ScoreWeights ScoreWeights::from_profile(std::string_view profile) {
  if (profile == "full") return full();
  if (profile == "no-perception") return no_perception();
  throw ConfigError("unknown weight profile '" + std::string(profile) +
                    "' (expected full or no-perception)");
}

std::string ScoreWeights::profile_name() const {
  if (*this == full()) return "full";
  if (*this == no_perception()) return "no-perception";
  return "custom";
}

double composite_score(const InstituteRecord& record, const ScoreWeights& weights) {
  double score = weights.tlr * record.tlr + weights.rpc * record.rpc + weights.go * record.go +
                 weights.oi * record.oi;
  if (weights.pr > 0.0) {
    if (!record.pr) {
      throw MissingParameter("PR required by score weights but absent for institute '" +
                             record.institute_id + "'");
    }
    score += weights.pr * *record.pr;
  }
  return score;
}

ClassConfig ClassConfig::equal_bands(int total, int num_classes) {
  if (num_classes < 2) throw ConfigError("number of classes must be at least 2");
  if (total <= 0 || total % num_classes != 0) {
    throw ConfigError(std::to_string(total) + " records cannot be divided into " +
                      std::to_string(num_classes) + " equal classes");
  }
  ClassConfig config;
  config.num_classes = num_classes;
  config.class_size = total / num_classes;
  for (int c = 0; c < num_classes; ++c) {
    config.boundaries.push_back({c * config.class_size + 1, (c + 1) * config.class_size});
  }
  return config;
}

int ClassConfig::class_of_rank(int rank) const {
  if (rank < 1 || rank > total()) {
    throw DataError("rank " + std::to_string(rank) + " outside 1.." + std::to_string(total()));
  }
  return (rank + class_size - 1) / class_size;
}

namespace {

// Ranks of rank-sorted records must run 1, 2, ..., N.
void check_rank_sequence(std::span<const InstituteRecord> records) {
  int expected = 1;
  for (const auto& record : records) {
    if (record.rank < expected) {
      throw DataError("duplicate rank " + std::to_string(record.rank));
    }
    if (record.rank > expected) {
      throw DataError("rank gap: rank " + std::to_string(expected) + " missing");
    }
    ++expected;
  }
}

}  // namespace

std::vector<int> assign_classes(std::span<const InstituteRecord> records, const ClassConfig& config) {
  check_rank_sequence(records);
  if (static_cast<int>(records.size()) != config.total()) {
    throw ConfigError("class configuration covers " + std::to_string(config.total()) +
                      " ranks but dataset has " + std::to_string(records.size()) + " records");
  }
  std::vector<int> labels;
  labels.reserve(records.size());
  for (const auto& record : records) labels.push_back(config.class_of_rank(record.rank));
  return labels;
}

std::optional<std::size_t> TrainingSet::feature_index(std::string_view name) const {
  const std::string key = canonical_feature(name);
  auto it = std::find(feature_names.begin(), feature_names.end(), key);
  if (it == feature_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names.begin());
}

namespace {

void check_score(const InstituteRecord& record, std::string_view field, double value) {
  if (!std::isfinite(value) || value < 0.0 || value > 100.0) {
    throw DataError("rank " + std::to_string(record.rank) + " ('" + record.institute_id +
                    "'): " + std::string(field) + " = " + std::to_string(value) +
                    " outside [0,100]");
  }
}

}  // namespace

LabeledDataset LabeledDataset::create(std::vector<InstituteRecord> records, ScoreWeights weights,
                                      int num_classes) {
  if (records.empty()) throw EmptyInput("dataset has no records");
  for (const auto& r : records) {
    check_score(r, "TLR", r.tlr);
    check_score(r, "RPC", r.rpc);
    check_score(r, "GO", r.go);
    check_score(r, "OI", r.oi);
    if (r.pr) check_score(r, "PR", *r.pr);
    if (r.reported_score) check_score(r, "SCORE", *r.reported_score);
    for (const auto& [name, value] : r.extras) check_score(r, name, value);
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.rank < b.rank; });

  check_rank_sequence(records);
  LabeledDataset ds;
  ds.config_ = ClassConfig::equal_bands(static_cast<int>(records.size()), num_classes);
  ds.labels_ = assign_classes(records, ds.config_);
  ds.records_ = std::move(records);
  ds.weights_ = weights;
  return ds;
}

std::vector<double> LabeledDataset::column(std::string_view feature) const {
  std::vector<double> values;
  values.reserve(records_.size());
  for (const auto& r : records_) {
    auto v = r.feature(feature);
    if (!v) {
      throw MissingParameter(canonical_feature(feature) + " absent for institute '" +
                             r.institute_id + "'");
    }
    values.push_back(*v);
  }
  return values;
}

std::vector<double> LabeledDataset::scores(const ScoreWeights& weights) const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(composite_score(r, weights));
  return out;
}

TrainingSet LabeledDataset::training_set(std::span<const std::string> features) const {
  TrainingSet set;
  set.num_classes = config_.num_classes;
  for (const auto& f : features) set.feature_names.push_back(canonical_feature(f));
  std::vector<std::vector<double>> columns;
  for (const auto& f : set.feature_names) columns.push_back(column(f));
  set.rows.assign(records_.size(), std::vector<double>(columns.size()));
  for (std::size_t i = 0; i < records_.size(); ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) set.rows[i][j] = columns[j][i];
  }
  set.labels = labels_;
  return set;
}

}  // namespace rankstrat

#include "rankstrat/eda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankstrat/errors.hpp"

namespace rankstrat {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j.
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionError("spearman inputs differ in length (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw DimensionError("spearman needs at least 2 observations");
}

bool has_ties(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

double median_sorted(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  return n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("spearman input has zero rank variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman_rho_distinct(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  if (has_ties(x) || has_ties(y)) throw DegenerateInput("closed-form spearman requires distinct values");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  double sum_d2 = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double d = rx[i] - ry[i];
    sum_d2 += d * d;
  }
  const double n = static_cast<double>(x.size());
  return 1.0 - 6.0 * sum_d2 / (n * (n * n - 1.0));
}

double CorrelationMatrix::at(std::string_view a, std::string_view b) const {
  auto find = [&](std::string_view name) {
    const std::string key = canonical_feature(name);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (canonical_feature(labels[i]) == key) return i;
    }
    throw MissingParameter("feature '" + std::string(name) + "' not in correlation matrix");
  };
  return values[find(a)][find(b)];
}

std::vector<double> eda_column(const LabeledDataset& dataset, std::string_view feature) {
  if (canonical_feature(feature) == "SCORE") {
    const auto& records = dataset.records();
    const bool all_reported = std::all_of(records.begin(), records.end(),
                                          [](const auto& r) { return r.reported_score.has_value(); });
    if (!all_reported) return dataset.scores(dataset.weights());
  }
  return dataset.column(feature);
}

CorrelationMatrix correlation_matrix(const LabeledDataset& dataset, std::span<const std::string> features) {
  CorrelationMatrix m;
  std::vector<std::vector<double>> columns;
  for (const auto& f : features) {
    m.labels.push_back(f);
    columns.push_back(eda_column(dataset, f));
  }
  const std::size_t k = features.size();
  m.values.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    m.values[i][i] = 1.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      double rho = 0.0;
      try {
        rho = spearman_rho(columns[i], columns[j]);
      } catch (const Error& e) {
        raise(e.kind(), "pair (" + features[i] + ", " + features[j] + "): " + e.what());
      }
      m.values[i][j] = rho;
      m.values[j][i] = rho;
    }
  }
  return m;
}

BoxStats boxplot_stats(std::span<const double> values) {
  if (values.size() < 4) throw DegenerateInput("box plot needs at least 4 values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const std::size_t half = n / 2;

  BoxStats s;
  s.count = n;
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = median_sorted(sorted);
  s.q1 = median_sorted(std::span<const double>(sorted).first(half));
  s.q3 = median_sorted(std::span<const double>(sorted).last(half));
  s.iqr = s.q3 - s.q1;
  const double low_fence = s.q1 - 1.5 * s.iqr;
  const double high_fence = s.q3 + 1.5 * s.iqr;
  s.whisker_low = s.median;
  s.whisker_high = s.median;
  bool have_low = false;
  for (double v : sorted) {
    if (v < low_fence || v > high_fence) {
      s.outliers.push_back(v);
      continue;
    }
    if (!have_low) {
      s.whisker_low = v;
      have_low = true;
    }
    s.whisker_high = v;
  }
  return s;
}

std::vector<LabeledBoxStats> boxplot_table(const LabeledDataset& dataset,
                                           std::span<const std::string> features) {
  std::vector<LabeledBoxStats> out;
  for (const auto& f : features) out.push_back({f, boxplot_stats(eda_column(dataset, f))});
  return out;
}

RankBandSpread rank_band_spread(const LabeledDataset& dataset, int band_size) {
  const int n = static_cast<int>(dataset.size());
  if (band_size < 1 || n % band_size != 0) {
    throw ConfigError("band size " + std::to_string(band_size) + " does not divide " +
                      std::to_string(n) + " records");
  }
  const auto scores = dataset.scores(ScoreWeights::no_perception());
  RankBandSpread spread;
  spread.band_size = band_size;
  for (int start = 0; start < n; start += band_size) {
    auto first = scores.begin() + start;
    auto [lo, hi] = std::minmax_element(first, first + band_size);
    spread.bands.push_back({{start + 1, start + band_size}, *lo, *hi, *hi - *lo});
  }
  return spread;
}

double perception_rank_agreement(const LabeledDataset& dataset) {
  std::vector<double> rank_position;
  for (const auto& r : dataset.records()) rank_position.push_back(-static_cast<double>(r.rank));
  return spearman_rho(rank_position, dataset.scores(ScoreWeights::no_perception()));
}

Json to_json(const CorrelationMatrix& matrix) {
  Json j;
  j["labels"] = matrix.labels;
  Json rows = Json::array();
  for (const auto& row : matrix.values) {
    Json r = Json::array();
    for (double v : row) r.push_back(v);
    rows.push_back(std::move(r));
  }
  j["values"] = std::move(rows);
  return j;
}

Json to_json(const BoxStats& s) {
  Json j;
  j["count"] = s.count;
  j["min"] = s.min;
  j["q1"] = s.q1;
  j["median"] = s.median;
  j["q3"] = s.q3;
  j["max"] = s.max;
  j["iqr"] = s.iqr;
  j["whisker_low"] = s.whisker_low;
  j["whisker_high"] = s.whisker_high;
  j["outliers"] = s.outliers;
  return j;
}

Json to_json(const RankBandSpread& spread) {
  Json j;
  j["band_size"] = spread.band_size;
  Json bands = Json::array();
  for (const auto& b : spread.bands) {
    Json band;
    band["first_rank"] = b.ranks.first;
    band["last_rank"] = b.ranks.last;
    band["min"] = b.min;
    band["max"] = b.max;
    band["span"] = b.span;
    bands.push_back(std::move(band));
  }
  j["bands"] = std::move(bands);
  return j;
}

}  // namespace rankstrat

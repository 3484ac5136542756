#pragma once

#include <span>
#include <string>
#include <vector>

#include "rankstrat/core.hpp"
#include "rankstrat/io.hpp"

namespace rankstrat {

/// 1-based ascending ranks; tied values share the average of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rank correlation. Ties are handled by correlating average-rank
/// vectors (product-moment form), which reduces to the classic
/// 1 - 6*sum(d^2) / (n(n^2-1)) when there are none.
/// Throws DimensionError (length mismatch, n < 2) or DegenerateInput
/// (a constant input).
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// The rank-difference closed form. Only valid without ties; throws
/// DegenerateInput if either input has a repeated value.
double spearman_rho_distinct(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;

  double at(std::string_view a, std::string_view b) const;
};

inline const std::vector<std::string>& eda_features() {
  static const std::vector<std::string> kFeatures{"Score", "TLR", "RPC", "GO", "OI", "PR"};
  return kFeatures;
}

/// Values of a feature for EDA. "Score" is the reported score when every
/// record has one, else the composite under the dataset's weights.
std::vector<double> eda_column(const LabeledDataset& dataset, std::string_view feature);

CorrelationMatrix correlation_matrix(const LabeledDataset& dataset,
                                     std::span<const std::string> features = eda_features());

/// Box-plot summary. Quartiles use the median-of-halves convention: the
/// lower/upper halves exclude the overall median when n is odd.
struct BoxStats {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double iqr = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
};

BoxStats boxplot_stats(std::span<const double> values);

struct LabeledBoxStats {
  std::string label;
  BoxStats stats;
};

std::vector<LabeledBoxStats> boxplot_table(const LabeledDataset& dataset,
                                           std::span<const std::string> features = eda_features());

struct RankBand {
  RankRange ranks;
  double min = 0.0;
  double max = 0.0;
  double span = 0.0;
};

struct RankBandSpread {
  int band_size = 10;
  std::vector<RankBand> bands;
};

/// Min/max of the perception-free score within consecutive rank bands.
/// Throws ConfigError unless band_size divides the dataset size.
RankBandSpread rank_band_spread(const LabeledDataset& dataset, int band_size = 10);

/// Spearman correlation between the published rank order and the order
/// induced by the perception-free score.
double perception_rank_agreement(const LabeledDataset& dataset);

Json to_json(const CorrelationMatrix& matrix);
Json to_json(const BoxStats& stats);
Json to_json(const RankBandSpread& spread);

/// Heat map with a diverging scale over [-1, 1] and 2-decimal cell labels.
std::string render_heatmap(const CorrelationMatrix& matrix);
/// One box per entry; throws EmptyInput for an empty list.
std::string render_boxplots(std::span<const LabeledBoxStats> stats);
/// Floating bars spanning each rank band's min..max score.
std::string render_bands(const RankBandSpread& spread);

}  // namespace rankstrat

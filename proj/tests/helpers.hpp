#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "rankstrat/core.hpp"
#include "rankstrat/ingest.hpp"

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(RANKSTRAT_FIXTURE_DIR) + "/" + name; }

inline rankstrat::LabeledDataset load_fixture(const std::string& name, int year,
                                              const std::string& profile = "no-perception") {
  rankstrat::DatasetManifest m;
  m.path = fixture(name);
  m.year = year;
  m.weight_profile = profile;
  return rankstrat::load_dataset(m);
}

// Random feature matrix with labels drawn from 1..k. `grid` > 0 snaps values
// to a coarse grid so that ties occur.
inline rankstrat::TrainingSet random_training_set(std::mt19937& rng, std::size_t n, int k, double grid = 0.0) {
  std::uniform_real_distribution<double> value(0.0, 100.0);
  std::uniform_int_distribution<int> label(1, k);
  rankstrat::TrainingSet t;
  t.feature_names = rankstrat::primary_features();
  t.num_classes = k;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row;
    for (int f = 0; f < 4; ++f) {
      double v = value(rng);
      if (grid > 0) v = std::round(v / grid) * grid;
      row.push_back(v);
    }
    t.rows.push_back(row);
    t.labels.push_back(label(rng));
  }
  return t;
}

// A dataset of n institutes ranked by their perception-free score, with
// reported scores under full weights rounded like published tables.
inline rankstrat::LabeledDataset random_dataset(std::mt19937& rng, int n, int k = 4) {
  std::uniform_real_distribution<double> value(0.0, 100.0);
  std::vector<rankstrat::InstituteRecord> recs;
  for (int i = 0; i < n; ++i) {
    rankstrat::InstituteRecord r;
    r.institute_id = "I" + std::to_string(i);
    r.name = "Institute " + std::to_string(i);
    r.year = 2018;
    r.tlr = value(rng);
    r.rpc = value(rng);
    r.go = value(rng);
    r.oi = value(rng);
    r.pr = value(rng);
    recs.push_back(r);
  }
  const auto w = rankstrat::ScoreWeights::no_perception();
  std::sort(recs.begin(), recs.end(), [&](const auto& a, const auto& b) {
    return rankstrat::composite_score(a, w) > rankstrat::composite_score(b, w);
  });
  for (int i = 0; i < n; ++i) recs[static_cast<std::size_t>(i)].rank = i + 1;
  return rankstrat::LabeledDataset::create(recs, w, k);
}

}  // namespace testing

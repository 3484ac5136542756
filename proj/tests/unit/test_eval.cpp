#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "rankstrat/errors.hpp"
#include "rankstrat/eval.hpp"

using namespace rankstrat;

namespace {

ConfusionMatrix published() { return ConfusionMatrix{{{22, 3, 0, 0}, {3, 21, 1, 0}, {0, 5, 12, 8}, {0, 0, 5, 20}}}; }

ConfusionMatrix random_cm(std::mt19937& rng, int k, bool diagonal) {
  std::uniform_int_distribution<long> v(0, 12);
  ConfusionMatrix cm{std::vector<std::vector<long>>(static_cast<std::size_t>(k), std::vector<long>(k, 0))};
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (!diagonal || i == j) cm.counts[i][j] = v(rng);
    }
  }
  return cm;
}

}  // namespace

TEST_CASE("confusion matrix construction") {
  const std::vector<int> a{1, 2, 3, 4};
  const auto cm = confusion_matrix(a, a, 4);
  CHECK(cm.is_diagonal());
  CHECK(cm.total() == 4);
  CHECK_THROWS_AS(confusion_matrix(std::vector<int>{}, std::vector<int>{}, 4), DimensionError);
  CHECK_THROWS_AS(confusion_matrix(a, std::vector<int>{1, 2}, 4), DimensionError);
  CHECK_THROWS_AS(confusion_matrix(a, std::vector<int>{1, 2, 3, 5}, 4), DataError);
  // Rows are actual classes, columns predicted.
  const auto off = confusion_matrix(std::vector<int>{1}, std::vector<int>{3}, 4);
  CHECK(off.counts[0][2] == 1);
}

TEST_CASE("weight matrix") {
  const auto w = weight_matrix(4);
  const double expected[4][4] = {{0, 0.11, 0.44, 1}, {0.11, 0, 0.11, 0.44}, {0.44, 0.11, 0, 0.11}, {1, 0.44, 0.11, 0}};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK(std::abs(w[i][j] - expected[i][j]) <= 0.005);
  }
  CHECK(weight_matrix(2) == Matrix{{0, 1}, {1, 0}});
  for (int k = 2; k < 9; ++k) {
    const auto m = weight_matrix(k);
    for (int i = 0; i < k; ++i) CHECK(m[i][i] == 0.0);
    CHECK(m[0][k - 1] == 1.0);
  }
  CHECK_THROWS_AS(weight_matrix(1), ConfigError);
}

TEST_CASE("expected matrix from marginals") {
  const auto cm = published();
  CHECK(cm.row_marginals() == std::vector<long>{25, 25, 25, 25});
  CHECK(cm.column_marginals() == std::vector<long>{25, 29, 18, 28});
  const auto m = expected_matrix(cm);
  CHECK(m[0][0] == doctest::Approx(6.25));
  CHECK(m[1][3] == doctest::Approx(25.0 * 28 / 100));

  ConfusionMatrix diag{{{5, 0, 0}, {0, 5, 0}, {0, 0, 5}}};
  for (const auto& row : expected_matrix(diag)) {
    for (double v : row) CHECK(v == doctest::Approx(25.0 / 15));
  }
  ConfusionMatrix single{{{7, 0}, {0, 0}}};
  CHECK(expected_matrix(single)[0][0] == doctest::Approx(7));
  ConfusionMatrix none{{{0, 0}, {0, 0}}};
  CHECK_THROWS_AS(expected_matrix(none), DegenerateInput);
  CHECK_THROWS_AS(quadratic_weighted_kappa(single), DegenerateInput);
}

TEST_CASE("kappa and accuracy on the published matrix") {
  const auto cm = published();
  CHECK(std::abs(quadratic_weighted_kappa(cm) - 0.90234) <= 1e-5);
  // Hand arithmetic: numerator 25/9, denominator 256/9.
  CHECK(quadratic_weighted_kappa(cm) == doctest::Approx(1.0 - 25.0 / 256.0).epsilon(1e-12));
  CHECK(accuracy(cm) == 0.75);
  const auto report = kappa_report(cm);
  CHECK(report.band == "excellent");
  CHECK(report.kappa == doctest::Approx(oracle::kappa(cm.counts)));
}

TEST_CASE("accuracy extremes and kappa bands") {
  ConfusionMatrix diag{{{3, 0}, {0, 4}}};
  CHECK(accuracy(diag) == 1.0);
  CHECK(quadratic_weighted_kappa(diag) == 1.0);
  ConfusionMatrix anti{{{0, 3}, {4, 0}}};
  CHECK(accuracy(anti) == 0.0);
  CHECK(kappa_band(0.4) == "poor");
  CHECK(kappa_band(0.5) == "fair");
  CHECK(kappa_band(0.75) == "excellent");
}

TEST_CASE("kappa properties over random matrices") {
  for (unsigned seed = 0; seed < 100; ++seed) {
    std::mt19937 rng(seed);
    const int k = 2 + static_cast<int>(seed % 5);
    auto cm = random_cm(rng, k, false);
    cm.counts[0][k - 1] += 1;  // guarantees a non-diagonal matrix
    cm.counts[k - 1][0] += 1;
    const double kappa = quadratic_weighted_kappa(cm);
    CHECK(kappa < 1.0);
    CHECK(kappa >= -1.0);
    CHECK(kappa == doctest::Approx(oracle::kappa(cm.counts)).epsilon(1e-12));

    Matrix scaled = weight_matrix(k);
    const double s = 0.5 + seed;
    for (auto& row : scaled) {
      for (auto& v : row) v *= s;
    }
    CHECK(quadratic_weighted_kappa(cm, scaled) == doctest::Approx(kappa).epsilon(1e-12));

    const auto m = expected_matrix(cm);
    for (int i = 0; i < k; ++i) {
      double row = 0, col = 0;
      for (int j = 0; j < k; ++j) {
        row += m[i][j];
        col += m[j][i];
      }
      CHECK(row == doctest::Approx(cm.row_marginals()[i]));
      CHECK(col == doctest::Approx(cm.column_marginals()[i]));
    }

    auto diag = random_cm(rng, k, true);
    diag.counts[0][0] += 1;
    diag.counts[k - 1][k - 1] += 1;
    CHECK(diag.is_diagonal());
    CHECK(quadratic_weighted_kappa(diag) == 1.0);
  }
}

TEST_CASE("depth sweep") {
  const auto train = testing::load_fixture("synthetic_2018.csv", 2018);
  const auto test = testing::load_fixture("synthetic_2019.csv", 2019);
  const std::vector<int> repeated{3, 3, 3};
  const auto same = depth_sweep(train, test, SplitCriterion::InformationGain, repeated);
  REQUIRE(same.size() == 3);
  CHECK(same[0].kappa == same[1].kappa);
  CHECK(same[1].accuracy == same[2].accuracy);

  const std::vector<int> depths{10, 1, 50};
  const auto self = depth_sweep(train, train, SplitCriterion::GiniImpurity, depths);
  CHECK(self.front().depth == 1);
  CHECK(self.back().depth == 50);
  CHECK(self.back().accuracy == 1.0);

  CHECK_THROWS_AS(depth_sweep(train, test, SplitCriterion::GiniImpurity, std::vector<int>{}), ConfigError);
  CHECK_THROWS_AS(depth_sweep(train, test, SplitCriterion::GiniImpurity, std::vector<int>{0}), ConfigError);
  const auto csv = sweep_to_csv(self);
  CHECK(csv.rfind("depth,kappa,accuracy\n", 0) == 0);
}

TEST_CASE("evaluate maps features by name") {
  const auto train = testing::load_fixture("synthetic_2018.csv", 2018);
  const auto test = testing::load_fixture("synthetic_2019.csv", 2019);
  const auto tree = build_tree(train.training_set());
  const auto report = evaluate(tree, test.training_set());
  CHECK(report.confusion.total() == 100);
  CHECK(report.accuracy == accuracy(report.confusion));
  const std::vector<std::string> reordered{"OI", "GO", "RPC", "TLR"};
  const auto again = evaluate(tree, test.training_set(reordered));
  CHECK(again.confusion.counts == report.confusion.counts);
  const auto j = to_json(report);
  CHECK(j.contains("kappa"));
  CHECK(j["confusion"].size() == 4);
}

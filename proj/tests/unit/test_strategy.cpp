#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "rankstrat/errors.hpp"
#include "rankstrat/strategy.hpp"

using namespace rankstrat;

namespace {

const LabeledDataset& fixture2018() {
  static const auto ds = testing::load_fixture("synthetic_2018.csv", 2018);
  return ds;
}

const DecisionTree& tree2018() {
  static const auto tree = build_tree(fixture2018().training_set());
  return tree;
}

std::map<std::string, double> as_map(const InstituteRecord& r) {
  return {{"TLR", r.tlr}, {"RPC", r.rpc}, {"GO", r.go}, {"OI", r.oi}};
}

}  // namespace

TEST_CASE("laplace estimate on published fractions") {
  struct Case {
    int count, total, num, den;
  };
  for (const auto& c : {Case{25, 42, 26, 46}, Case{23, 27, 24, 31}, Case{23, 24, 24, 28}, Case{22, 22, 23, 26},
                        Case{25, 49, 26, 53}, Case{23, 36, 24, 40}, Case{20, 24, 21, 28}, Case{20, 22, 21, 26}}) {
    ClassDistribution d({c.count, c.total - c.count, 0, 0});
    const auto e = laplace_estimate(d, 1, 4);
    CHECK(e.numerator == c.num);
    CHECK(e.denominator == c.den);
    CHECK(e.value == doctest::Approx(double(c.num) / c.den));
  }
  const auto prior = laplace_estimate(ClassDistribution(4), 2, 4);
  CHECK(prior.value == 0.25);
  CHECK(prior.denominator == 4);
}

TEST_CASE("pure leaves grow more certain with size") {
  double prev = 0;
  for (int n = 1; n < 40; ++n) {
    const auto e = laplace_estimate(ClassDistribution({n, 0, 0, 0}), 1, 4);
    CHECK(e.value == doctest::Approx(double(n + 1) / (n + 4)));
    CHECK(e.value > prev);
    prev = e.value;
  }
}

TEST_CASE("path conditions") {
  PathCondition c{"RPC", ConditionOp::GT, 29.3};
  CHECK(c.describe() == "RPC > 29.30");
  CHECK_FALSE(c.holds(29.3));
  CHECK(c.holds(29.31));
  PathCondition l{"TLR", ConditionOp::LE, 61.55};
  CHECK(l.holds(61.55));
  CHECK(l.describe() == "TLR <= 61.55");
}

TEST_CASE("enumerating paths") {
  const auto stump = build_tree(fixture2018().training_set(), TreeParams{SplitCriterion::InformationGain, 1, 1});
  const auto stump_paths = leaf_paths(stump);
  REQUIRE(stump_paths.size() == 2);
  for (const auto& p : stump_paths) CHECK(p.conditions.size() == 1);

  const auto& tree = tree2018();
  const auto leaves = leaf_paths(tree);
  CHECK(leaves.size() == tree.leaf_count());
  const auto all = enumerate_paths(tree);
  CHECK(all.size() == tree.nodes().size() - 1);
  for (const auto& p : all) {
    CHECK(p.laplace.numerator <= p.laplace.denominator);
    CHECK(p.laplace.value > 0.0);
    CHECK(p.laplace.value < 1.0);
    CHECK(p.level() == tree.node(p.node_id).level - 1);
  }
  // Node totals never grow along a root-to-leaf walk.
  for (const auto& leaf : leaves) {
    std::vector<double> values{50, 50, 50, 50};
    int prev_total = tree.root().distribution.total();
    const auto rows = filter_rows(fixture2018(), leaf.conditions);
    CHECK(static_cast<int>(rows.size()) == leaf.node_distribution.total());
    for (std::size_t i = 1; i <= leaf.conditions.size(); ++i) {
      const std::span<const PathCondition> prefix(leaf.conditions.data(), i);
      const int total = static_cast<int>(filter_rows(fixture2018(), prefix).size());
      CHECK(total <= prev_total);
      prev_total = total;
    }
  }
}

TEST_CASE("floor constraints") {
  const auto& ds = fixture2018();
  const std::vector<PathCondition> conds{{"RPC", ConditionOp::GT, 40.0}};
  const auto fc = path_floor_constraints(ds, conds, 1);
  double min_tlr = 1e9;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels()[i] == 1 && ds.records()[i].rpc > 40.0) min_tlr = std::min(min_tlr, ds.records()[i].tlr);
  }
  bool saw_tlr = false, saw_rpc = false;
  for (const auto& [f, v] : fc.floors) {
    if (f == "TLR") {
      saw_tlr = true;
      CHECK(v == min_tlr);
    }
    saw_rpc |= f == "RPC";
  }
  CHECK(saw_tlr);
  CHECK_FALSE(saw_rpc);
  const auto floors = class_score_floors(ds);
  CHECK(fc.score_floor == floors[0]);
  CHECK(floors.size() == 4);
  CHECK(floors[0] > floors[3]);

  const std::vector<PathCondition> impossible{{"RPC", ConditionOp::GT, 100.0}};
  CHECK_THROWS_AS(path_floor_constraints(ds, impossible, 1), NoSupport);
}

TEST_CASE("singleton filtered set gives that record's values") {
  const auto& ds = fixture2018();
  const auto& best = ds.records().front();
  const std::vector<PathCondition> conds{{"TLR", ConditionOp::GT, std::nextafter(best.tlr, -1.0)},
                                         {"TLR", ConditionOp::LE, best.tlr},
                                         {"RPC", ConditionOp::LE, best.rpc}};
  const auto fc = path_floor_constraints(ds, conds, 1);
  std::map<std::string, double> floors(fc.floors.begin(), fc.floors.end());
  CHECK(floors.at("RPC") == best.rpc);
  CHECK(floors.at("GO") == best.go);
  CHECK(floors.at("OI") == best.oi);
  CHECK_FALSE(floors.contains("TLR"));
}

TEST_CASE("strategy report orders paths and computes gaps") {
  const auto& ds = fixture2018();
  const auto& tree = tree2018();
  const std::map<std::string, double> subject{{"TLR", 60}, {"RPC", 25}, {"GO", 60}, {"OI", 50}};
  const auto report = strategy_report(tree, ds, 1, subject);
  REQUIRE_FALSE(report.paths.empty());
  for (std::size_t i = 0; i < report.paths.size(); ++i) {
    const auto& s = report.paths[i];
    CHECK(tree.node(s.path.node_id).predicted_class() == 1);
    CHECK(s.path.is_leaf);
    if (i > 0) CHECK(report.paths[i - 1].path.laplace.value >= s.path.laplace.value);
    CHECK(s.gaps.size() == 4);
    for (const auto& g : s.gaps) {
      CHECK(g.gap == std::max(0.0, g.required - g.current));
      if (g.percent_change) CHECK(*g.percent_change == doctest::Approx(100.0 * g.gap / g.current));
    }
    CHECK(s.levels.size() == s.path.conditions.size());
  }
  bool needs_rpc = false;
  for (const auto& s : report.paths) {
    for (const auto& g : s.gaps) needs_rpc |= g.feature == "RPC" && g.gap > 0;
  }
  CHECK(needs_rpc);
  CHECK(render_report_markdown(report).find("| Level | Class | Path | Laplace estimate |") != std::string::npos);
}

TEST_CASE("subject already on a path has zero gaps there") {
  const auto& ds = fixture2018();
  const auto& tree = tree2018();
  const auto& top = ds.records().front();
  const auto subject = as_map(top);
  const int leaf = tree.route(std::vector<double>{top.tlr, top.rpc, top.go, top.oi}).back();
  const int cls = tree.node(leaf).predicted_class();
  const auto report = strategy_report(tree, ds, cls, subject);
  bool found = false;
  for (const auto& s : report.paths) {
    if (s.path.node_id != leaf) continue;
    found = true;
    for (const auto& g : s.gaps) {
      if (g.strict) CHECK(g.gap == 0.0);
    }
  }
  CHECK(found);
}

TEST_CASE("closing the gaps reroutes to the target class") {
  const auto& ds = fixture2018();
  const auto& tree = tree2018();
  int checked = 0;
  for (std::size_t i = 25; i < ds.size(); i += 5) {
    const auto subject = as_map(ds.records()[i]);
    const auto report = strategy_report(tree, ds, 1, subject);
    for (const auto& s : report.paths) {
      std::map<std::string, double> moved;
      bool feasible = true;
      for (const auto& g : s.gaps) {
        double v = g.current + g.gap;
        if (g.strict && v <= g.required) v = std::nextafter(g.required, 1e9);
        if (g.above_ceiling || (g.ceiling && v > *g.ceiling)) feasible = false;
        moved[g.feature] = v;
      }
      if (!feasible) continue;
      for (const auto& c : s.path.conditions) CHECK(c.holds(moved.at(c.feature)));
      CHECK(tree.predict(moved) == 1);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("no path for a class no leaf predicts") {
  const auto& ds = fixture2018();
  const auto stump = build_tree(ds.training_set(), TreeParams{SplitCriterion::InformationGain, 1, 1});
  int missing = 0;
  for (int c = 1; c <= 4; ++c) {
    try {
      strategy_report(stump, ds, c);
    } catch (const NoPath&) {
      ++missing;
    }
  }
  CHECK(missing == 2);
}

TEST_CASE("what-if agrees with prediction and flags low scores") {
  const auto& ds = fixture2018();
  const auto& tree = tree2018();
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> v(0, 100);
  for (int i = 0; i < 200; ++i) {
    const std::map<std::string, double> c{{"TLR", v(rng)}, {"RPC", v(rng)}, {"GO", v(rng)}, {"OI", v(rng)}};
    const auto r = what_if(tree, ds, c);
    CHECK(r.predicted_class == tree.predict(c));
    CHECK(tree.node(r.leaf_id).is_leaf());
    CHECK(r.below_score_floor == (r.score < r.class_score_floor));
  }
  const auto& top = ds.records().front();
  const auto r = what_if(tree, ds, as_map(top));
  CHECK(r.predicted_class == 1);
  CHECK(r.laplace.value == laplace_estimate(tree.node(r.leaf_id).distribution, 1, 4).value);

  const auto low = what_if(tree, ds, {{"TLR", 0}, {"RPC", 0}, {"GO", 0}, {"OI", 0}});
  CHECK(low.predicted_class == 4);
  CHECK_THROWS_AS(what_if(tree, ds, {{"TLR", 101}, {"RPC", 0}, {"GO", 0}, {"OI", 0}}), DataError);
  CHECK_THROWS_AS(what_if(tree, ds, {{"TLR", 1}}), MissingParameter);
}

TEST_CASE("sub-parameter trees") {
  const auto sub = testing::load_fixture("synthetic_tlr_sub_2018.csv", 2018);
  const std::vector<std::string> features{"SS", "FSR", "FQE", "FRU"};
  const auto tree = subparameter_tree(sub, features, ThresholdPredicate{"TLR", 61.44});
  CHECK(tree.num_classes() == 2);
  CHECK(tree.feature_names()[static_cast<std::size_t>(tree.root().feature)] == "FQE");
  const auto flat = subparameter_tree(sub, features, ThresholdPredicate{"TLR", -1.0});
  CHECK(flat.nodes().size() == 1);
  const std::vector<std::string> missing{"SS", "XYZ"};
  CHECK_THROWS_AS(subparameter_tree(sub, missing, ThresholdPredicate{"TLR", 61.44}), SchemaError);
}

TEST_CASE("feature vector parsing") {
  const auto m = parse_feature_vector("tlr=60, RPC=25.5,GO=60,OI=50");
  CHECK(m.at("TLR") == 60);
  CHECK(m.at("RPC") == 25.5);
  CHECK_THROWS_AS(parse_feature_vector("TLR=abc"), ParseError);
  CHECK_THROWS_AS(parse_feature_vector("TLR"), ParseError);
}

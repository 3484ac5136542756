#include <algorithm>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <regex>

#include "CLI11.hpp"
#include "rankstrat/cli.hpp"
#include "rankstrat/eda.hpp"
#include "rankstrat/errors.hpp"
#include "rankstrat/eval.hpp"
#include "rankstrat/ingest.hpp"
#include "rankstrat/serve.hpp"
#include "rankstrat/strategy.hpp"

namespace rankstrat::cli {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (max_depth < 1) throw ConfigError("--max-depth must be at least 1");
  if (min_leaf < 1) throw ConfigError("--min-leaf must be at least 1");
  if (classes < 2) throw ConfigError("--classes must be at least 2");
  if (band_size < 1) throw ConfigError("--band-size must be at least 1");
  if (target_class < 1 || target_class > classes) {
    throw ConfigError("--target-class must lie in 1.." + std::to_string(classes));
  }
  if (port < 0 || port > 65535) throw ConfigError("--port out of range");
  (void)parse_criterion(criterion);
  if (weights) (void)ScoreWeights::from_profile(*weights);
  if (input.empty()) throw ConfigError("--input is required");
  if (!fs::is_regular_file(input)) throw IoError("input file '" + input + "' not found");
  if (test && !fs::is_regular_file(*test)) throw IoError("test file '" + *test + "' not found");
  if (ui_dir && !fs::is_directory(*ui_dir)) throw IoError("UI directory '" + *ui_dir + "' not found");
}

std::vector<int> parse_depths(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad depth list '" + text + "'");
    }
  };
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(to_int(item));
      continue;
    }
    const int lo = to_int(item.substr(0, dash));
    const int hi = to_int(item.substr(dash + 1));
    if (hi < lo) throw ConfigError("bad depth range '" + item + "'");
    for (int d = lo; d <= hi; ++d) out.push_back(d);
  }
  if (out.empty()) throw ConfigError("empty depth list");
  for (int d : out) {
    if (d < 1) throw ConfigError("depths must be at least 1");
  }
  return out;
}

int infer_year(const std::string& path, std::optional<int> explicit_year) {
  if (explicit_year) return *explicit_year;
  static const std::regex kYear("(19|20)[0-9]{2}");
  const std::string name = fs::path(path).filename().string();
  std::smatch m;
  if (std::regex_search(name, m, kYear)) return std::stoi(m.str());
  throw ConfigError("cannot infer the year of '" + path + "'; pass --year");
}

namespace {

LabeledDataset load(const std::string& path, int year, const std::string& profile, int classes) {
  DatasetManifest manifest;
  manifest.path = path;
  manifest.year = year;
  manifest.weight_profile = profile;
  manifest.num_classes = classes;
  return load_dataset(manifest);
}

LabeledDataset load_train(const RunConfig& c, const std::string& default_profile = "no-perception") {
  return load(c.input, infer_year(c.input, c.year), c.weights.value_or(default_profile), c.classes);
}

LabeledDataset load_test(const RunConfig& c) {
  if (!c.test) throw ConfigError("--test is required for this command");
  return load(*c.test, infer_year(*c.test, c.test_year), c.weights.value_or("no-perception"), c.classes);
}

TreeParams tree_params(const RunConfig& c) {
  return TreeParams{parse_criterion(c.criterion), c.max_depth, c.min_leaf};
}

std::string out_path(const RunConfig& c, const std::string& name) { return (fs::path(c.out_dir) / name).string(); }

bool has_perception(const LabeledDataset& ds) {
  return std::all_of(ds.records().begin(), ds.records().end(), [](const auto& r) { return r.pr.has_value(); });
}

std::vector<std::string> available_eda_features(const LabeledDataset& ds) {
  std::vector<std::string> features = eda_features();
  if (!has_perception(ds)) std::erase(features, std::string("PR"));
  return features;
}

Json eda_json(const LabeledDataset& ds, int band_size, CorrelationMatrix* matrix_out = nullptr,
              std::vector<LabeledBoxStats>* boxes_out = nullptr, RankBandSpread* bands_out = nullptr) {
  const auto features = available_eda_features(ds);
  const auto matrix = correlation_matrix(ds, features);
  const auto boxes = boxplot_table(ds, features);
  const auto bands = rank_band_spread(ds, band_size);
  Json j;
  j["year"] = ds.year();
  j["correlation"] = to_json(matrix);
  Json box_json = Json::object();
  for (const auto& b : boxes) box_json[b.label] = to_json(b.stats);
  j["boxplots"] = std::move(box_json);
  j["bands"] = to_json(bands);
  j["perception_rank_agreement"] = has_perception(ds) ? Json(perception_rank_agreement(ds)) : Json(nullptr);
  if (matrix_out) *matrix_out = matrix;
  if (boxes_out) *boxes_out = boxes;
  if (bands_out) *bands_out = bands;
  return j;
}

Json tree_document(const DecisionTree& tree, const LabeledDataset& train) {
  Json j = tree_to_json(tree);
  j["year"] = train.year();
  j["class_score_floors"] = class_score_floors(train);
  return j;
}

Json all_leaf_paths_json(const DecisionTree& tree, const LabeledDataset& train) {
  Json paths = Json::array();
  for (int cls = 1; cls <= tree.num_classes(); ++cls) {
    try {
      const auto report = strategy_report(tree, train, cls);
      for (const auto& p : report.paths) paths.push_back(to_json(p));
    } catch (const NoPath&) {
      // A class no leaf predicts contributes no paths.
    }
  }
  return paths;
}

Json metadata(const RunConfig& c, const LabeledDataset& train, const DecisionTree& tree) {
  Json m;
  m["year"] = train.year();
  m["criterion"] = std::string(to_string(tree.params().criterion));
  m["depth"] = tree.params().max_depth;
  m["min_leaf"] = tree.params().min_leaf;
  m["classes"] = tree.num_classes();
  m["weights"] = train.weights().profile_name();
  m["features"] = tree.feature_names();
  (void)c;
  return m;
}

void write_json(const RunConfig& c, const std::string& name, const Json& j) {
  write_file_atomic(out_path(c, name), dump_json(j) + "\n");
}

}  // namespace

void cmd_validate(const RunConfig& c) {
  const auto records = parse_records(read_file(c.input), infer_year(c.input, c.year));
  const auto report = validate_records(records, ScoreWeights::from_profile(c.weights.value_or("full")));
  Json j;
  j["row_count"] = report.row_count;
  j["verifiable"] = report.verifiable;
  Json mismatches = Json::array();
  for (const auto& m : report.score_mismatches) {
    mismatches.push_back(
        Json{{"institute_id", m.institute_id}, {"reported", m.reported}, {"recomputed", m.recomputed}, {"delta", m.delta}});
  }
  j["score_mismatches"] = std::move(mismatches);
  Json ranges = Json::array();
  for (const auto& v : report.range_violations) {
    ranges.push_back(Json{{"institute_id", v.institute_id}, {"field", v.field}, {"value", v.value}});
  }
  j["range_violations"] = std::move(ranges);
  j["rank_gaps"] = report.rank_gaps;
  j["duplicate_ranks"] = report.duplicate_ranks;
  j["unverifiable"] = report.unverifiable;
  j["ok"] = report.ok();
  write_json(c, "validation.json", j);
}

void cmd_eda(const RunConfig& c) {
  const auto ds = load_train(c, "full");
  CorrelationMatrix matrix;
  std::vector<LabeledBoxStats> boxes;
  RankBandSpread bands;
  const Json stats = eda_json(ds, c.band_size, &matrix, &boxes, &bands);
  write_file_atomic(out_path(c, "heatmap.svg"), render_heatmap(matrix));
  write_file_atomic(out_path(c, "boxplots.svg"), render_boxplots(boxes));
  write_file_atomic(out_path(c, "bands.svg"), render_bands(bands));
  write_json(c, "stats.json", stats);
}

void cmd_train(const RunConfig& c) {
  const auto train = load_train(c);
  const auto tree = build_tree(train.training_set(), tree_params(c));
  write_json(c, "tree.json", tree_document(tree, train));
  write_file_atomic(out_path(c, "tree.svg"), render_tree(tree));
}

void cmd_eval(const RunConfig& c) {
  const auto train = load_train(c);
  const auto test = load_test(c);
  const auto tree = build_tree(train.training_set(), tree_params(c));
  const auto report = evaluate(tree, test.training_set());
  Json j = to_json(report);
  j["criterion"] = std::string(to_string(tree.params().criterion));
  j["max_depth"] = c.max_depth;
  j["train_year"] = train.year();
  j["test_year"] = test.year();
  write_json(c, "eval.json", j);
  const auto depths = parse_depths(c.depths);
  const auto sweep = depth_sweep(train, test, tree.params().criterion, depths, c.min_leaf);
  write_file_atomic(out_path(c, "depth_sweep.csv"), sweep_to_csv(sweep));
}

void cmd_strategy(const RunConfig& c) {
  const auto train = load_train(c);
  const auto tree = build_tree(train.training_set(), tree_params(c));
  std::optional<std::map<std::string, double>> subject;
  if (c.subject) subject = parse_feature_vector(*c.subject);
  const auto report = strategy_report(tree, train, c.target_class, subject);
  Json j;
  j["tree"] = tree_to_json(tree);
  const Json body = to_json(report);
  j["paths"] = body["paths"];
  Json meta = metadata(c, train, tree);
  meta["target_class"] = c.target_class;
  if (body.contains("subject")) meta["subject"] = body["subject"];
  j["metadata"] = std::move(meta);
  write_json(c, "strategy.json", j);
  write_file_atomic(out_path(c, "report.md"), render_report_markdown(report));
}

std::string cmd_whatif(const RunConfig& c) {
  if (!c.subject) throw ConfigError("--subject is required for whatif");
  Json doc;
  try {
    doc = Json::parse(read_file(c.input));
  } catch (const Json::parse_error& e) {
    throw ParseError(1, std::string("tree JSON: ") + e.what());
  }
  const auto tree = tree_from_json(doc);
  std::vector<double> floors;
  if (doc.contains("class_score_floors")) floors = doc["class_score_floors"].get<std::vector<double>>();
  const auto result = what_if(tree, floors, parse_feature_vector(*c.subject));
  return dump_json(to_json(result), -1);
}

Json build_bundle(const RunConfig& c) {
  const auto train = load_train(c);
  const auto tree = build_tree(train.training_set(), tree_params(c));
  Json bundle;
  bundle["tree"] = tree_to_json(tree);
  bundle["paths"] = all_leaf_paths_json(tree, train);
  Json meta = metadata(c, train, tree);
  bundle["class_score_floors"] = class_score_floors(train);
  bundle["eda"] = eda_json(train, c.band_size);

  const LabeledDataset* scored = &train;
  std::optional<LabeledDataset> test;
  if (c.test) {
    test = load_test(c);
    scored = &*test;
    meta["test_year"] = test->year();
    Json eval = to_json(evaluate(tree, test->training_set()));
    Json sweep = Json::array();
    for (const auto& p : depth_sweep(train, *test, tree.params().criterion, parse_depths(c.depths), c.min_leaf)) {
      sweep.push_back(Json{{"depth", p.depth}, {"kappa", p.kappa}, {"accuracy", p.accuracy}});
    }
    eval["depth_sweep"] = std::move(sweep);
    bundle["eval"] = std::move(eval);
  } else {
    bundle["eval"] = nullptr;
  }

  // Recorded predictions let clients cross-check their own routing.
  Json predictions = Json::array();
  const auto set = scored->training_set(tree.feature_names());
  for (std::size_t i = 0; i < set.size(); ++i) {
    Json p;
    p["institute_id"] = scored->records()[i].institute_id;
    Json features = Json::object();
    for (std::size_t f = 0; f < set.feature_names.size(); ++f) features[set.feature_names[f]] = set.rows[i][f];
    p["features"] = std::move(features);
    p["actual"] = set.labels[i];
    const auto route = tree.route(set.rows[i]);
    p["predicted"] = tree.node(route.back()).predicted_class();
    p["leaf_id"] = route.back();
    predictions.push_back(std::move(p));
  }
  bundle["predictions"] = std::move(predictions);
  bundle["metadata"] = std::move(meta);
  return bundle;
}

void cmd_export(const RunConfig& c) { write_json(c, "bundle.json", build_bundle(c)); }

namespace {

BundleServer* g_server = nullptr;

extern "C" void handle_stop_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

void cmd_serve(const RunConfig& c) {
  BundleServer server(read_file(c.input), c.ui_dir);
  const int port = server.bind(c.host, c.port);
  std::cerr << "serving http://" << c.host << ":" << port << "/bundle.json\n";
  g_server = &server;
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  server.listen();
  g_server = nullptr;
}

namespace {

void emit_error(std::ostream& err, std::string_view kind, std::string_view message) {
  Json j;
  j["error"] = std::string(kind);
  j["message"] = std::string(message);
  err << dump_json(j, -1) << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ranking analytics: EDA, decision trees, kappa evaluation and rank-improvement strategies",
               "rankstrat"};
  app.require_subcommand(1);
  RunConfig config;

  auto add_common = [&](CLI::App* sub, bool needs_test) {
    sub->add_option("--input", config.input, "Input CSV (or tree.json / bundle.json)")->required();
    auto* test = sub->add_option("--test", config.test, "Test-year CSV");
    if (needs_test) test->required();
    sub->add_option("--out", config.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--criterion", config.criterion, "Split criterion: gini|ig")
        ->check(CLI::IsMember({"gini", "ig"}))
        ->capture_default_str();
    sub->add_option("--max-depth", config.max_depth, "Maximum decision levels")->capture_default_str();
    sub->add_option("--min-leaf", config.min_leaf, "Minimum samples per leaf")->capture_default_str();
    sub->add_option("--classes", config.classes, "Number of rank classes")->capture_default_str();
    sub->add_option("--weights", config.weights, "Score weights: full|no-perception")
        ->check(CLI::IsMember({"full", "no-perception"}));
    sub->add_option("--band-size", config.band_size, "Rank band size")->capture_default_str();
    sub->add_option("--target-class", config.target_class, "Target class")->capture_default_str();
    sub->add_option("--subject", config.subject, "Feature vector, e.g. TLR=60,RPC=25,GO=60,OI=50");
    sub->add_option("--depths", config.depths, "Depth sweep, e.g. 1-10")->capture_default_str();
    sub->add_option("--year", config.year, "Year of --input (default: from file name)");
    sub->add_option("--test-year", config.test_year, "Year of --test (default: from file name)");
  };

  struct Entry {
    const char* name;
    const char* help;
    Command command;
    bool needs_test;
  };
  const Entry entries[] = {
      {"validate", "Check reported scores, ranges and rank coverage", Command::Validate, false},
      {"eda", "Correlation heat map, box plots and rank-band spread", Command::Eda, false},
      {"train", "Induce a decision tree (tree.json, tree.svg)", Command::Train, false},
      {"eval", "Train on --input, evaluate on --test (eval.json, depth_sweep.csv)", Command::Eval, true},
      {"strategy", "Decision paths toward --target-class (strategy.json, report.md)", Command::Strategy, false},
      {"whatif", "Route --subject through the tree in --input tree.json", Command::WhatIf, false},
      {"export", "Write bundle.json for the explorer UI", Command::Export, false},
      {"serve", "Serve --input bundle.json over HTTP", Command::Serve, false},
  };
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, e.needs_test);
    const Command cmd = e.command;
    sub->callback([&config, cmd] { config.command = cmd; });
    if (cmd == Command::Serve) {
      sub->add_option("--port", config.port, "HTTP port (0 = any)")->capture_default_str();
      sub->add_option("--host", config.host, "Bind address")->capture_default_str();
      sub->add_option("--ui-dir", config.ui_dir, "Static UI asset directory");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "UsageError", e.what());
    return 2;
  }

  try {
    config.validate();
    switch (config.command) {
      case Command::Validate: cmd_validate(config); break;
      case Command::Eda: cmd_eda(config); break;
      case Command::Train: cmd_train(config); break;
      case Command::Eval: cmd_eval(config); break;
      case Command::Strategy: cmd_strategy(config); break;
      case Command::WhatIf: out << cmd_whatif(config) << "\n"; break;
      case Command::Export: cmd_export(config); break;
      case Command::Serve: cmd_serve(config); break;
    }
  } catch (const Error& e) {
    emit_error(err, to_string(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error(err, "InternalError", e.what());
    return 1;
  }
  return 0;
}

}  // namespace rankstrat::cli

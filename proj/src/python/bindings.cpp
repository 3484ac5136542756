#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rankstrat/cli.hpp"
#include "rankstrat/eda.hpp"
#include "rankstrat/errors.hpp"
#include "rankstrat/eval.hpp"
#include "rankstrat/ingest.hpp"
#include "rankstrat/strategy.hpp"

namespace py = pybind11;
using namespace rankstrat;

namespace {

LabeledDataset load(const std::string& path, int year, const std::string& weights, int classes) {
  DatasetManifest m;
  m.path = path;
  m.year = year;
  m.weight_profile = weights;
  m.num_classes = classes;
  return load_dataset(m);
}

ConfusionMatrix to_confusion(const std::vector<std::vector<long>>& counts) {
  for (const auto& row : counts) {
    if (row.size() != counts.size()) throw DimensionError("confusion matrix must be square");
  }
  return ConfusionMatrix{counts};
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full{"rankstrat"};
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : full) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ranking analytics core: scoring, EDA statistics, decision trees, kappa and strategies";

  static py::handle error_type;
  error_type = py::exception<Error>(m, "RankstratError", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = py::reinterpret_borrow<py::object>(error_type)(e.what());
      instance.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  py::class_<LabeledDataset>(m, "Dataset")
      .def_property_readonly("year", &LabeledDataset::year)
      .def_property_readonly("labels", &LabeledDataset::labels)
      .def("__len__", &LabeledDataset::size)
      .def("column", &LabeledDataset::column, py::arg("feature"))
      .def("institute_ids", [](const LabeledDataset& d) {
        std::vector<std::string> ids;
        for (const auto& r : d.records()) ids.push_back(r.institute_id);
        return ids;
      });

  m.def("load_dataset", &load, py::arg("path"), py::arg("year"), py::arg("weights") = "no-perception",
        py::arg("classes") = 4);

  m.def(
      "composite_score",
      [](double tlr, double rpc, double go, double oi, std::optional<double> pr, const std::string& weights) {
        InstituteRecord r;
        r.tlr = tlr;
        r.rpc = rpc;
        r.go = go;
        r.oi = oi;
        r.pr = pr;
        return composite_score(r, ScoreWeights::from_profile(weights));
      },
      py::arg("tlr"), py::arg("rpc"), py::arg("go"), py::arg("oi"), py::arg("pr") = py::none(),
      py::arg("weights") = "full");

  m.def("spearman_rho", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman_rho(x, y); });
  m.def("boxplot_stats_json",
        [](const std::vector<double>& v) { return dump_json(to_json(boxplot_stats(v)), -1); });

  m.def("weight_matrix", &weight_matrix, py::arg("k"));
  m.def("quadratic_weighted_kappa",
        [](const std::vector<std::vector<long>>& counts) { return quadratic_weighted_kappa(to_confusion(counts)); });
  m.def("accuracy", [](const std::vector<std::vector<long>>& counts) { return accuracy(to_confusion(counts)); });

  m.def(
      "laplace_estimate",
      [](const std::vector<int>& counts, int target_class) {
        const auto e = laplace_estimate(ClassDistribution(counts), target_class, static_cast<int>(counts.size()));
        return py::make_tuple(e.numerator, e.denominator, e.value);
      },
      py::arg("counts"), py::arg("target_class"));

  py::class_<DecisionTree>(m, "DecisionTree")
      .def_property_readonly("feature_names", &DecisionTree::feature_names)
      .def_property_readonly("num_classes", &DecisionTree::num_classes)
      .def_property_readonly("depth", &DecisionTree::depth)
      .def("leaf_count", &DecisionTree::leaf_count)
      .def("predict", py::overload_cast<const std::map<std::string, double>&>(&DecisionTree::predict, py::const_))
      .def("route",
           [](const DecisionTree& t, const std::map<std::string, double>& v) { return t.route(t.vector_from(v)); })
      .def("to_json", [](const DecisionTree& t) { return dump_json(tree_to_json(t)); })
      .def("render_svg", &render_tree);

  m.def(
      "build_tree",
      [](const LabeledDataset& d, const std::string& criterion, int max_depth, int min_leaf) {
        return build_tree(d.training_set(), TreeParams{parse_criterion(criterion), max_depth, min_leaf});
      },
      py::arg("dataset"), py::arg("criterion") = "ig", py::arg("max_depth") = 5, py::arg("min_leaf") = 1);
  m.def("tree_from_json", [](const std::string& text) { return tree_from_json(Json::parse(text)); });

  m.def(
      "evaluate_json",
      [](const DecisionTree& t, const LabeledDataset& test) { return dump_json(to_json(evaluate(t, test.training_set()))); },
      py::arg("tree"), py::arg("test"));
  m.def(
      "strategy_report_json",
      [](const DecisionTree& t, const LabeledDataset& d, int target_class,
         std::optional<std::map<std::string, double>> subject) {
        return dump_json(to_json(strategy_report(t, d, target_class, subject)));
      },
      py::arg("tree"), py::arg("dataset"), py::arg("target_class"), py::arg("subject") = py::none());
  m.def(
      "what_if_json",
      [](const DecisionTree& t, const LabeledDataset& d, const std::map<std::string, double>& candidate) {
        return dump_json(to_json(what_if(t, d, candidate)), -1);
      },
      py::arg("tree"), py::arg("dataset"), py::arg("candidate"));

  m.def("run_cli", &run_cli, py::arg("args"),
        "Runs the command-line interface in-process; returns (exit_code, stdout, stderr).");
}

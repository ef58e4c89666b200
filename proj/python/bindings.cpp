// Python module. Convention at this boundary: sample matrices are
// numpy-style (rows are samples), transposed into the column-major core
// layout on the way in and back on the way out.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <utility>
#include <vector>

#include "slnp/baselines.hpp"
#include "slnp/data_io.hpp"
#include "slnp/eigensolve.hpp"
#include "slnp/errors.hpp"
#include "slnp/eval.hpp"
#include "slnp/slnp.hpp"

namespace py = pybind11;
using namespace slnp;

namespace {

Eigen::MatrixXd rows_to_cols(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  return rows.transpose();
}

Eigen::MatrixXd cols_to_rows(const Eigen::MatrixXd& cols) {
  return cols.transpose();
}

LabeledDataset dataset_from_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                 std::vector<int> labels) {
  return make_dataset(rows_to_cols(rows), std::move(labels));
}

}  // namespace

PYBIND11_MODULE(_slnp, m) {
  m.doc() =
      "Supervised dimensionality reduction with jointly learned neighbor "
      "weights, plus classical baselines and the evaluation protocol";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NumericError& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<LabeledDataset>(m, "Dataset")
      .def(py::init(&dataset_from_rows), py::arg("features"), py::arg("labels"),
           "features: (n_samples, n_features) array; labels: ints 0..C-1")
      .def_property_readonly(
          "features",
          [](const LabeledDataset& ds) { return cols_to_rows(ds.features); })
      .def_property_readonly(
          "labels", [](const LabeledDataset& ds) { return ds.labels; })
      .def_readonly("num_classes", &LabeledDataset::num_classes)
      .def_property_readonly("size", &LabeledDataset::size)
      .def_property_readonly("dim", &LabeledDataset::dim)
      .def("class_size", &LabeledDataset::class_size, py::arg("c"))
      .def("__len__", &LabeledDataset::size)
      .def("__repr__", [](const LabeledDataset& ds) {
        return "Dataset(" + std::to_string(ds.size()) + " samples, " +
               std::to_string(ds.dim()) + " features, " +
               std::to_string(ds.num_classes) + " classes)";
      });

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init([](int k, int d, std::optional<int> d_pca, int max_iters,
                       double rel_tol, double ridge, bool include_self) {
             TrainConfig cfg;
             cfg.k = k;
             cfg.d = d;
             cfg.d_pca = d_pca;
             cfg.max_iters = max_iters;
             cfg.rel_tol = rel_tol;
             cfg.ridge = ridge;
             cfg.include_self = include_self;
             return cfg;
           }),
           py::arg("k") = 5, py::arg("d") = 2, py::arg("d_pca") = std::nullopt,
           py::arg("max_iters") = 30, py::arg("rel_tol") = 1e-6,
           py::arg("ridge") = 1e-8, py::arg("include_self") = true)
      .def_readwrite("k", &TrainConfig::k)
      .def_readwrite("d", &TrainConfig::d)
      .def_readwrite("d_pca", &TrainConfig::d_pca)
      .def_readwrite("max_iters", &TrainConfig::max_iters)
      .def_readwrite("rel_tol", &TrainConfig::rel_tol)
      .def_readwrite("ridge", &TrainConfig::ridge)
      .def_readwrite("include_self", &TrainConfig::include_self);

  py::class_<ProjectionModel>(m, "Model")
      .def_property_readonly(
          "method",
          [](const ProjectionModel& mo) { return method_name(mo.method); })
      .def_property_readonly(
          "mean", [](const ProjectionModel& mo) { return mo.mean; })
      .def_property_readonly(
          "components",
          [](const ProjectionModel& mo) { return cols_to_rows(mo.composed); })
      .def("transform",
           [](const ProjectionModel& mo,
              const Eigen::Ref<const Eigen::MatrixXd>& rows) {
             return cols_to_rows(transform(mo, rows_to_cols(rows)));
           },
           py::arg("features"), "Embed (n_samples, n_features) rows")
      .def("__repr__", [](const ProjectionModel& mo) {
        return "Model(" + method_name(mo.method) + ", " +
               std::to_string(mo.composed.rows()) + " -> " +
               std::to_string(mo.composed.cols()) + ")";
      });

  py::class_<ExperimentReport>(m, "Report")
      .def_readonly("method", &ExperimentReport::method)
      .def_readonly("n_per_class", &ExperimentReport::n_per_class)
      .def_readonly("k", &ExperimentReport::k)
      .def_readonly("d_pca", &ExperimentReport::d_pca)
      .def_readonly("d", &ExperimentReport::d)
      .def_readonly("seeds", &ExperimentReport::seeds)
      .def_readonly("per_seed_rate", &ExperimentReport::per_seed_rate)
      .def_readonly("mean_rate", &ExperimentReport::mean_rate)
      .def_readonly("std_rate", &ExperimentReport::std_rate)
      .def_readonly("per_class_rate", &ExperimentReport::per_class_rate)
      .def_readonly("seconds", &ExperimentReport::seconds)
      .def("__repr__", [](const ExperimentReport& r) {
        return "Report(" + r.method + ", mean_rate=" + format_double(r.mean_rate) +
               ", std_rate=" + format_double(r.std_rate) + ")";
      });

  m.def("fit_slnp",
        [](const LabeledDataset& ds, const TrainConfig& cfg) {
          return fit(ds, cfg).model;
        },
        py::arg("dataset"), py::arg("config") = TrainConfig{});
  m.def("fit_slnp_trace",
        [](const LabeledDataset& ds, const TrainConfig& cfg) {
          FitResult r = fit(ds, cfg);
          std::vector<double> objectives;
          for (const auto& rec : r.trace.records)
            objectives.push_back(rec.objective);
          return py::make_tuple(std::move(r.model), std::move(objectives),
                                r.trace.converged);
        },
        py::arg("dataset"), py::arg("config") = TrainConfig{},
        "Returns (model, per-iteration objectives, converged)");

  m.def("fit_pca",
        [](const LabeledDataset& ds, int d) { return pca_fit(ds, d); },
        py::arg("dataset"), py::arg("d"));
  m.def("fit_lda",
        [](const LabeledDataset& ds, int d, double ridge) {
          return lda_fit(ds, d, ridge);
        },
        py::arg("dataset"), py::arg("d"), py::arg("ridge") = 1e-8);
  m.def("fit_lpp",
        [](const LabeledDataset& ds, int d, double ridge) {
          return lpp_fit(ds, d, {}, ridge);
        },
        py::arg("dataset"), py::arg("d"), py::arg("ridge") = 1e-8);
  m.def("fit_lfda",
        [](const LabeledDataset& ds, int d, double ridge) {
          return lfda_fit(ds, d, {}, ridge);
        },
        py::arg("dataset"), py::arg("d"), py::arg("ridge") = 1e-8);

  m.def("knn_classify",
        [](const Eigen::Ref<const Eigen::MatrixXd>& train_rows,
           const std::vector<int>& train_labels,
           const Eigen::Ref<const Eigen::MatrixXd>& query_rows) {
          return knn_classify(rows_to_cols(train_rows), train_labels,
                              rows_to_cols(query_rows));
        },
        py::arg("train_embedded"), py::arg("train_labels"),
        py::arg("query_embedded"));
  m.def("recognition_rate", &recognition_rate, py::arg("predicted"),
        py::arg("truth"));

  m.def("subsample_per_class",
        [](const LabeledDataset& ds, int n, std::uint64_t seed) {
          Split s = subsample_per_class(ds, n, seed);
          return py::make_tuple(std::move(s.train), std::move(s.test));
        },
        py::arg("dataset"), py::arg("n_per_class"), py::arg("seed") = 0,
        "Balanced split: (train, test)");

  m.def("run_experiment",
        [](const LabeledDataset& ds, const std::string& method,
           const TrainConfig& cfg, int n_per_class,
           const std::vector<std::uint64_t>& seeds) {
          return run_experiment(ds, parse_method(method), cfg, n_per_class,
                                seeds);
        },
        py::arg("dataset"), py::arg("method"), py::arg("config"),
        py::arg("n_per_class"), py::arg("seeds"));

  m.def("synth_two_feature_toy", &synth_two_feature_toy,
        py::arg("n_per_class") = 100, py::arg("noise_scale") = 1.0,
        py::arg("seed") = 0);
  m.def("load_csv", &load_csv, py::arg("path"),
        py::arg("label_column") = "label");
}

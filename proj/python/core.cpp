#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "softboost/boosting.hpp"
#include "softboost/cli.hpp"
#include "softboost/learners.hpp"
#include "softboost/objectives.hpp"
#include "softboost/persist.hpp"
#include "softboost/postprocess.hpp"

namespace py = pybind11;
using namespace softboost;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ValidationError("expected a 2-d array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  std::vector<double> data(a.data(), a.data() + rows * cols);
  return Matrix(rows, cols, std::move(data));
}

Array to_array(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  if (!m.data().empty()) std::memcpy(out.mutable_data(), m.data().data(), m.data().size() * sizeof(double));
  return out;
}

ClassWeights weights_or_uniform(const std::optional<std::vector<double>>& w, std::size_t c) {
  return w ? ClassWeights(*w) : ClassWeights::uniform(c);
}

std::vector<RowKey> to_keys(const py::array_t<int, py::array::c_style | py::array::forcecast>& k) {
  if (k.ndim() != 2 || k.shape(1) != 3) throw ValidationError("keys must have shape (n, 3)");
  std::vector<RowKey> keys(static_cast<std::size_t>(k.shape(0)));
  for (std::size_t i = 0; i < keys.size(); ++i) {
    keys[i] = {k.at(i, 0), k.at(i, 1), k.at(i, 2)};
  }
  return keys;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Soft-label gradient boosting with a Brier-score objective";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("set_num_threads", &set_num_threads, py::arg("n"));

  m.def("softmax", [](const Array& raw) { return to_array(softmax_rows(ScoreMatrix::raw(to_matrix(raw))).values()); },
        py::arg("raw"));

  m.def(
      "brier_score",
      [](const Array& p, const Array& y, std::optional<std::vector<double>> w) {
        auto pm = to_matrix(p);
        const auto c = pm.cols();
        return brier_score(ScoreMatrix::probability(std::move(pm)), SoftLabelMatrix(to_matrix(y)),
                           weights_or_uniform(w, c));
      },
      py::arg("probabilities"), py::arg("labels"), py::arg("weights") = py::none());

  m.def(
      "brier_loss",
      [](const Array& raw, const Array& y, std::optional<std::vector<double>> w) {
        auto rm = to_matrix(raw);
        const auto c = rm.cols();
        return brier_loss(ScoreMatrix::raw(std::move(rm)), SoftLabelMatrix(to_matrix(y)), weights_or_uniform(w, c));
      },
      py::arg("raw"), py::arg("labels"), py::arg("weights") = py::none());

  m.def(
      "brier_grad_hess",
      [](const Array& raw, const Array& y, std::optional<std::vector<double>> w, double hess_min, bool per_instance) {
        auto rm = to_matrix(raw);
        const auto c = rm.cols();
        auto gh = brier_grad_hess(ScoreMatrix::raw(std::move(rm)), SoftLabelMatrix(to_matrix(y)),
                                  weights_or_uniform(w, c), GradOptions{hess_min, per_instance});
        return py::make_tuple(to_array(gh.grad), to_array(gh.hess));
      },
      py::arg("raw"), py::arg("labels"), py::arg("weights") = py::none(), py::arg("hess_min") = kDefaultHessMin,
      py::arg("per_instance") = false);

  m.def(
      "logloss_grad_hess",
      [](const Array& raw, const Array& y, double hess_min) {
        auto gh = logloss_grad_hess(ScoreMatrix::raw(to_matrix(raw)), SoftLabelMatrix(to_matrix(y)),
                                    GradOptions{hess_min, false});
        return py::make_tuple(to_array(gh.grad), to_array(gh.hess));
      },
      py::arg("raw"), py::arg("labels"), py::arg("hess_min") = kDefaultHessMin);

  m.def(
      "resolution_counts",
      [](std::vector<double> row, int k, bool largest_remainder) {
        return resolution_counts(row, Resolution(k),
                                 largest_remainder ? DuplicationMode::largest_remainder : DuplicationMode::floor);
      },
      py::arg("label_row"), py::arg("k"), py::arg("largest_remainder") = false);

  py::class_<BoostedEnsemble>(m, "Booster")
      .def_property_readonly("n_classes", [](const BoostedEnsemble& b) { return b.n_classes; })
      .def_property_readonly("n_features", [](const BoostedEnsemble& b) { return b.n_features; })
      .def_property_readonly("n_rounds", [](const BoostedEnsemble& b) { return b.rounds.size(); })
      .def_property_readonly("best_round", [](const BoostedEnsemble& b) { return b.best_round; })
      .def_readonly("train_history", &BoostedEnsemble::train_history)
      .def_readonly("valid_history", &BoostedEnsemble::valid_history)
      .def(
          "predict",
          [](const BoostedEnsemble& b, const Array& x, std::optional<std::size_t> at_round) {
            return to_array(gbdt_predict(b, to_matrix(x), at_round).values());
          },
          py::arg("x"), py::arg("at_round") = py::none())
      .def(
          "predict_raw",
          [](const BoostedEnsemble& b, const Array& x, std::optional<std::size_t> at_round) {
            return to_array(gbdt_predict_raw(b, to_matrix(x), at_round).values());
          },
          py::arg("x"), py::arg("at_round") = py::none())
      .def("to_json", [](const BoostedEnsemble& b) { return serialize_model(b); })
      .def_static("from_json", &deserialize_gbdt, py::arg("text"));

  m.def(
      "fit_gbdt",
      [](const Array& x, const Array& y, std::optional<std::vector<double>> w, const std::string& objective,
         int n_rounds, double learning_rate, int max_depth, double min_child_weight, double lambda, double subsample,
         double colsample, int early_stopping_rounds, std::uint64_t seed, std::optional<Array> x_valid,
         std::optional<Array> y_valid) {
        BoostConfig cfg;
        cfg.objective = objective_from_string(objective);
        cfg.n_rounds_max = n_rounds;
        cfg.learning_rate = learning_rate;
        cfg.tree.max_depth = max_depth;
        cfg.tree.min_child_weight = min_child_weight;
        cfg.tree.lambda = lambda;
        cfg.tree.colsample = colsample;
        cfg.subsample = subsample;
        cfg.early_stopping_rounds = early_stopping_rounds;
        cfg.seed = seed;
        auto xm = to_matrix(x);
        SoftLabelMatrix ym(to_matrix(y));
        const auto weights = weights_or_uniform(w, ym.cols());
        if (x_valid.has_value() != y_valid.has_value()) {
          throw ValidationError("x_valid and y_valid must be given together");
        }
        Matrix xv;
        SoftLabelMatrix yv;
        if (x_valid) {
          xv = to_matrix(*x_valid);
          yv = SoftLabelMatrix(to_matrix(*y_valid));
        }
        py::gil_scoped_release release;
        if (x_valid) return fit_gbdt(xm, ym, weights, cfg, ValidationSet{xv, yv});
        return fit_gbdt(xm, ym, weights, cfg);
      },
      py::arg("x"), py::arg("labels"), py::arg("weights") = py::none(), py::arg("objective") = "softmax_brier",
      py::arg("n_rounds") = 200, py::arg("learning_rate") = 0.1, py::arg("max_depth") = 6,
      py::arg("min_child_weight") = 1.0, py::arg("reg_lambda") = 1.0, py::arg("subsample") = 1.0,
      py::arg("colsample") = 1.0, py::arg("early_stopping_rounds") = 0, py::arg("seed") = 0,
      py::arg("x_valid") = py::none(), py::arg("y_valid") = py::none());

  py::class_<GaussianNB>(m, "GaussianNB")
      .def("predict", [](const GaussianNB& nb, const Array& x) { return to_array(nb_predict(nb, to_matrix(x)).values()); },
           py::arg("x"))
      .def("to_json", [](const GaussianNB& nb) { return serialize_model(nb); })
      .def_static("from_json", &deserialize_gaussian_nb, py::arg("text"));

  m.def(
      "fit_gaussian_nb",
      [](const Array& x, std::vector<int> labels, std::size_t n_classes) {
        return fit_gaussian_nb(to_matrix(x), labels, n_classes);
      },
      py::arg("x"), py::arg("labels"), py::arg("n_classes"));

  m.def(
      "smooth",
      [](const Array& p, const py::array_t<int, py::array::c_style | py::array::forcecast>& keys,
         std::array<double, 5> kernel) {
        SequenceStructure s(to_keys(keys));
        return to_array(smooth(ScoreMatrix::probability(to_matrix(p)), s, SmoothKernel(kernel)).values());
      },
      py::arg("probabilities"), py::arg("keys"), py::arg("kernel"));

  m.def(
      "fit_smooth_kernel",
      [](const Array& p, const Array& y, const py::array_t<int, py::array::c_style | py::array::forcecast>& keys,
         std::optional<std::vector<double>> w) {
        auto pm = to_matrix(p);
        const auto c = pm.cols();
        SequenceStructure s(to_keys(keys));
        auto fit = optimize_smooth_weights(ScoreMatrix::probability(std::move(pm)), SoftLabelMatrix(to_matrix(y)),
                                           weights_or_uniform(w, c), s);
        py::dict out;
        out["kernel"] = fit.kernel.weights();
        out["identity_brier"] = fit.identity_brier;
        out["best_brier"] = fit.best_brier;
        out["sweeps"] = fit.sweeps;
        return out;
      },
      py::arg("probabilities"), py::arg("labels"), py::arg("keys"), py::arg("weights") = py::none());

  m.def("git_blob_hash", &git_blob_hash, py::arg("content"));

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "softboost");
        py::gil_scoped_release release;
        return run_cli(args);
      },
      py::arg("args"));
}

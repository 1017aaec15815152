#include "spatialecon/diagnostics.hpp"
#include "spatialecon/error.hpp"
#include "spatialecon/estimators.hpp"
#include "spatialecon/impacts.hpp"
#include "spatialecon/io.hpp"
#include "spatialecon/simulate.hpp"
#include "spatialecon/weights.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace spatialecon;

namespace {

Dataset make_dataset(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                     std::vector<std::string> names, std::vector<std::string> ids) {
  Dataset d;
  d.y = y;
  d.x = x;
  if (names.empty()) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  }
  if (ids.empty()) {
    for (Eigen::Index i = 0; i < y.size(); ++i) ids.push_back(std::to_string(i + 1));
  }
  d.covariate_names = std::move(names);
  d.ids = std::move(ids);
  d.validate();
  return d;
}

py::dict moran_dict(const MoranResult& m) {
  py::dict d;
  d["statistic"] = m.statistic;
  d["expectation"] = m.expectation;
  d["p_value"] = m.p_value;
  d["n_permutations"] = m.n_permutations;
  d["seed"] = m.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spatial weights, diagnostics, spatial regression and impacts";

  py::register_exception<Error>(m, "SpatialEconError");

  py::enum_<Normalization>(m, "Normalization")
      .value("raw", Normalization::raw)
      .value("row", Normalization::row)
      .value("eigen", Normalization::eigen);

  py::enum_<ModelKind>(m, "ModelKind")
      .value("OLS", ModelKind::OLS)
      .value("SLX", ModelKind::SLX)
      .value("SAR", ModelKind::SAR)
      .value("SEM", ModelKind::SEM)
      .value("SDM", ModelKind::SDM)
      .value("SDEM", ModelKind::SDEM);

  py::class_<SpatialWeights>(m, "SpatialWeights")
      .def_property_readonly("size", &SpatialWeights::size)
      .def_property_readonly("nonzeros", &SpatialWeights::nonzeros)
      .def_property_readonly("normalization", &SpatialWeights::normalization)
      .def_property_readonly("ids", &SpatialWeights::ids)
      .def("dense", &SpatialWeights::dense)
      .def("row_sums", &SpatialWeights::row_sums)
      .def("total_weight", &SpatialWeights::total_weight)
      .def("__len__", &SpatialWeights::size);

  m.def(
      "from_edges",
      [](const std::vector<std::tuple<std::string, std::string, double>>& edges,
         bool symmetrize, std::vector<std::string> ids) {
        std::vector<Edge> list;
        for (const auto& [a, b, wt] : edges) list.push_back({a, b, wt});
        return from_edge_list(list, symmetrize, std::move(ids));
      },
      py::arg("edges"), py::arg("symmetrize") = false,
      py::arg("ids") = std::vector<std::string>{});
  m.def(
      "knn_weights",
      [](const Eigen::MatrixXd& xy, std::size_t k) {
        std::vector<Point> pts;
        for (Eigen::Index i = 0; i < xy.rows(); ++i) pts.push_back({xy(i, 0), xy(i, 1)});
        return knn_weights(pts, k);
      },
      py::arg("coords"), py::arg("k"));
  m.def("rook_lattice", &rook_lattice, py::arg("rows"), py::arg("cols"));
  m.def("row_normalize", &row_normalize);
  m.def("eigen_normalize", &eigen_normalize);
  m.def("spectral_radius",
        [](const SpatialWeights& w) { return spectral_radius(w); });
  m.def("spatial_lag",
        py::overload_cast<const SpatialWeights&, const Eigen::MatrixXd&>(&spatial_lag));
  m.def("islands", [](const SpatialWeights& w) { return detect_islands(w).island_indices; });

  m.def(
      "morans_i",
      [](const SpatialWeights& w, const Eigen::VectorXd& y, std::size_t permutations,
         std::uint64_t seed, const std::string& alternative) {
        py::gil_scoped_release release;
        MoranResult r = morans_i(w, y, permutations, seed, parse_alternative(alternative));
        py::gil_scoped_acquire acquire;
        return moran_dict(r);
      },
      py::arg("w"), py::arg("y"), py::arg("permutations") = 999, py::arg("seed") = 0,
      py::arg("alternative") = "two-sided");

  py::class_<FitResult>(m, "FitResult")
      .def_property_readonly("model", [](const FitResult& f) { return f.spec.kind; })
      .def_readonly("alpha", &FitResult::alpha)
      .def_readonly("beta", &FitResult::beta)
      .def_readonly("theta", &FitResult::theta)
      .def_readonly("rho", &FitResult::rho)
      .def_readonly("lambda_", &FitResult::lambda)
      .def_readonly("sigma2", &FitResult::sigma2)
      .def_readonly("vcov", &FitResult::vcov)
      .def_readonly("parameter_names", &FitResult::parameter_names)
      .def_readonly("loglik", &FitResult::loglik)
      .def_readonly("aic", &FitResult::aic)
      .def_readonly("residuals", &FitResult::residuals)
      .def_readonly("boundary", &FitResult::boundary)
      .def_readonly("warnings", &FitResult::warnings)
      .def("estimates", &FitResult::estimates)
      .def("std_errors", &FitResult::std_errors)
      .def("to_json", [](const FitResult& f) { return io::to_json(f).dump(); });

  m.def(
      "fit",
      [](const std::string& model, const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
         std::optional<SpatialWeights> w, std::vector<std::string> names) {
        const Dataset d = make_dataset(y, x, std::move(names), {});
        const ModelKind kind = parse_model_kind(model);
        py::gil_scoped_release release;
        if (kind == ModelKind::OLS) return fit_ols(d);
        if (!w) throw Error(ErrorCode::InvalidArgument, "weights are required for " + model);
        return fit_model(d, *w, ModelSpec{kind});
      },
      py::arg("model"), py::arg("y"), py::arg("x"), py::arg("w") = py::none(),
      py::arg("names") = std::vector<std::string>{});
  m.def(
      "lr_test",
      [](const FitResult& r, const FitResult& u) {
        const LrTestResult lr = lr_test(r, u);
        return py::make_tuple(lr.statistic, lr.df, lr.p_value);
      });
  m.def(
      "lm_tests",
      [](const FitResult& ols, const SpatialWeights& w) {
        const LmTestResult r = lm_tests(ols, w);
        py::dict d;
        d["lm_lag"] = py::make_tuple(r.lm_lag.statistic, r.lm_lag.p_value);
        d["lm_err"] = py::make_tuple(r.lm_err.statistic, r.lm_err.p_value);
        d["robust_lm_lag"] = py::make_tuple(r.robust_lm_lag.statistic, r.robust_lm_lag.p_value);
        d["robust_lm_err"] = py::make_tuple(r.robust_lm_err.statistic, r.robust_lm_err.p_value);
        return d;
      });
  m.def("log_det", &log_det, py::arg("rho"), py::arg("w"));

  m.def("multiplier_matrix",
        [](double rho, const SpatialWeights& w) { return multiplier_matrix(rho, w).matrix; });
  m.def("partial_effects", &partial_effects, py::arg("fit"), py::arg("w"), py::arg("k"));
  m.def(
      "impacts",
      [](const FitResult& fit, const SpatialWeights& w, std::size_t draws, std::uint64_t seed) {
        ImpactsSummary s;
        {
          py::gil_scoped_release release;
          s = draws > 0 ? impacts_inference(fit, w, draws, seed) : impacts_summary(fit, w);
        }
        return io::to_json(s).dump();
      },
      py::arg("fit"), py::arg("w"), py::arg("draws") = 0, py::arg("seed") = 0);

  m.def(
      "simulate",
      [](const std::string& model, const SpatialWeights& w, const Eigen::VectorXd& beta,
         const Eigen::VectorXd& theta, double rho, double lambda, double sigma,
         std::uint64_t seed) {
        DgpSpec spec;
        spec.kind = parse_model_kind(model);
        spec.beta = beta;
        spec.theta = theta;
        spec.rho = rho;
        spec.lambda = lambda;
        spec.sigma = sigma;
        spec.seed = seed;
        const Dataset d = generate(spec, w);
        return py::make_tuple(d.y, d.x);
      },
      py::arg("model"), py::arg("w"), py::arg("beta"),
      py::arg("theta") = Eigen::VectorXd(), py::arg("rho") = 0.0, py::arg("lambda_") = 0.0,
      py::arg("sigma") = 1.0, py::arg("seed") = 0);
}

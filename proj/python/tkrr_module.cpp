#include "tkrr/config.hpp"
#include "tkrr/error.hpp"
#include "tkrr/estimators.hpp"
#include "tkrr/gram.hpp"
#include "tkrr/harness.hpp"
#include "tkrr/kernels.hpp"
#include "tkrr/sampling.hpp"
#include "tkrr/selection.hpp"
#include "tkrr/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tkrr;

namespace {

// Accepts an (n,) or (n, d) array of covariates.
Samples to_samples(const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>& x) {
  Samples out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.emplace_back(x.row(i).transpose());
  return out;
}

Samples samples_arg(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() == 1) {
    Samples out;
    auto r = arr.unchecked<1>();
    for (py::ssize_t i = 0; i < r.shape(0); ++i) out.push_back(make_point(r(i)));
    return out;
  }
  if (arr.ndim() != 2) throw DomainError("covariates must be a 1-D or 2-D array");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      arr.data(), arr.shape(0), arr.shape(1));
  return to_samples(m);
}

Matrix samples_matrix(const Samples& s) {
  const auto d = s.empty() ? 0 : s.front().size();
  Matrix m(static_cast<Eigen::Index>(s.size()), d);
  for (std::size_t i = 0; i < s.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = s[i].transpose();
  return m;
}

Point point_arg(const py::object& o) {
  if (py::isinstance<py::float_>(o) || py::isinstance<py::int_>(o)) return make_point(o.cast<double>());
  return o.cast<Vector>();
}

EigenvalueTable table_arg(const std::vector<double>& v) { return {v, TableSource::empirical}; }

py::dict selection_dict(const SelectionResult& r) {
  py::dict d;
  d["n_trunc"] = r.n_trunc;
  d["lam"] = r.lam;
  d["rule"] = to_string(r.rule);
  d["n"] = r.n;
  d["sigma2"] = r.sigma2;
  d["params"] = r.params;
  d["fixed_point_eps"] = r.fixed_point_eps ? py::cast(*r.fixed_point_eps) : py::none();
  return d;
}

ExperimentConfig config_arg(const std::string& text) { return config_from_json(nlohmann::json::parse(text)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Truncated kernel ridge regression: kernels, spectra, estimators and selection rules";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<KernelSpec>(m, "KernelSpec")
      .def_static("sinc", &KernelSpec::sinc, py::arg("c"))
      .def_static("gaussian", &KernelSpec::gaussian, py::arg("xi"))
      .def_static("tensor", &KernelSpec::tensor, py::arg("base"), py::arg("d"))
      .def_static("parse", &parse_kernel_arg, py::arg("text"))
      .def_property_readonly("dim", &KernelSpec::dim)
      .def("__repr__", [](const KernelSpec& k) { return "KernelSpec(" + k.describe() + ")"; });

  m.def("kernel_eval", [](const KernelSpec& k, const py::object& x, const py::object& y) {
    return eval(k, point_arg(x), point_arg(y));
  }, py::arg("kernel"), py::arg("x"), py::arg("y"));
  m.def("kappa1", &kappa1, py::arg("kernel"));

  py::class_<MeasureSpec>(m, "MeasureSpec")
      .def_static("uniform_cube", &MeasureSpec::uniform_cube, py::arg("d") = 1)
      .def_static("truncated_std_normal", &MeasureSpec::truncated_std_normal)
      .def_static("gaussian", &MeasureSpec::gaussian, py::arg("c"))
      .def_static("centered_normal", &MeasureSpec::centered_normal, py::arg("sigma"))
      .def_property_readonly("dim", &MeasureSpec::dim)
      .def("__repr__", [](const MeasureSpec& ms) { return "MeasureSpec(" + ms.describe() + ")"; });

  m.def("draw", [](const MeasureSpec& ms, int n, std::uint64_t master, std::uint64_t stream) {
    return samples_matrix(draw(ms, n, RngSeed{master, stream}));
  }, py::arg("measure"), py::arg("n"), py::arg("master") = 0, py::arg("stream") = 0);
  m.def("density", [](const MeasureSpec& ms, const py::object& x) { return density(ms, point_arg(x)); },
        py::arg("measure"), py::arg("x"));
  m.def("density_ratio_bound", &density_ratio_bound, py::arg("rho"), py::arg("p"), py::arg("grid_size"));

  m.def("gaussian_eigenvalue", &gaussian_eigenvalue, py::arg("xi"), py::arg("c"), py::arg("k"),
        py::arg("literal_constant") = true);
  m.def("gaussian_eigenfunction", &gaussian_eigenfunction, py::arg("xi"), py::arg("c"), py::arg("k"), py::arg("x"));
  m.def("sinc_eigenvalue_upper_bound", &sinc_eigenvalue_upper_bound, py::arg("c"), py::arg("m"));
  m.def("sinc_dof_estimate", &sinc_dof_estimate, py::arg("c"), py::arg("eps"));
  m.def("nystrom_eigenvalues", [](const KernelSpec& k, const MeasureSpec& ms, int order, int count, bool lebesgue) {
    return nystrom_eigenvalues(k, ms, order, count,
                               lebesgue ? OperatorMeasure::lebesgue : OperatorMeasure::probability).values();
  }, py::arg("kernel"), py::arg("measure"), py::arg("quad_order"), py::arg("count"), py::arg("lebesgue") = false);
  m.def("degrees_of_freedom", [](const std::vector<double>& t, double eps) {
    return degrees_of_freedom(table_arg(t), eps);
  }, py::arg("table"), py::arg("eps"));
  m.def("tensor_top_eigenvalues", [](const std::vector<double>& t, int d, int count, bool truncated) {
    return tensor_top_eigenvalues(table_arg(t), d, count, truncated ? TailPolicy::truncated : TailPolicy::complete)
        .values();
  }, py::arg("base"), py::arg("d"), py::arg("m"), py::arg("truncated") = false);

  m.def("gram_full", [](const KernelSpec& k, const py::array_t<double>& x) {
    return build_full(k, samples_arg(x)).entries;
  }, py::arg("kernel"), py::arg("samples"));
  m.def("gram_truncated", [](const KernelSpec& k, const py::array_t<double>& x, int n_trunc) {
    return build_truncated(k, samples_arg(x), n_trunc).entries;
  }, py::arg("kernel"), py::arg("samples"), py::arg("n_trunc"));
  m.def("gram_eigvals", [](const KernelSpec& k, const py::array_t<double>& x) {
    return eigvals_desc(build_full(k, samples_arg(x))).values();
  }, py::arg("kernel"), py::arg("samples"));
  m.def("gram_singvals", [](const KernelSpec& k, const py::array_t<double>& x, int n_trunc) {
    return singvals_desc(build_truncated(k, samples_arg(x), n_trunc)).values();
  }, py::arg("kernel"), py::arg("samples"), py::arg("n_trunc"));
  m.def("trace_tail", [](const std::vector<double>& t, int k) { return trace_tail(table_arg(t), k); },
        py::arg("table"), py::arg("k"));
  m.def("statistical_dimension", [](const std::vector<double>& t, double lam) {
    return statistical_dimension(table_arg(t), lam);
  }, py::arg("table"), py::arg("lam"));

  py::class_<TkrrModel>(m, "TkrrModel")
      .def_readonly("weights", &TkrrModel::weights)
      .def_readonly("lam", &TkrrModel::lam)
      .def_readonly("n", &TkrrModel::n)
      .def_property_readonly("n_trunc", &TkrrModel::n_trunc)
      .def("predict", [](const TkrrModel& model, const py::array_t<double>& x) {
        return predict_tkrr(model, samples_arg(x));
      }, py::arg("x"));
  py::class_<KrrModel>(m, "KrrModel")
      .def_readonly("coeffs", &KrrModel::coeffs)
      .def_readonly("lam", &KrrModel::lam)
      .def("predict", [](const KrrModel& model, const py::array_t<double>& x) {
        return predict_krr(model, samples_arg(x));
      }, py::arg("x"));

  m.def("fit_tkrr", [](const KernelSpec& k, const py::array_t<double>& x, const Vector& y, int n_trunc, double lam) {
    return fit_tkrr(k, samples_arg(x), y, n_trunc, lam);
  }, py::arg("kernel"), py::arg("samples"), py::arg("y"), py::arg("n_trunc"), py::arg("lam"));
  m.def("fit_krr", [](const KernelSpec& k, const py::array_t<double>& x, const Vector& y, double lam) {
    return fit_krr(k, samples_arg(x), y, lam);
  }, py::arg("kernel"), py::arg("samples"), py::arg("y"), py::arg("lam"));
  m.def("fit_generalized_ridge", &fit_generalized_ridge, py::arg("k1"), py::arg("k2"), py::arg("y"), py::arg("lam"),
        py::arg("n"));

  m.def("select_exponential", [](double b, int n_b, int n, double sigma2) {
    return selection_dict(select_exponential(b, n_b, n, sigma2));
  }, py::arg("b"), py::arg("n_b"), py::arg("n"), py::arg("sigma2"));
  m.def("select_polynomial", [](double s, int n_s, double a, int n, double sigma2) {
    return selection_dict(select_polynomial(s, n_s, a, n, sigma2));
  }, py::arg("s"), py::arg("n_s"), py::arg("a"), py::arg("n"), py::arg("sigma2"));
  m.def("refined_truncation_sinc", [](double c, int n, double sigma2) {
    return selection_dict(refined_truncation_sinc(c, n, sigma2));
  }, py::arg("c"), py::arg("n"), py::arg("sigma2"));
  m.def("refined_truncation_general", [](const std::vector<double>& t, double a, int n, double sigma2) {
    return selection_dict(refined_truncation_general(table_arg(t), a, n, sigma2));
  }, py::arg("table"), py::arg("a"), py::arg("n"), py::arg("sigma2"));
  m.def("empirical_risk", &empirical_risk, py::arg("predictions"), py::arg("truth"));
  m.def("rate_bound", py::overload_cast<const std::string&, const std::map<std::string, double>&>(&rate_bound),
        py::arg("kind"), py::arg("params"));

  m.def("run_spectra", [](const std::string& config_json, int threads) {
    const auto out = run_spectra(config_arg(config_json), threads);
    py::dict d;
    d["j"] = out.j;
    d["true_eig"] = out.true_eig;
    d["mean_full_eig"] = out.mean_full_eig;
    d["mean_trunc_sv"] = out.mean_trunc_sv;
    d["tail_full"] = out.tail_full;
    d["tail_trunc"] = out.tail_trunc;
    d["true_eig_source"] = out.true_eig_source;
    return d;
  }, py::arg("config_json"), py::arg("threads") = 1);
  m.def("run_regression", [](const std::string& config_json, int threads) {
    py::list rows;
    for (const auto& r : run_regression(config_arg(config_json), threads)) {
      py::dict d;
      d["sigma"] = r.sigma;
      d["n_trunc"] = r.n_trunc;
      d["lam"] = r.lam;
      d["emp_risk_mean"] = r.empirical;
      d["emp_risk_std"] = r.empirical_std;
      d["rate_bound"] = r.theoretical;
      d["per_realization"] = r.per_realization;
      rows.append(d);
    }
    return rows;
  }, py::arg("config_json"), py::arg("threads") = 1);
  m.def("run_selection_report", [](const std::string& config_json) {
    return selection_json(run_selection_report(config_arg(config_json))).dump();
  }, py::arg("config_json"));
}

#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rkhs/errors.hpp"
#include "rkhs/estimator.hpp"
#include "rkhs/fitting.hpp"
#include "rkhs/geometry.hpp"
#include "rkhs/interpolation.hpp"
#include "rkhs/kernel.hpp"
#include "rkhs/oracle.hpp"
#include "rkhs/serialization.hpp"
#include "rkhs/testbed.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using RowPoints = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Python side uses one point per row; the library stores points as columns.
rkhs::Matrix columns(const RowPoints& rows) { return rows.transpose(); }

rkhs::BoxDomain domain_for(const rkhs::Matrix& pts, const std::optional<std::vector<double>>& lo,
                           const std::optional<std::vector<double>>& hi) {
  const auto d = pts.rows();
  rkhs::Vector a = lo ? Eigen::Map<const rkhs::Vector>(lo->data(), lo->size()).eval()
                      : pts.rowwise().minCoeff().eval();
  rkhs::Vector b = hi ? Eigen::Map<const rkhs::Vector>(hi->data(), hi->size()).eval()
                      : pts.rowwise().maxCoeff().eval();
  if (a.size() != d || b.size() != d) throw rkhs::invalid_argument("domain dimension mismatch");
  return rkhs::BoxDomain(a, b);
}

rkhs::PointSet point_set(const RowPoints& rows, const std::optional<std::vector<double>>& lo,
                         const std::optional<std::vector<double>>& hi) {
  rkhs::Matrix pts = columns(rows);
  rkhs::BoxDomain domain = domain_for(pts, lo, hi);
  return rkhs::PointSet(std::move(pts), std::move(domain));
}

py::object to_python(const rkhs::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

rkhs::EstimatorOptions estimator_options(std::size_t burn_in, bool adaptive, double beta_max,
                                         const std::string& anchor) {
  rkhs::EstimatorOptions options;
  options.burn_in = burn_in;
  options.adaptive_burn_in = adaptive;
  options.beta_max = beta_max;
  if (anchor == "first_fitted_level") {
    options.anchor = rkhs::TailAnchor::first_fitted_level;
  } else if (anchor == "finest_level") {
    options.anchor = rkhs::TailAnchor::finest_level;
  } else {
    throw rkhs::invalid_argument("unknown anchor '" + anchor + "'");
  }
  return options;
}

rkhs::NormTrace make_trace(const rkhs::KernelSpec& spec, const std::vector<RowPoints>& levels,
                           const std::vector<rkhs::Vector>& values,
                           const std::optional<std::vector<double>>& lo,
                           const std::optional<std::vector<double>>& hi, bool jitter) {
  if (levels.empty()) throw rkhs::invalid_argument("no levels");
  std::vector<rkhs::PointSet> sets;
  const rkhs::Matrix finest = columns(levels.back());
  const rkhs::BoxDomain domain = domain_for(finest, lo, hi);
  for (const auto& level : levels) sets.emplace_back(columns(level), domain);
  std::vector<double> h;
  for (const auto& set : sets) h.push_back(rkhs::fill_distance(set));
  rkhs::TraceOptions options;
  options.solve.allow_jitter = jitter;
  return rkhs::build_trace(spec, sets, h, values, options);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "RKHS norm estimation from nested kernel interpolants";

  // Translators run newest first, so subclasses are registered after bases.
  const auto& base = py::register_exception<rkhs::error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<rkhs::divergence_error>(m, "DivergenceError", base.ptr());
  py::register_exception<rkhs::conditioning_error>(m, "ConditioningError", base.ptr());
  py::register_exception<rkhs::fit_error>(m, "FitError", base.ptr());
  const auto& invalid = py::register_exception<rkhs::invalid_argument>(m, "InvalidArgument", base.ptr());
  py::register_exception<rkhs::bound_error>(m, "BoundError", invalid.ptr());

  py::class_<rkhs::KernelSpec>(m, "KernelSpec")
      .def(py::init<int, double>(), "order"_a = 0, "shape"_a = 1.0)
      .def_property_readonly("order", &rkhs::KernelSpec::order)
      .def_property_readonly("shape", &rkhs::KernelSpec::shape)
      .def("radial", &rkhs::KernelSpec::radial, "r"_a)
      .def("smoothness", &rkhs::KernelSpec::smoothness, "dim"_a)
      .def("name", &rkhs::KernelSpec::name)
      .def("__repr__", [](const rkhs::KernelSpec& k) {
        return "KernelSpec(order=" + std::to_string(k.order()) + ", shape=" + std::to_string(k.shape()) + ")";
      });

  m.def(
      "kernel_matrix",
      [](const rkhs::KernelSpec& spec, const RowPoints& points) {
        return rkhs::kernel_matrix(spec, point_set(points, std::nullopt, std::nullopt));
      },
      "spec"_a, "points"_a);

  m.def(
      "fill_distance",
      [](const RowPoints& points, std::optional<std::vector<double>> lo,
         std::optional<std::vector<double>> hi) {
        return rkhs::fill_distance(point_set(points, lo, hi));
      },
      "points"_a, "lo"_a = py::none(), "hi"_a = py::none());

  m.def(
      "separation_distance",
      [](const RowPoints& points) {
        return rkhs::separation_distance(point_set(points, std::nullopt, std::nullopt));
      },
      "points"_a);

  py::class_<rkhs::Interpolant>(m, "Interpolant")
      .def_property_readonly("norm_squared", &rkhs::Interpolant::norm_squared)
      .def_property_readonly("norm", [](const rkhs::Interpolant& s) { return rkhs::rkhs_norm(s); })
      .def_property_readonly("coefficients", &rkhs::Interpolant::coefficients)
      .def_property_readonly("centers",
                             [](const rkhs::Interpolant& s) -> RowPoints {
                               return s.centers().points().transpose();
                             })
      .def("__call__",
           [](const rkhs::Interpolant& s, const RowPoints& x) -> rkhs::Vector {
             return rkhs::evaluate_batch(s, columns(x));
           })
      .def("power",
           [](const rkhs::Interpolant& s, const RowPoints& x) -> rkhs::Vector {
             return rkhs::PowerFunction(s).batch(columns(x));
           })
      .def("error_bound",
           [](const rkhs::Interpolant& s, double c, const RowPoints& x) -> rkhs::Vector {
             return rkhs::ErrorBound(s, c).batch(columns(x));
           },
           "norm_bound"_a, "x"_a)
      .def("to_json", [](const rkhs::Interpolant& s) { return rkhs::json(s).dump(); });

  m.def(
      "interpolate",
      [](const rkhs::KernelSpec& spec, const RowPoints& points, const rkhs::Vector& values,
         bool jitter) {
        rkhs::SolveOptions options;
        options.allow_jitter = jitter;
        return rkhs::interpolate(spec, point_set(points, std::nullopt, std::nullopt), values,
                                 options);
      },
      "spec"_a, "points"_a, "values"_a, "jitter"_a = false);

  m.def(
      "power_function",
      [](const rkhs::KernelSpec& spec, const RowPoints& points, const RowPoints& x) -> rkhs::Vector {
        return rkhs::PowerFunction(spec, point_set(points, std::nullopt, std::nullopt)).batch(columns(x));
      },
      "spec"_a, "points"_a, "x"_a);

  m.def(
      "fit_saturating",
      [](const std::vector<double>& h, const std::vector<double>& y, std::size_t burn_in,
         double beta_max) {
        rkhs::SaturatingFitOptions options;
        options.burn_in = burn_in;
        options.beta_max = beta_max;
        return to_python(rkhs::fit_saturating(h, y, options));
      },
      "h"_a, "y"_a, "burn_in"_a = 0, "beta_max"_a = 6.0);

  m.def(
      "fit_powerlaw",
      [](const std::vector<double>& h, const std::vector<double>& y, std::size_t burn_in,
         bool envelope) {
        rkhs::PowerLawFitOptions options;
        options.burn_in = burn_in;
        options.intercept =
            envelope ? rkhs::PowerLawIntercept::envelope : rkhs::PowerLawIntercept::least_squares;
        return to_python(rkhs::fit_powerlaw(h, y, options));
      },
      "h"_a, "y"_a, "burn_in"_a = 0, "envelope"_a = false);

  py::class_<rkhs::NormTrace>(m, "NormTrace")
      .def_property_readonly("nested", [](const rkhs::NormTrace& t) { return t.nested; })
      .def_property_readonly("fill_distances", &rkhs::NormTrace::fill_distances)
      .def_property_readonly("norm_squares", &rkhs::NormTrace::norm_squares)
      .def_property_readonly("increment_norms",
                             [](const rkhs::NormTrace& t) {
                               std::vector<std::optional<double>> out;
                               for (const auto& level : t.levels) out.push_back(level.increment_norm);
                               return out;
                             })
      .def_property_readonly("warnings", [](const rkhs::NormTrace& t) { return t.warnings; })
      .def("__len__", &rkhs::NormTrace::size)
      .def("to_dict", [](const rkhs::NormTrace& t) { return to_python(rkhs::json(t)); });

  m.def("build_trace", &make_trace, "spec"_a, "levels"_a, "values"_a, "lo"_a = py::none(),
        "hi"_a = py::none(), "jitter"_a = false,
        "Interpolate nested point sets (one (n, d) array per level) and record the norm trace.");

  m.def(
      "trace_from_table",
      [](const rkhs::KernelSpec& spec, const std::vector<double>& h,
         const std::vector<double>& norm_squared, std::optional<std::vector<double>> increments) {
        if (h.size() != norm_squared.size()) throw rkhs::invalid_argument("length mismatch");
        rkhs::NormTrace trace;
        trace.spec = spec;
        trace.nested = increments.has_value();
        for (std::size_t i = 0; i < h.size(); ++i) {
          rkhs::TraceLevel level;
          level.fill_distance = h[i];
          level.norm_squared = norm_squared[i];
          if (increments && i > 0) level.increment_norm = increments->at(i - 1);
          trace.levels.push_back(level);
        }
        trace.validate();
        return trace;
      },
      "spec"_a, "h"_a, "norm_squared"_a, "increments"_a = py::none());

  m.def(
      "estimate",
      [](const rkhs::NormTrace& trace, std::size_t burn_in, bool adaptive_burn_in,
         double beta_max, const std::string& anchor) {
        return to_python(rkhs::estimate_norm(
            trace, estimator_options(burn_in, adaptive_burn_in, beta_max, anchor)));
      },
      "trace"_a, "burn_in"_a = 2, "adaptive_burn_in"_a = true, "beta_max"_a = 6.0,
      "anchor"_a = "first_fitted_level");

  m.def(
      "algorithm1",
      [](const rkhs::NormTrace& trace, std::size_t burn_in, bool adaptive_burn_in, double beta_max) {
        return to_python(rkhs::algorithm1(
            trace, estimator_options(burn_in, adaptive_burn_in, beta_max, "first_fitted_level")));
      },
      "trace"_a, "burn_in"_a = 2, "adaptive_burn_in"_a = true, "beta_max"_a = 6.0);

  m.def(
      "algorithm2",
      [](const rkhs::NormTrace& trace, std::size_t burn_in, bool adaptive_burn_in, double beta_max,
         const std::string& anchor) {
        return to_python(rkhs::algorithm2(
            trace, estimator_options(burn_in, adaptive_burn_in, beta_max, anchor)));
      },
      "trace"_a, "burn_in"_a = 2, "adaptive_burn_in"_a = true, "beta_max"_a = 6.0,
      "anchor"_a = "first_fitted_level");

  m.def(
      "exp_kernel_norm",
      [](const std::function<double(double)>& f, const std::function<double(double)>& df, double a,
         double b, double shape, std::vector<double> kinks) {
        return rkhs::exp_kernel_norm(f, df, a, b, shape, 20, kinks);
      },
      "f"_a, "df"_a, "a"_a, "b"_a, "shape"_a = 1.0, "kinks"_a = std::vector<double>{});

  m.def("registry", [] {
    std::vector<std::string> names;
    for (const auto& fn : rkhs::registry()) names.push_back(fn.name);
    return names;
  });

  m.def(
      "sample_function",
      [](const std::string& name, const RowPoints& points) -> rkhs::Vector {
        const rkhs::TestFunction& fn = rkhs::find_test_function(name);
        const rkhs::Matrix pts = columns(points);
        rkhs::Vector out(pts.cols());
        for (Eigen::Index i = 0; i < pts.cols(); ++i) out[i] = fn.f(pts.col(i));
        return out;
      },
      "name"_a, "points"_a);

  m.def(
      "analytic_norm",
      [](const std::string& name, const rkhs::KernelSpec& spec) {
        return rkhs::analytic_norm(rkhs::find_test_function(name), spec);
      },
      "name"_a, "spec"_a);
}

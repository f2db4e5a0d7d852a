#include "rkhs/testbed.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "rkhs/errors.hpp"
#include "rkhs/interpolation.hpp"

namespace rkhs {

namespace {

using std::numbers::pi;

TestFunction univariate(std::string name, std::string label, ScalarFunction f, ScalarFunction df) {
  TestFunction fn;
  fn.name = std::move(name);
  fn.label = std::move(label);
  fn.dim = 1;
  fn.domain = BoxDomain::interval(-1.0, 1.0);
  fn.f1d = f;
  fn.derivative = std::move(df);
  fn.f = [f](PointRef x) { return f(x[0]); };
  return fn;
}

TestFunction bivariate(std::string name, std::string label, std::function<double(double, double)> f) {
  TestFunction fn;
  fn.name = std::move(name);
  fn.label = std::move(label);
  fn.dim = 2;
  fn.domain = BoxDomain::cube(2, 0.0, 1.0);
  fn.f = [f = std::move(f)](PointRef x) { return f(x[0], x[1]); };
  return fn;
}

double franke(double x, double y) {
  return 0.75 * std::exp(-(std::pow(9 * x - 2, 2) + std::pow(9 * y - 2, 2)) / 4.0) +
         0.75 * std::exp(-std::pow(9 * x + 1, 2) / 49.0 - (9 * y + 1) / 10.0) +
         0.5 * std::exp(-(std::pow(9 * x - 7, 2) + std::pow(9 * y - 3, 2)) / 4.0) -
         0.2 * std::exp(-std::pow(9 * x - 4, 2) - std::pow(9 * y - 7, 2));
}

std::vector<TestFunction> build_registry() {
  std::vector<TestFunction> out;

  auto abs = univariate(
      "abs", "|x|", [](double x) { return std::abs(x); },
      [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
  abs.kinks = {0.0};
  abs.true_norms[0] = std::sqrt(7.0 / 3.0);
  abs.outside_rkhs = {1, 2};
  out.push_back(abs);

  auto square = univariate(
      "square", "x^2", [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
  square.true_norms[0] = std::sqrt(38.0 / 15.0);
  out.push_back(square);

  out.push_back(univariate(
      "exp", "exp(-0.5x)", [](double x) { return std::exp(-0.5 * x); },
      [](double x) { return -0.5 * std::exp(-0.5 * x); }));
  out.push_back(univariate(
      "bump", "(x^2-1)^2", [](double x) { return (x * x - 1.0) * (x * x - 1.0); },
      [](double x) { return 4.0 * x * (x * x - 1.0); }));
  out.push_back(univariate(
      "sin", "sin(2 pi x)", [](double x) { return std::sin(2.0 * pi * x); },
      [](double x) { return 2.0 * pi * std::cos(2.0 * pi * x); }));
  out.push_back(univariate(
      "f1", "f1",
      [](double x) { return std::exp(x - 1.0) * (x - 3.0) - std::exp(-1.0 - x) * (x + 3.0) + 4.0; },
      [](double x) { return std::exp(x - 1.0) * (x - 2.0) + std::exp(-1.0 - x) * (x + 2.0); }));

  out.push_back(bivariate("f2", "sin(pi x1) sin(pi x2)",
                          [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); }));
  out.push_back(bivariate("paraboloid", "x1^2+x2^2+1",
                          [](double x, double y) { return x * x + y * y + 1.0; }));
  out.push_back(bivariate("franke", "franke", franke));
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string cell_name(const ExperimentCell& cell) {
  return fmt::format("({}, Matérn {})", cell.function, cell.kernel.order());
}

std::optional<DenseReference> try_dense_reference(const TestFunction& fn, const KernelSpec& spec,
                                                  int per_dim) {
  while (per_dim >= 65) {
    try {
      return dense_reference_norm(spec, fn.f, fn.domain, per_dim);
    } catch (const conditioning_error&) {
      per_dim = (per_dim - 1) / 2 + 1;
    }
  }
  return std::nullopt;
}

// Invariant checks of one finished cell. Findings go to `out`.
void check_cell(const ExperimentCell& cell, const TestFunction& fn, std::vector<std::string>& out) {
  const int order = cell.kernel.order();
  const auto& s = cell.summary;
  const std::string name = cell_name(cell);
  if (!cell.error.empty()) {
    out.push_back(fmt::format("{}: {}", name, cell.error));
    return;
  }
  if (fn.outside_rkhs.count(order)) {
    if (s.membership.classification != Membership::diverging) {
      out.push_back(fmt::format("{}: expected diverging, classified {}", name,
                                to_string(s.membership.classification)));
    }
    return;
  }
  if (fn.dim == 1 && s.membership.classification == Membership::diverging) {
    out.push_back(fmt::format("{}: classified diverging but the norm is finite", name));
  }
  if (!s.alg1) out.push_back(fmt::format("{}: algorithm 1 failed: {}", name, s.alg1_error));
  if (!s.alg2) out.push_back(fmt::format("{}: algorithm 2 failed: {}", name, s.alg2_error));
  if (!s.alg1 || !s.alg2) return;
  const double a1 = s.alg1->norm_estimate;
  const double a2 = s.alg2->norm_estimate;
  if (a2 < a1 - 1e-6) out.push_back(fmt::format("{}: alg2 {:.6f} < alg1 {:.6f}", name, a2, a1));
  if (fn.dim != 1) return;

  if (cell.reference_kind == "analytic") {
    const double t = *cell.reference;
    if (a1 < 0.995 * t || a1 > 1.005 * t) {
      out.push_back(fmt::format("{}: alg1 {:.6f} outside [0.995, 1.005] x true {:.6f}", name, a1, t));
    }
    if (a2 < 0.9995 * t || a2 > 1.02 * t) {
      out.push_back(fmt::format("{}: alg2 {:.6f} outside [0.9995, 1.02] x true {:.6f}", name, a2, t));
    }
  } else {
    if (std::abs(a2 / a1 - 1.0) > 0.02) {
      out.push_back(fmt::format("{}: alg1 {:.6f} and alg2 {:.6f} differ by more than 2%", name, a1, a2));
    }
    if (cell.reference && a2 < 0.9995 * *cell.reference) {
      out.push_back(fmt::format("{}: alg2 {:.6f} below 0.9995 x dense lower bound {:.6f}", name, a2,
                                *cell.reference));
    }
  }

  const double b1 = s.alg1->saturating ? s.alg1->saturating->beta1 : 0.0;
  const double b2 = s.alg2->powerlaw ? s.alg2->powerlaw->beta2 : 0.0;
  const bool band = ((fn.name == "square" || fn.name == "exp") && order <= 2) ||
                    (fn.name == "abs" && order == 0);
  if (band && (b1 < 0.85 || b1 > 1.1 || b2 < 0.42 || b2 > 0.55)) {
    out.push_back(fmt::format("{}: exponents beta1 {:.3f} / beta2 {:.3f} outside [0.85, 1.1] / [0.42, 0.55]",
                              name, b1, b2));
  }
  if (fn.name == "f1" && order == 1 && !(b1 > 2.0)) {
    out.push_back(fmt::format("{}: expected superconvergence beta1 > 2, got {:.3f}", name, b1));
  }
}

std::string fixed5(const std::optional<double>& v) {
  return v ? fmt::format("{:.5f}", *v) : std::string("-");
}

}  // namespace

const std::vector<TestFunction>& registry() {
  static const std::vector<TestFunction> functions = build_registry();
  return functions;
}

const TestFunction& find_test_function(const std::string& name) {
  for (const auto& fn : registry()) {
    if (fn.name == name) return fn;
  }
  std::string known;
  for (const auto& fn : registry()) known += (known.empty() ? "" : ", ") + fn.name;
  throw invalid_argument(fmt::format("unknown test function '{}' (known: {})", name, known));
}

std::optional<double> analytic_norm(const TestFunction& fn, const KernelSpec& spec) {
  if (fn.outside_rkhs.count(spec.order())) return std::nullopt;
  if (spec.order() == 0 && fn.dim == 1 && fn.derivative) {
    return exp_kernel_norm(fn.f1d, fn.derivative, fn.domain.lo()[0], fn.domain.hi()[0], spec.shape(),
                           20, fn.kinks);
  }
  if (spec.shape() == 1.0) {
    auto it = fn.true_norms.find(spec.order());
    if (it != fn.true_norms.end()) return it->second;
  }
  return std::nullopt;
}

std::vector<Vector> evaluate_levels(const TestFunction& fn, const std::vector<PointSet>& levels) {
  std::vector<Vector> out;
  for (const auto& level : levels) {
    Vector v(static_cast<Eigen::Index>(level.size()));
    for (std::size_t i = 0; i < level.size(); ++i) v[static_cast<Eigen::Index>(i)] = fn.f(level.point(i));
    out.push_back(std::move(v));
  }
  return out;
}

ExperimentTable run_table_experiments(const TableConfig& config) {
  std::vector<const TestFunction*> functions;
  if (config.functions.empty()) {
    for (const auto& fn : registry()) functions.push_back(&fn);
  } else {
    for (const auto& name : config.functions) functions.push_back(&find_test_function(name));
  }
  if (config.kernels.empty()) throw invalid_argument("run_table_experiments: no kernels selected");

  auto level_count = [&](int levels) {
    return config.max_level ? std::min(levels, *config.max_level + 1) : levels;
  };
  const bool strict = !config.max_level || (*config.max_level + 1 >= config.levels_1d &&
                                            *config.max_level + 1 >= config.levels_2d);
  ScheduleOptions schedule_options{config.placement, config.max_points};
  std::map<int, NestedSchedule> schedules;
  auto schedule_for = [&](const TestFunction& fn) -> const NestedSchedule& {
    auto it = schedules.find(fn.dim);
    if (it == schedules.end()) {
      const bool one = fn.dim == 1;
      it = schedules
               .emplace(fn.dim, make_dyadic_schedule(fn.domain, one ? config.base_1d : config.base_2d,
                                                     level_count(one ? config.levels_1d : config.levels_2d),
                                                     schedule_options))
               .first;
    }
    return it->second;
  };

  ExperimentTable table;
  for (const TestFunction* fn : functions) {
    for (const KernelSpec& spec : config.kernels) {
      ExperimentCell cell;
      cell.function = fn->name;
      cell.kernel = spec;
      const auto start = std::chrono::steady_clock::now();
      try {
        cell.trace = build_trace(spec, schedule_for(*fn), fn->f, config.trace);
        cell.summary = estimate_norm(cell.trace, config.estimator);
        if (auto exact = analytic_norm(*fn, spec)) {
          cell.reference = exact;
          cell.reference_kind = "analytic";
        } else if (config.dense_reference && fn->dim == 1 && !fn->outside_rkhs.count(spec.order())) {
          if (auto dense = try_dense_reference(*fn, spec, config.reference_points_1d)) {
            cell.reference = dense->norm;
            cell.reference_kind = fmt::format("dense {}", dense->points);
          }
        }
      } catch (const error& e) {
        cell.error = e.what();
      }
      cell.wall_seconds = seconds_since(start);
      check_cell(cell, *fn, strict ? table.failures : table.advisories);
      table.cells.push_back(std::move(cell));
    }
  }
  if (!strict && !table.advisories.empty()) {
    table.advisories.insert(table.advisories.begin(),
                            "coarse schedules (--max-level): accuracy checks reported as advisories");
  }
  return table;
}

std::string format_summary(const ExperimentTable& table) {
  std::ostringstream out;
  out << fmt::format("{:<12} {:<9} {:>11} {:>11} {:>11} {:>8} {:>8}  {:<13} {}\n", "function", "kernel",
                     "alg1", "alg2", "reference", "beta1", "beta2", "membership", "levels");
  for (const auto& cell : table.cells) {
    const auto& s = cell.summary;
    std::optional<double> a1, a2, b1, b2;
    if (s.alg1) a1 = s.alg1->norm_estimate;
    if (s.alg2) a2 = s.alg2->norm_estimate;
    if (s.alg1 && s.alg1->saturating && !s.alg1->exact) b1 = s.alg1->saturating->beta1;
    if (s.alg2 && s.alg2->powerlaw) b2 = s.alg2->powerlaw->beta2;
    const bool diverging = s.membership.classification == Membership::diverging;
    out << fmt::format("{:<12} {:<9} {:>11} {:>11} {:>11} {:>8} {:>8}  {:<13} {}\n", cell.function,
                       cell.kernel.name(), diverging ? "-" : fixed5(a1), diverging ? "-" : fixed5(a2),
                       cell.reference ? fixed5(cell.reference) : std::string(diverging ? "inf" : "-"),
                       b1 ? fmt::format("{:.3f}", *b1) : "-", b2 ? fmt::format("{:.3f}", *b2) : "-",
                       cell.error.empty() ? to_string(s.membership.classification) : "error",
                       cell.trace.size());
  }
  if (table.failures.empty()) {
    out << "\nall invariant checks passed\n";
  } else {
    out << "\nFAILED checks:\n";
    for (const auto& f : table.failures) out << "  " << f << '\n';
  }
  if (!table.advisories.empty()) {
    out << "\nadvisories:\n";
    for (const auto& a : table.advisories) out << "  " << a << '\n';
  }
  bool header = false;
  for (const auto& cell : table.cells) {
    std::vector<std::string> notes = cell.trace.warnings;
    if (!cell.error.empty()) notes.push_back(cell.error);
    for (const auto* report : {&cell.summary.alg1, &cell.summary.alg2}) {
      if (*report) notes.insert(notes.end(), (*report)->diagnostics.begin(), (*report)->diagnostics.end());
    }
    if (!cell.summary.alg1_error.empty()) notes.push_back("alg1: " + cell.summary.alg1_error);
    if (!cell.summary.alg2_error.empty()) notes.push_back("alg2: " + cell.summary.alg2_error);
    if (notes.empty()) continue;
    if (!header) out << "\nnotes:\n";
    header = true;
    for (const auto& n : notes) out << "  " << cell_name(cell) << ": " << n << '\n';
  }
  return out.str();
}

void write_table_outputs(const ExperimentTable& table, const TableConfig& config,
                         const std::filesystem::path& out_dir) {
  const std::string header = config_header(config.config_echo);
  std::string t1 = header + "function,kernel,alg1,alg2,reference,reference_kind,membership\n";
  std::string t2 = header + "function,kernel,beta1,beta2,superconvergent\n";
  for (const auto& cell : table.cells) {
    const auto& s = cell.summary;
    const bool diverging = s.membership.classification == Membership::diverging;
    std::optional<double> a1, a2;
    if (s.alg1 && !diverging) a1 = s.alg1->norm_estimate;
    if (s.alg2 && !diverging) a2 = s.alg2->norm_estimate;
    std::string reference = cell.reference ? fixed5(cell.reference) : (diverging ? "inf" : "-");
    t1 += fmt::format("{},{},{},{},{},{},{}\n", cell.function, cell.kernel.name(), fixed5(a1), fixed5(a2),
                      reference, cell.reference_kind.empty() ? "-" : cell.reference_kind,
                      cell.error.empty() ? to_string(s.membership.classification) : "error");
    std::optional<double> b1, b2;
    if (!diverging && s.alg1 && s.alg1->saturating && !s.alg1->exact) b1 = s.alg1->saturating->beta1;
    if (!diverging && s.alg2 && s.alg2->powerlaw) b2 = s.alg2->powerlaw->beta2;
    t2 += fmt::format("{},{},{},{},{}\n", cell.function, cell.kernel.name(),
                      b1 ? fmt::format("{:.3f}", *b1) : "-", b2 ? fmt::format("{:.3f}", *b2) : "-",
                      b1 && *b1 > 1.5 ? "yes" : "no");
    if (cell.trace.size() > 0) {
      std::ostringstream trace;
      trace << header;
      cell.trace.write_csv(trace);
      write_file_atomic(out_dir / "traces" / fmt::format("{}_{}.csv", cell.function, cell.kernel.name()),
                        trace.str());
    }
  }
  write_file_atomic(out_dir / "table1.csv", t1);
  write_file_atomic(out_dir / "table2.csv", t2);
  write_file_atomic(out_dir / "summary.txt", header + format_summary(table));
}

CertificationReport certify_from_samples(const SampleSet& samples, const KernelSpec& spec,
                                         const Holdout& holdout, const CertifyOptions& options) {
  if (holdout.points.rows() != samples.dim) {
    throw invalid_argument(fmt::format("holdout points have dimension {} but samples have {}",
                                       holdout.points.rows(), samples.dim));
  }
  if (options.subset_size < 1) throw invalid_argument("certify: subset size must be >= 1");
  const BoxDomain domain = options.domain ? *options.domain : bounding_box(samples);
  if (domain.dim() != samples.dim) throw invalid_argument("certify: domain dimension mismatch");
  const std::vector<PointSet> levels = sample_levels(samples, domain);
  std::vector<double> h;
  for (const auto& level : levels) h.push_back(fill_distance(level));

  CertificationReport report;
  report.trace = build_trace(spec, levels, h, samples.values, options.trace);
  report.diagnostics = report.trace.warnings;
  report.membership = detect_membership(report.trace, options.estimator);
  if (report.membership.classification == Membership::diverging) {
    throw divergence_error("refusing to certify: " + report.membership.reason);
  }
  if (options.override_bound) {
    report.norm_bound = *options.override_bound;
    report.diagnostics.push_back(fmt::format("norm bound overridden to {}", report.norm_bound));
  } else {
    report.estimate = algorithm2(report.trace, options.estimator);
    report.norm_bound = report.estimate->norm_estimate;
  }

  const PointSet& finest = levels.back();
  const Vector& finest_values = samples.values.back();
  std::vector<std::size_t> order(finest.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(options.seed);
  for (std::size_t i = order.size(); i-- > 1;) std::swap(order[i], order[rng() % (i + 1)]);
  const std::size_t k = std::min(options.subset_size, order.size());
  report.subset.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(report.subset.begin(), report.subset.end());

  Matrix pts(samples.dim, static_cast<Eigen::Index>(k));
  Vector vals(static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    pts.col(static_cast<Eigen::Index>(j)) = finest.point(report.subset[j]);
    vals[static_cast<Eigen::Index>(j)] = finest_values[static_cast<Eigen::Index>(report.subset[j])];
  }
  const Interpolant s = interpolate(spec, PointSet(std::move(pts), domain), vals, options.trace.solve);
  report.interpolant_norm = rkhs_norm(s);
  const ErrorBound bound(s, report.norm_bound);

  report.grid = holdout.points;
  report.truth = holdout.values;
  report.prediction = evaluate_batch(s, report.grid);
  report.power = bound.power(report.grid);
  report.bound = report.power * bound.residual_norm();
  for (Eigen::Index m = 0; m < report.grid.cols(); ++m) {
    const double err = std::abs(report.truth[m] - report.prediction[m]);
    report.max_error = std::max(report.max_error, err);
    if (err > report.bound[m] + options.slack) ++report.violations;
    if (report.bound[m] > 0.0) report.max_ratio = std::max(report.max_ratio, err / report.bound[m]);
  }
  return report;
}

void write_bound_surface(std::ostream& out, const CertificationReport& report, bool whitespace) {
  const char* sep = whitespace ? " " : ",";
  if (whitespace) out << "# ";
  for (Eigen::Index a = 0; a < report.grid.rows(); ++a) out << "x_" << a + 1 << sep;
  out << "truth" << sep << "interpolant" << sep << "error" << sep << "power" << sep << "bound\n";
  for (Eigen::Index m = 0; m < report.grid.cols(); ++m) {
    if (whitespace && report.grid.rows() == 2 && m > 0 && report.grid(0, m) < report.grid(0, m - 1)) {
      out << '\n';  // gnuplot scan-line break
    }
    for (Eigen::Index a = 0; a < report.grid.rows(); ++a) out << fmt::format("{:.17g}", report.grid(a, m)) << sep;
    out << fmt::format("{:.17g}{}{:.17g}{}{:.17g}{}{:.17g}{}{:.17g}\n", report.truth[m], sep,
                       report.prediction[m], sep, std::abs(report.truth[m] - report.prediction[m]), sep,
                       report.power[m], sep, report.bound[m]);
  }
}

SampleSet make_samples(const TestFunction& fn, const NestedSchedule& schedule) {
  SampleSet samples;
  samples.dim = fn.dim;
  const auto values = evaluate_levels(fn, schedule.levels);
  for (std::size_t l = 0; l < schedule.levels.size(); ++l) {
    samples.points.push_back(schedule.levels[l].points());
    samples.values.push_back(values[l]);
  }
  return samples;
}

Holdout make_holdout(const TestFunction& fn, int holdout_per_axis) {
  const PointSet grid = tensor_grid(fn.domain, std::vector<int>(static_cast<std::size_t>(fn.dim), holdout_per_axis));
  Holdout out{grid.points(), evaluate_levels(fn, {grid}).front()};
  return out;
}

}  // namespace rkhs

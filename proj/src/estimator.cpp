#include "rkhs/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>

#include <fmt/format.h>

#include "rkhs/errors.hpp"

namespace rkhs {

std::vector<double> NormTrace::fill_distances() const {
  std::vector<double> out;
  for (const auto& level : levels) out.push_back(level.fill_distance);
  return out;
}

std::vector<double> NormTrace::norm_squares() const {
  std::vector<double> out;
  for (const auto& level : levels) out.push_back(level.norm_squared);
  return out;
}

void NormTrace::validate() const {
  if (levels.empty()) throw invalid_argument("trace has no levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& level = levels[i];
    if (!(level.fill_distance > 0.0) || !std::isfinite(level.fill_distance)) {
      throw invalid_argument(fmt::format("trace level {}: fill distance must be positive", i));
    }
    if (!(level.norm_squared >= 0.0) || !std::isfinite(level.norm_squared)) {
      throw invalid_argument(fmt::format("trace level {}: norm_squared must be finite and >= 0", i));
    }
    if (i > 0 && !(level.fill_distance < levels[i - 1].fill_distance)) {
      throw invalid_argument(fmt::format("trace level {}: fill distances must strictly decrease", i));
    }
    if (nested && i > 0 && !level.increment_norm) {
      throw invalid_argument(fmt::format("trace level {}: nested trace without increment norm", i));
    }
    if (level.increment_norm && !(*level.increment_norm >= 0.0)) {
      throw invalid_argument(fmt::format("trace level {}: increment norm must be >= 0", i));
    }
  }
}

std::vector<std::string> NormTrace::consistency_warnings() const {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double prev = levels[i - 1].norm_squared;
    const double cur = levels[i].norm_squared;
    if (cur < prev - 1e-9 * std::max(1.0, prev)) {
      out.push_back(fmt::format("norm^2 decreases from {} to {} at level {}", prev, cur, i));
    }
    if (nested && levels[i].increment_norm) {
      const double inc = *levels[i].increment_norm;
      const double gap = std::abs(cur - prev - inc * inc);
      if (gap > 1e-5 * std::max(cur, 1e-300)) {
        out.push_back(fmt::format(
            "Pythagoras mismatch {:.3g} (relative) at level {}", gap / std::max(cur, 1e-300), i));
      }
    }
  }
  return out;
}

void NormTrace::write_csv(std::ostream& out) const {
  out << "level,h,norm_squared,increment_norm,num_points\n";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& level = levels[i];
    out << i << ',' << fmt::format("{:.17g}", level.fill_distance) << ','
        << fmt::format("{:.17g}", level.norm_squared) << ','
        << (level.increment_norm ? fmt::format("{:.17g}", *level.increment_norm) : std::string())
        << ',' << level.num_points << '\n';
  }
}

namespace {

bool all_nested(const std::vector<PointSet>& levels) {
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    try {
      (void)embed(levels[i], levels[i + 1]);
    } catch (const invalid_argument&) {
      return false;
    }
  }
  return true;
}

Vector sample(const PointSet& points, const Sampler& f) {
  Vector values(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    values[static_cast<Eigen::Index>(i)] = f(points.point(i));
  }
  return values;
}

}  // namespace

NormTrace build_trace(const KernelSpec& spec, const std::vector<PointSet>& levels,
                      const std::vector<double>& fill_distances,
                      const std::vector<Vector>& values, const TraceOptions& options) {
  if (levels.empty()) throw invalid_argument("build_trace: empty schedule");
  if (fill_distances.size() != levels.size() || values.size() != levels.size()) {
    throw invalid_argument("build_trace: need one fill distance and one value vector per level");
  }
  NormTrace trace{spec, all_nested(levels), {}, {}};
  std::unique_ptr<Interpolant> previous;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::unique_ptr<Interpolant> current;
    try {
      current = std::make_unique<Interpolant>(interpolate(spec, levels[i], values[i], options.solve));
    } catch (const conditioning_error& e) {
      const std::string message =
          fmt::format("level {} ({} points): {}", i, levels[i].size(), e.what());
      if (i == 0 || !options.truncate_on_conditioning) {
        throw conditioning_error(message, e.matrix_size(), e.smallest_pivot());
      }
      trace.warnings.push_back(message + fmt::format("; trace truncated to {} levels", i));
      break;
    }
    TraceLevel level;
    level.fill_distance = fill_distances[i];
    level.norm_squared = current->norm_squared();
    level.num_points = levels[i].size();
    level.diagnostics = current->diagnostics();
    if (current->diagnostics().approximate()) {
      trace.warnings.push_back(fmt::format("level {}: solved with jitter {:.3g}, norms approximate",
                                           i, current->diagnostics().jitter_used));
    }
    if (trace.nested && previous) {
      IncrementNorm inc = increment_norm(*previous, *current);
      level.increment_norm = inc.norm;
      for (auto& w : inc.warnings) trace.warnings.push_back(fmt::format("level {}: {}", i, w));
    }
    trace.levels.push_back(level);
    previous = std::move(current);
  }
  for (auto& w : trace.consistency_warnings()) trace.warnings.push_back(std::move(w));
  return trace;
}

NormTrace build_trace(const KernelSpec& spec, const std::vector<PointSet>& levels,
                      const std::vector<double>& fill_distances, const Sampler& f,
                      const TraceOptions& options) {
  std::vector<Vector> values;
  for (const auto& level : levels) values.push_back(sample(level, f));
  return build_trace(spec, levels, fill_distances, values, options);
}

NormTrace build_trace(const KernelSpec& spec, const NestedSchedule& schedule, const Sampler& f,
                      const TraceOptions& options) {
  return build_trace(spec, schedule.levels, schedule.fill_distances, f, options);
}

NormTrace build_trace(const KernelSpec& spec, const std::vector<PointSet>& levels,
                      const Sampler& f, const TraceOptions& options) {
  std::vector<double> h;
  for (const auto& level : levels) h.push_back(fill_distance(level));
  return build_trace(spec, levels, h, f, options);
}

const char* to_string(TailAnchor anchor) {
  return anchor == TailAnchor::finest_level ? "finest_level" : "first_fitted_level";
}

const char* to_string(Membership membership) {
  switch (membership) {
    case Membership::converging:
      return "converging";
    case Membership::diverging:
      return "diverging";
    default:
      return "inconclusive";
  }
}

namespace {

constexpr double constant_tolerance = 1e-10;

void require_levels(const NormTrace& trace, const char* who) {
  trace.validate();
  if (trace.size() < 4) {
    throw invalid_argument(fmt::format("{}: need at least 4 levels (got {})", who, trace.size()));
  }
}

bool constant_norms(const NormTrace& trace) {
  const auto y = trace.norm_squares();
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return *hi - *lo <= constant_tolerance * std::max(*hi, 1e-300) || *hi == 0.0;
}

std::size_t effective_burn_in(std::size_t levels, std::size_t requested) {
  return std::min(requested, levels - 4);
}

void note_burn_in(EstimateReport& report, const EstimatorOptions& options) {
  if (report.burn_in_used < options.burn_in) {
    report.diagnostics.push_back(fmt::format("burn-in reduced from {} to {} to keep 4 fitted levels",
                                             options.burn_in, report.burn_in_used));
  } else if (report.burn_in_used > options.burn_in) {
    report.diagnostics.push_back(fmt::format(
        "burn-in raised from {} to {}: local rates of the leading levels are pre-asymptotic",
        options.burn_in, report.burn_in_used));
  }
}

EstimateReport exact_report(int algorithm, const NormTrace& trace, const std::string& why) {
  EstimateReport report;
  report.algorithm = algorithm;
  report.norm_squared_estimate = trace.levels.back().norm_squared;
  report.norm_estimate = std::sqrt(report.norm_squared_estimate);
  report.last_norm = report.norm_estimate;
  report.exact = true;
  report.diagnostics.push_back(why);
  return report;
}

}  // namespace

std::size_t select_burn_in(const NormTrace& trace, const EstimatorOptions& options) {
  const std::size_t n = trace.size();
  if (n < 4) return 0;
  std::size_t b = effective_burn_in(n, options.burn_in);
  if (!options.adaptive_burn_in || n < 5) return b;
  const auto h = trace.fill_distances();
  const auto y = trace.norm_squares();
  // rate[j] relates the differences d_j and d_{j+1}; NaN when undefined.
  std::vector<double> rate(n - 2, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t j = 0; j + 2 < n; ++j) {
    const double d0 = y[j + 1] - y[j];
    const double d1 = y[j + 2] - y[j + 1];
    if (d0 > 0.0 && d1 > 0.0) rate[j] = std::log(d1 / d0) / std::log(h[j + 1] / h[j]);
  }
  const double reference = 0.5 * (rate[n - 3] + rate[n - 4]);
  if (!std::isfinite(reference) || !(reference > 0.0)) return b;
  auto settled = [&](std::size_t first) {
    for (std::size_t j = first; j + 2 < n; ++j) {
      if (!std::isfinite(rate[j]) || std::abs(rate[j] - reference) > options.rate_tolerance * reference) {
        return false;
      }
    }
    return true;
  };
  while (b < n - 4 && !settled(b)) ++b;
  return b;
}

EstimateReport algorithm1(const NormTrace& trace, const EstimatorOptions& options) {
  require_levels(trace, "algorithm1");
  if (constant_norms(trace)) {
    EstimateReport report =
        exact_report(1, trace, "norms constant across levels: target is captured exactly");
    SaturatingFit fit;
    fit.c1 = report.norm_squared_estimate;
    fit.points_used = trace.size();
    report.saturating = fit;
    return report;
  }
  EstimateReport report;
  report.algorithm = 1;
  report.burn_in_used = select_burn_in(trace, options);
  note_burn_in(report, options);
  SaturatingFitOptions fit_options;
  fit_options.beta_min = options.beta_min;
  fit_options.beta_max = options.beta_max;
  fit_options.burn_in = report.burn_in_used;
  fit_options.log_space = options.log_space;
  SaturatingFit fit = fit_saturating(trace.fill_distances(), trace.norm_squares(), fit_options);
  for (const auto& w : fit.warnings) report.diagnostics.push_back("fit: " + w);
  report.norm_squared_estimate = fit.c1;
  report.norm_estimate = std::sqrt(fit.c1);
  report.last_norm = std::sqrt(trace.levels.back().norm_squared);
  report.saturating = std::move(fit);
  return report;
}

EstimateReport algorithm2(const NormTrace& trace, const EstimatorOptions& options) {
  require_levels(trace, "algorithm2");
  if (!trace.nested) throw invalid_argument("algorithm2: needs a nested trace with increment norms");
  const std::size_t n = trace.size();
  const double last_norm_squared = trace.levels.back().norm_squared;
  const double threshold = options.negligible_increment * std::sqrt(last_norm_squared);
  auto negligible = [&](std::size_t level) { return *trace.levels[level].increment_norm <= threshold; };

  bool any = false;
  for (std::size_t i = 1; i < n; ++i) any = any || !negligible(i);
  if (!any || constant_norms(trace)) {
    EstimateReport report = exact_report(2, trace, "all increments vanish: target is captured exactly");
    report.rho_used = std::pow(trace.levels.back().fill_distance / trace.levels.front().fill_distance,
                               1.0 / static_cast<double>(n - 1));
    return report;
  }
  if (negligible(n - 1)) {
    return exact_report(2, trace, "finest increment vanishes: target is captured exactly");
  }

  EstimateReport report;
  report.algorithm = 2;
  report.burn_in_used = select_burn_in(trace, options);
  note_burn_in(report, options);
  const std::size_t b = report.burn_in_used;

  // Increment between levels j and j+1 is attributed to h_j.
  std::vector<double> h, y;
  for (std::size_t j = b; j + 1 < n; ++j) {
    if (negligible(j + 1)) {
      report.diagnostics.push_back(
          fmt::format("increment at level {} is negligible and left out of the fit", j + 1));
      continue;
    }
    h.push_back(trace.levels[j].fill_distance);
    y.push_back(*trace.levels[j + 1].increment_norm);
  }
  PowerLawFitOptions fit_options;
  fit_options.intercept = options.intercept;
  PowerLawFit fit = fit_powerlaw(h, y, fit_options);
  if (!(fit.beta2 > 0.0)) {
    throw divergence_error(fmt::format(
        "no decay observed: f may lie outside the RKHS (fitted increment exponent {:.4g})",
        fit.beta2));
  }

  const double rho = std::pow(trace.levels.back().fill_distance / trace.levels.front().fill_distance,
                              1.0 / static_cast<double>(n - 1));
  const double q = std::pow(rho, 2.0 * fit.beta2);
  const double first_tail_term = std::pow(evaluate(fit, trace.levels.back().fill_distance), 2);
  report.tail_sum = first_tail_term / (1.0 - q);
  report.rho_used = rho;

  double total = 0.0;
  if (options.anchor == TailAnchor::finest_level) {
    total = last_norm_squared + report.tail_sum;
  } else {
    total = trace.levels[b].norm_squared + report.tail_sum;
    for (std::size_t j = b; j + 1 < n; ++j) {
      total += std::pow(evaluate(fit, trace.levels[j].fill_distance), 2);
    }
    if (total < last_norm_squared) {
      report.diagnostics.push_back(
          "modelled increments undercut the computed norms; anchored at the finest level instead");
      total = last_norm_squared + report.tail_sum;
    }
  }
  report.norm_squared_estimate = total;
  report.norm_estimate = std::sqrt(total);
  report.last_norm = std::sqrt(last_norm_squared);
  report.powerlaw = fit;
  return report;
}

MembershipReport detect_membership(const NormTrace& trace, const EstimatorOptions& options) {
  MembershipReport report;
  trace.validate();
  const std::size_t n = trace.size();
  if (n < 4) {
    report.reason = "fewer than 4 levels";
    return report;
  }
  if (constant_norms(trace)) {
    report.classification = Membership::converging;
    report.reason = "norms constant across levels";
    return report;
  }
  const std::size_t b = select_burn_in(trace, options);
  const auto h = trace.fill_distances();
  const auto y = trace.norm_squares();

  std::vector<double> dh, dy;
  for (std::size_t i = b; i + 1 < n; ++i) {
    const double d = y[i + 1] - y[i];
    if (d > 0.0) {
      dh.push_back(h[i]);
      dy.push_back(d);
    }
  }
  if (dh.size() >= 3) {
    try {
      report.difference_rate = fit_powerlaw(dh, dy).beta2;
      if (report.difference_rate >= 0.1) {
        report.classification = Membership::converging;
        report.reason = fmt::format("norm^2 differences decay like h^{:.3g}", report.difference_rate);
        return report;
      }
      if (report.difference_rate <= 0.0) {
        report.classification = Membership::diverging;
        report.reason = fmt::format(
            "norm^2 differences do not decay (rate {:.3g}): unbounded growth of the interpolant "
            "norms, f is likely outside the RKHS",
            report.difference_rate);
        return report;
      }
    } catch (const error&) {
    }
  }

  const std::vector<double> hf(h.begin() + static_cast<std::ptrdiff_t>(b), h.end());
  const std::vector<double> yf(y.begin() + static_cast<std::ptrdiff_t>(b), y.end());
  report.saturating_rss = std::numeric_limits<double>::infinity();
  try {
    SaturatingFitOptions sat;
    sat.beta_min = options.beta_min;
    sat.beta_max = options.beta_max;
    const SaturatingFit fit = fit_saturating(hf, yf, sat);
    report.saturating_rss = fit.residual_rms * fit.residual_rms * static_cast<double>(hf.size());
  } catch (const error&) {
  }
  report.growth_rss = std::numeric_limits<double>::infinity();
  if (std::all_of(yf.begin(), yf.end(), [](double v) { return v > 0.0; })) {
    try {
      const PowerLawFit growth = fit_powerlaw(hf, yf);
      if (growth.beta2 < 0.0) {
        report.growth_rss = 0.0;
        for (std::size_t i = 0; i < hf.size(); ++i) {
          const double r = yf[i] - evaluate(growth, hf[i]);
          report.growth_rss += r * r;
        }
      }
    } catch (const error&) {
    }
  }
  if (report.growth_rss < report.saturating_rss) {
    report.classification = Membership::diverging;
    report.reason = fmt::format(
        "unbounded growth model a h^-g fits better than saturation (rss {:.3g} vs {:.3g})",
        report.growth_rss, report.saturating_rss);
  } else {
    report.reason = fmt::format("slow decay of norm^2 differences (rate {:.3g})", report.difference_rate);
  }
  return report;
}

EstimateSummary estimate_norm(const NormTrace& trace, const EstimatorOptions& options) {
  EstimateSummary summary;
  summary.membership = detect_membership(trace, options);
  try {
    summary.alg1 = algorithm1(trace, options);
  } catch (const error& e) {
    summary.alg1_error = e.what();
  }
  if (trace.nested) {
    try {
      summary.alg2 = algorithm2(trace, options);
    } catch (const error& e) {
      summary.alg2_error = e.what();
    }
  } else {
    summary.alg2_error = "algorithm 2 needs a nested trace";
  }
  if (summary.membership.classification == Membership::diverging) {
    const std::string warning = "WARNING: trace classified diverging: " + summary.membership.reason;
    if (summary.alg1) summary.alg1->diagnostics.push_back(warning);
    if (summary.alg2) summary.alg2->diagnostics.push_back(warning);
  }
  return summary;
}

}  // namespace rkhs

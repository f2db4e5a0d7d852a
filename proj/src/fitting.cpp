#include "rkhs/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rkhs/errors.hpp"

namespace rkhs {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

struct Linear {
  double c1 = 0.0;
  double c1_prime = 0.0;
  double sse = infinity;
};

class SaturatingProblem {
 public:
  SaturatingProblem(std::vector<double> h, std::vector<double> y, bool log_space)
      : h_(std::move(h)), y_(std::move(y)), w_(y_.size(), 1.0) {
    if (log_space) {
      for (std::size_t i = 0; i < y_.size(); ++i) w_[i] = 1.0 / (y_[i] * y_[i]);
    }
    y_max_ = *std::max_element(y_.begin(), y_.end());
  }

  Linear solve(double beta) const {
    const std::size_t n = h_.size();
    std::vector<double> g(n);
    double sw = 0.0, gbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = std::pow(h_[i], beta);
      sw += w_[i];
      gbar += w_[i] * g[i];
      ybar += w_[i] * y_[i];
    }
    gbar /= sw;
    ybar /= sw;
    double sgg = 0.0, sgy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sgg += w_[i] * (g[i] - gbar) * (g[i] - gbar);
      sgy += w_[i] * (g[i] - gbar) * (y_[i] - ybar);
    }
    Linear out;
    if (!(sgg > 0.0)) return out;
    out.c1_prime = -sgy / sgg;
    if (!(out.c1_prime > 0.0)) return Linear{};
    out.c1 = ybar + out.c1_prime * gbar;
    if (out.c1 < y_max_) {
      // Asymptote constrained to sit on or above the data.
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        num += w_[i] * g[i] * (y_max_ - y_[i]);
        den += w_[i] * g[i] * g[i];
      }
      out.c1 = y_max_;
      out.c1_prime = num / den;
    }
    if (!(out.c1_prime > 0.0) || !std::isfinite(out.c1_prime)) return Linear{};
    out.sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y_[i] - (out.c1 - out.c1_prime * g[i]);
      out.sse += w_[i] * r * r;
    }
    return out;
  }

  std::size_t size() const { return h_.size(); }

 private:
  std::vector<double> h_;
  std::vector<double> y_;
  std::vector<double> w_;
  double y_max_;
};

void check_pairs(const std::vector<double>& h, const std::vector<double>& y, const char* who) {
  if (h.size() != y.size()) {
    throw invalid_argument(fmt::format("{}: {} abscissae for {} ordinates", who, h.size(), y.size()));
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !std::isfinite(h[i]) || !std::isfinite(y[i])) {
      throw invalid_argument(fmt::format("{}: pair {} is not finite with h > 0", who, i));
    }
  }
}

}  // namespace

SaturatingFit fit_saturating(const std::vector<double>& h_all, const std::vector<double>& y_all,
                             const SaturatingFitOptions& options) {
  check_pairs(h_all, y_all, "fit_saturating");
  if (!(options.beta_min > 0.0) || !(options.beta_max > options.beta_min) ||
      options.scan_points < 2) {
    throw invalid_argument("fit_saturating: need 0 < beta_min < beta_max and >= 2 scan points");
  }
  if (h_all.size() < options.burn_in + 4) {
    throw fit_error(fmt::format("fit_saturating: need at least 4 pairs after burn-in {} (got {})",
                                options.burn_in, h_all.size()));
  }
  const std::vector<double> h(h_all.begin() + static_cast<std::ptrdiff_t>(options.burn_in), h_all.end());
  const std::vector<double> y(y_all.begin() + static_cast<std::ptrdiff_t>(options.burn_in), y_all.end());

  SaturatingFit fit;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    if (!(h[i + 1] < h[i])) throw invalid_argument("fit_saturating: h must be strictly decreasing");
    if (y[i + 1] < y[i]) {
      fit.warnings.push_back(
          fmt::format("ordinate decreases between pairs {} and {} ({} -> {})", i, i + 1, y[i], y[i + 1]));
    }
  }
  if (options.log_space && *std::min_element(y.begin(), y.end()) <= 0.0) {
    throw invalid_argument("fit_saturating: log-space fitting needs positive ordinates");
  }

  const SaturatingProblem problem(h, y, options.log_space);
  const int m = options.scan_points;
  const double step = (options.beta_max - options.beta_min) / (m - 1);
  int best = -1;
  for (int i = 0; i < m; ++i) {
    const double beta = i == m - 1 ? options.beta_max : options.beta_min + i * step;
    const double sse = problem.solve(beta).sse;
    fit.profile.emplace_back(beta, sse);
    if (sse < infinity && (best < 0 || sse < fit.profile[static_cast<std::size_t>(best)].second)) best = i;
  }
  if (best < 0) {
    throw fit_error("fit_saturating: no beta in range gives a positive c1_prime", fit.profile);
  }

  double lo = fit.profile[static_cast<std::size_t>(std::max(best - 1, 0))].first;
  double hi = fit.profile[static_cast<std::size_t>(std::min(best + 1, m - 1))].first;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - golden * (hi - lo);
  double b = lo + golden * (hi - lo);
  double fa = problem.solve(a).sse;
  double fb = problem.solve(b).sse;
  while (hi - lo > options.beta_tolerance) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - golden * (hi - lo);
      fa = problem.solve(a).sse;
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + golden * (hi - lo);
      fb = problem.solve(b).sse;
    }
  }
  double beta = 0.5 * (lo + hi);
  Linear lin = problem.solve(beta);
  const auto& scan_best = fit.profile[static_cast<std::size_t>(best)];
  if (!(lin.sse <= scan_best.second)) {
    beta = scan_best.first;
    lin = problem.solve(beta);
  }

  fit.c1 = lin.c1;
  fit.c1_prime = lin.c1_prime;
  fit.beta1 = beta;
  fit.points_used = h.size();
  double sse = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double r = y[i] - evaluate(fit, h[i]);
    sse += r * r;
  }
  fit.residual_rms = std::sqrt(sse / static_cast<double>(h.size()));
  if (beta <= options.beta_min + 1e-12 || beta >= options.beta_max - 1e-12) {
    fit.warnings.push_back(fmt::format("beta1 = {} sits on the search boundary [{}, {}]", beta,
                                       options.beta_min, options.beta_max));
  }
  return fit;
}

double evaluate(const SaturatingFit& fit, double h) {
  return fit.c1 - fit.c1_prime * std::pow(h, fit.beta1);
}

const char* to_string(PowerLawIntercept intercept) {
  return intercept == PowerLawIntercept::envelope ? "envelope" : "least_squares";
}

PowerLawFit fit_powerlaw(const std::vector<double>& h_all, const std::vector<double>& y_all,
                         const PowerLawFitOptions& options) {
  check_pairs(h_all, y_all, "fit_powerlaw");
  if (h_all.size() < options.burn_in + 3) {
    throw fit_error(fmt::format("fit_powerlaw: need at least 3 pairs after burn-in {} (got {})",
                                options.burn_in, h_all.size()));
  }
  std::vector<double> lx, ly;
  for (std::size_t i = options.burn_in; i < h_all.size(); ++i) {
    if (!(y_all[i] > 0.0)) {
      throw fit_error(fmt::format(
          "fit_powerlaw: ordinate {} is {}; nonpositive increments mean the target is captured exactly",
          i, y_all[i]));
    }
    lx.push_back(std::log(h_all[i]));
    ly.push_back(std::log(y_all[i]));
  }
  const auto n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw fit_error("fit_powerlaw: all abscissae coincide");

  PowerLawFit fit;
  fit.beta2 = sxy / sxx;
  double intercept = my - fit.beta2 * mx;
  if (options.intercept == PowerLawIntercept::envelope) {
    intercept = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lx.size(); ++i) intercept = std::max(intercept, ly[i] - fit.beta2 * lx[i]);
  }
  fit.c2 = std::exp(intercept);
  fit.intercept = options.intercept;
  fit.points_used = lx.size();
  double sse = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (intercept + fit.beta2 * lx[i]);
    sse += r * r;
  }
  fit.residual_rms_log = std::sqrt(sse / n);
  return fit;
}

double evaluate(const PowerLawFit& fit, double h) { return fit.c2 * std::pow(h, fit.beta2); }

}  // namespace rkhs

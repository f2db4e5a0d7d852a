#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rkhs {

struct SaturatingFitOptions {
  double beta_min = 0.05;
  double beta_max = 6.0;
  int scan_points = 64;
  /// Golden-section stopping width on beta.
  double beta_tolerance = 1e-10;
  /// Leading pairs excluded from the fit.
  std::size_t burn_in = 0;
  /// Minimize relative instead of absolute residuals (weights 1/y^2).
  bool log_space = false;
};

/// y ~ c1 - c1_prime h^beta1.
struct SaturatingFit {
  double c1 = 0.0;
  double c1_prime = 0.0;
  double beta1 = 0.0;
  double residual_rms = 0.0;
  std::size_t points_used = 0;
  /// (beta, sum of squared residuals) over the coarse scan; +inf marks
  /// infeasible betas.
  std::vector<std::pair<double, double>> profile;
  std::vector<std::string> warnings;
};

/// Variable projection: for fixed beta, (c1, c1_prime) solve a linear least
/// squares problem with c1 >= max(y); beta minimizes the profile residual
/// (coarse scan, then golden section). Betas giving c1_prime <= 0 are rejected.
SaturatingFit fit_saturating(const std::vector<double>& h, const std::vector<double>& y,
                             const SaturatingFitOptions& options = {});

double evaluate(const SaturatingFit& fit, double h);

enum class PowerLawIntercept {
  /// Ordinary least squares intercept.
  least_squares,
  /// Smallest intercept that puts the line on or above every data point.
  envelope,
};

const char* to_string(PowerLawIntercept intercept);

struct PowerLawFitOptions {
  std::size_t burn_in = 0;
  PowerLawIntercept intercept = PowerLawIntercept::least_squares;
};

/// y ~ c2 h^beta2, fitted as a line in log-log coordinates.
struct PowerLawFit {
  double c2 = 0.0;
  double beta2 = 0.0;
  double residual_rms_log = 0.0;
  std::size_t points_used = 0;
  PowerLawIntercept intercept = PowerLawIntercept::least_squares;
};

PowerLawFit fit_powerlaw(const std::vector<double>& h, const std::vector<double>& y,
                         const PowerLawFitOptions& options = {});

double evaluate(const PowerLawFit& fit, double h);

}  // namespace rkhs

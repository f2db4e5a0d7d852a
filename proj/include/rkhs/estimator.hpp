#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rkhs/fitting.hpp"
#include "rkhs/geometry.hpp"
#include "rkhs/interpolation.hpp"
#include "rkhs/kernel.hpp"

namespace rkhs {

struct TraceLevel {
  double fill_distance = 0.0;
  double norm_squared = 0.0;
  /// Norm of s_{X_i} - s_{X_{i-1}}; absent on level 0 and for non-nested traces.
  std::optional<double> increment_norm;
  std::size_t num_points = 0;
  SolveDiagnostics diagnostics;
};

struct NormTrace {
  KernelSpec spec;
  bool nested = false;
  std::vector<TraceLevel> levels;
  std::vector<std::string> warnings;

  std::size_t size() const { return levels.size(); }
  std::vector<double> fill_distances() const;
  std::vector<double> norm_squares() const;

  /// Throws invalid_argument unless fill distances strictly decrease, norms
  /// are finite and nonnegative and nested traces carry every increment.
  void validate() const;

  /// Soft invariants: norm monotonicity (1e-9 slack) and, for nested traces,
  /// |norm^2_{i+1} - norm^2_i - increment^2| <= 1e-5 norm^2_{i+1}.
  std::vector<std::string> consistency_warnings() const;

  /// Columns level,h,norm_squared,increment_norm,num_points.
  void write_csv(std::ostream& out) const;
};

using Sampler = std::function<double(PointRef)>;

struct TraceOptions {
  SolveOptions solve;
  /// Keep the completed levels when a finer level fails to factorize.
  bool truncate_on_conditioning = true;
};

/// Interpolates every level and records h and |s|^2; increments are recorded
/// when every level is contained in the next one.
NormTrace build_trace(const KernelSpec& spec, const std::vector<PointSet>& levels,
                      const std::vector<double>& fill_distances,
                      const std::vector<Vector>& values, const TraceOptions& options = {});

NormTrace build_trace(const KernelSpec& spec, const std::vector<PointSet>& levels,
                      const std::vector<double>& fill_distances, const Sampler& f,
                      const TraceOptions& options = {});

NormTrace build_trace(const KernelSpec& spec, const NestedSchedule& schedule, const Sampler& f,
                      const TraceOptions& options = {});

/// Fill distances are measured with fill_distance().
NormTrace build_trace(const KernelSpec& spec, const std::vector<PointSet>& levels,
                      const Sampler& f, const TraceOptions& options = {});

enum class TailAnchor {
  /// |s_{X_b}|^2 plus modelled squared increments from the first fitted level b on.
  first_fitted_level,
  /// |s_{X_n}|^2 plus modelled squared increments beyond the finest level.
  finest_level,
};

const char* to_string(TailAnchor anchor);

struct EstimatorOptions {
  /// Leading levels excluded from both fits; reduced automatically so that at
  /// least 4 levels are fitted.
  std::size_t burn_in = 2;
  /// Skip further leading levels until the local rates of the norm^2
  /// differences settle (see select_burn_in).
  bool adaptive_burn_in = true;
  /// Relative spread of the local rates accepted as settled.
  double rate_tolerance = 0.5;
  double beta_min = 0.05;
  double beta_max = 6.0;
  bool log_space = false;
  PowerLawIntercept intercept = PowerLawIntercept::envelope;
  TailAnchor anchor = TailAnchor::first_fitted_level;
  /// Increments at most this times |s_last| count as zero.
  double negligible_increment = 1e-8;
};

struct EstimateReport {
  int algorithm = 0;
  double norm_estimate = 0.0;
  double norm_squared_estimate = 0.0;
  /// sqrt of the finest computed |s|^2: every estimate is at least this.
  double last_norm = 0.0;
  std::size_t burn_in_used = 0;
  std::optional<SaturatingFit> saturating;
  std::optional<PowerLawFit> powerlaw;
  /// Algorithm 2: modelled squared increments beyond the finest level.
  double tail_sum = 0.0;
  double rho_used = 0.0;
  /// Finite-expansion short cut taken (constant norms or vanishing increments).
  bool exact = false;
  std::vector<std::string> diagnostics;
};

/// Number of leading levels both fits skip: at least options.burn_in, and
/// with adaptive_burn_in further levels until every local rate
/// log(d_{j+1}/d_j) / log(h_{j+1}/h_j) of the differences
/// d_j = |s_{j+1}|^2 - |s_j|^2 in the window lies within rate_tolerance of the
/// mean of the two finest rates. Never leaves fewer than 4 levels.
std::size_t select_burn_in(const NormTrace& trace, const EstimatorOptions& options = {});

/// Saturating fit of |s|^2 against h; returns sqrt(c1).
EstimateReport algorithm1(const NormTrace& trace, const EstimatorOptions& options = {});

/// Power-law fit of the increments plus a geometric tail. Throws
/// divergence_error when the fitted increments do not decay.
EstimateReport algorithm2(const NormTrace& trace, const EstimatorOptions& options = {});

enum class Membership { converging, diverging, inconclusive };

const char* to_string(Membership membership);

struct MembershipReport {
  Membership classification = Membership::inconclusive;
  /// Log-log slope of the positive norm^2 differences against h.
  double difference_rate = 0.0;
  double saturating_rss = 0.0;
  double growth_rss = 0.0;
  std::string reason;
};

MembershipReport detect_membership(const NormTrace& trace, const EstimatorOptions& options = {});

/// Both algorithms and the membership test on one trace. Failures are
/// recorded, not thrown.
struct EstimateSummary {
  MembershipReport membership;
  std::optional<EstimateReport> alg1;
  std::optional<EstimateReport> alg2;
  std::string alg1_error;
  std::string alg2_error;
};

EstimateSummary estimate_norm(const NormTrace& trace, const EstimatorOptions& options = {});

}  // namespace rkhs

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rkhs/estimator.hpp"
#include "rkhs/geometry.hpp"
#include "rkhs/io.hpp"
#include "rkhs/kernel.hpp"
#include "rkhs/oracle.hpp"

namespace rkhs {

struct TestFunction {
  std::string name;
  std::string label;
  int dim = 1;
  BoxDomain domain = BoxDomain::interval(-1.0, 1.0);
  Sampler f;
  /// Univariate functions only.
  ScalarFunction f1d;
  ScalarFunction derivative;
  std::vector<double> kinks;
  /// Closed-form norms keyed by Matérn order (shape 1).
  std::map<int, double> true_norms;
  /// Matérn orders whose RKHS does not contain the function.
  std::set<int> outside_rkhs;
};

/// |x|, x^2, exp(-0.5x), (x^2-1)^2, sin(2 pi x), f1 on [-1,1]; f2,
/// x1^2+x2^2+1 and Franke on [0,1]^2.
const std::vector<TestFunction>& registry();
const TestFunction& find_test_function(const std::string& name);

/// Analytic norm where available: the Matérn 0 Sobolev form for univariate
/// functions, otherwise the closed-form table entry.
std::optional<double> analytic_norm(const TestFunction& fn, const KernelSpec& spec);

/// Function values on every level.
std::vector<Vector> evaluate_levels(const TestFunction& fn, const std::vector<PointSet>& levels);

struct TableConfig {
  std::vector<KernelSpec> kernels{KernelSpec(0), KernelSpec(1), KernelSpec(2)};
  /// Empty selects the whole registry.
  std::vector<std::string> functions;
  GridPlacement placement = GridPlacement::interior;
  int base_1d = 3;
  int levels_1d = 8;
  int base_2d = 1;
  int levels_2d = 6;
  /// Caps the finest level index (0-based) of every schedule.
  std::optional<int> max_level;
  std::size_t max_points = 4225;
  EstimatorOptions estimator;
  TraceOptions trace;
  bool dense_reference = true;
  int reference_points_1d = 2049;
  /// Echoed into every output file.
  std::string config_echo;
};

struct ExperimentCell {
  std::string function;
  KernelSpec kernel;
  NormTrace trace;
  EstimateSummary summary;
  std::optional<double> reference;
  /// "analytic", "dense N" or empty.
  std::string reference_kind;
  double wall_seconds = 0.0;
  std::string error;
};

struct ExperimentTable {
  std::vector<ExperimentCell> cells;
  /// Failed invariant checks; empty means the run passes.
  std::vector<std::string> failures;
  /// Checks relaxed because the schedules are coarser than the defaults.
  std::vector<std::string> advisories;

  bool ok() const { return failures.empty(); }
};

ExperimentTable run_table_experiments(const TableConfig& config);

/// table1.csv, table2.csv, traces/<function>_matern<k>.csv and summary.txt.
void write_table_outputs(const ExperimentTable& table, const TableConfig& config,
                         const std::filesystem::path& out_dir);

std::string format_summary(const ExperimentTable& table);

struct CertifyOptions {
  std::size_t subset_size = 50;
  std::uint64_t seed = 0;
  EstimatorOptions estimator;
  TraceOptions trace;
  /// Replaces the estimated norm bound.
  std::optional<double> override_bound;
  /// Defaults to the bounding box of the samples.
  std::optional<BoxDomain> domain;
  /// Absolute slack added to the bound before counting violations.
  double slack = 1e-9;
};

struct CertificationReport {
  NormTrace trace;
  MembershipReport membership;
  std::optional<EstimateReport> estimate;
  double norm_bound = 0.0;
  double interpolant_norm = 0.0;
  std::vector<std::size_t> subset;
  Matrix grid;
  Vector truth;
  Vector prediction;
  Vector power;
  Vector bound;
  std::size_t violations = 0;
  /// max |f - s| / bound over grid points with a positive bound.
  double max_ratio = 0.0;
  double max_error = 0.0;
  std::vector<std::string> diagnostics;

  bool ok() const { return violations == 0; }
};

/// Algorithm 2 on the nested samples gives the norm bound C; an interpolant
/// on a random subset of the finest level is then checked against
/// |f - s| <= P_X sqrt(C^2 - |s|^2) on the holdout grid. Throws
/// divergence_error for diverging traces and bound_error when C is below the
/// subset interpolant's norm.
CertificationReport certify_from_samples(const SampleSet& samples, const KernelSpec& spec,
                                         const Holdout& holdout, const CertifyOptions& options = {});

/// Columns x_1..x_d, truth, interpolant, error, power, bound. CSV or
/// whitespace-separated.
void write_bound_surface(std::ostream& out, const CertificationReport& report, bool whitespace);

/// Nested dyadic samples of a registry function and a holdout grid with
/// `holdout_per_axis` points per axis (closed placement).
SampleSet make_samples(const TestFunction& fn, const NestedSchedule& schedule);
Holdout make_holdout(const TestFunction& fn, int holdout_per_axis);

}  // namespace rkhs

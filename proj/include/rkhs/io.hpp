#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rkhs/estimator.hpp"
#include "rkhs/geometry.hpp"
#include "rkhs/kernel.hpp"

namespace rkhs {

/// Nested samples grouped by level. Each level lists its full point set.
struct SampleSet {
  int dim = 0;
  std::vector<Matrix> points;  // d x n_l per level
  std::vector<Vector> values;

  std::size_t num_levels() const { return points.size(); }
};

/// Format: optional `#` comment lines, a header `dim,d`, then rows
/// `level,x_1,...,x_d,value`. Levels must be 0..L-1 without gaps.
/// Throws schema_error carrying the offending line number.
SampleSet read_samples_csv(std::istream& in);
SampleSet read_samples_csv(const std::filesystem::path& path);

void write_samples_csv(std::ostream& out, const std::vector<PointSet>& levels,
                       const std::vector<Vector>& values);

/// Smallest box containing every sample.
BoxDomain bounding_box(const SampleSet& samples);

/// Builds the per-level point sets inside `domain` and checks that every
/// level is contained in the next one with identical values on shared points.
std::vector<PointSet> sample_levels(const SampleSet& samples, const BoxDomain& domain);

/// Evaluation points with reference values. Format: header `dim,d`, then rows
/// `x_1,...,x_d,value`.
struct Holdout {
  Matrix points;  // d x m
  Vector values;
};

Holdout read_holdout_csv(std::istream& in);
Holdout read_holdout_csv(const std::filesystem::path& path);
void write_holdout_csv(std::ostream& out, const Matrix& points, const Vector& values);

/// Reads the CSV written by NormTrace::write_csv. The trace is nested iff
/// every level after the first has an increment.
NormTrace read_trace_csv(std::istream& in, const KernelSpec& spec);
NormTrace read_trace_csv(const std::filesystem::path& path, const KernelSpec& spec);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// `# config: <echo>` line, or nothing when the echo is empty.
std::string config_header(const std::string& echo);

}  // namespace rkhs

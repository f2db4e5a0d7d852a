#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "rkhs/geometry.hpp"
#include "rkhs/kernel.hpp"

namespace rkhs {

struct SolveOptions {
  /// Add a diagonal shift when the plain factorization fails. Off by default
  /// because jitter biases the norms.
  bool allow_jitter = false;
  /// Largest accepted max|A alpha - y| / max|y| after the solve.
  double residual_tolerance = 1e-8;
};

struct SolveDiagnostics {
  std::size_t matrix_size = 0;
  /// Smallest Cholesky pivot L(i,i)^2.
  double smallest_pivot = 0.0;
  double jitter_used = 0.0;
  double relative_residual = 0.0;
  /// |alpha^T y - alpha^T A alpha| / alpha^T y.
  double norm_discrepancy = 0.0;
  bool approximate() const { return jitter_used > 0.0; }
};

/// Cholesky factorization A = L L^T of a kernel matrix without pivoting.
class SpdFactorization {
 public:
  /// Throws conditioning_error on a non-positive pivot (after the jitter
  /// ladder when enabled).
  explicit SpdFactorization(const Matrix& a, const SolveOptions& options = {});

  std::size_t size() const { return static_cast<std::size_t>(l_.rows()); }
  double smallest_pivot() const { return smallest_pivot_; }
  double jitter() const { return jitter_; }

  Vector solve(const Vector& b) const;
  /// L^{-1} B, column-wise.
  Matrix solve_lower(const Matrix& b) const;

 private:
  Matrix l_;
  double smallest_pivot_ = 0.0;
  double jitter_ = 0.0;
};

/// Minimum-norm interpolant s = sum_i alpha_i k(., x_i).
class Interpolant {
 public:
  Interpolant(KernelSpec spec, PointSet centers, Vector coefficients, double norm_squared,
              SolveDiagnostics diagnostics = {},
              std::shared_ptr<const SpdFactorization> factorization = nullptr);

  const KernelSpec& spec() const { return spec_; }
  const PointSet& centers() const { return centers_; }
  const Vector& coefficients() const { return coefficients_; }
  double norm_squared() const { return norm_squared_; }
  const SolveDiagnostics& diagnostics() const { return diagnostics_; }

  /// Null for interpolants restored from JSON.
  const std::shared_ptr<const SpdFactorization>& factorization() const { return factorization_; }

  double operator()(PointRef x) const;

 private:
  KernelSpec spec_;
  PointSet centers_;
  Vector coefficients_;
  double norm_squared_;
  SolveDiagnostics diagnostics_;
  std::shared_ptr<const SpdFactorization> factorization_;
};

Interpolant interpolate(const KernelSpec& spec, const PointSet& points, const Vector& values,
                        const SolveOptions& options = {});

double evaluate(const Interpolant& s, PointRef x);
/// Values at every column of `eval` (d x m).
Vector evaluate_batch(const Interpolant& s, const Matrix& eval);

double rkhs_norm(const Interpolant& s);

/// alpha^T A_X alpha, evaluated without forming A_X.
double expansion_norm_squared(const KernelSpec& spec, const PointSet& points,
                              const Vector& coefficients);

struct IncrementNorm {
  /// Norm of s_fine - s_coarse from the union expansion on the fine set.
  double norm = 0.0;
  /// sqrt(max(0, |s_fine|^2 - |s_coarse|^2)), for cross-checking.
  double subtraction_norm = 0.0;
  /// |norm^2 - subtraction^2| / |s_fine|^2.
  double discrepancy = 0.0;
  std::vector<std::string> warnings;
};

/// Relative discrepancy above which increment_norm adds a warning.
inline constexpr double increment_discrepancy_warning = 1e-5;

/// Coarse and fine interpolants must share the kernel, and the coarse centers
/// must be contained in the fine ones.
IncrementNorm increment_norm(const Interpolant& coarse, const Interpolant& fine);

IncrementNorm increment_norm(const KernelSpec& spec, const PointSet& coarse, const PointSet& fine,
                             const Vector& values_fine, const SolveOptions& options = {});

/// P_X(x) = sqrt(k(x,x) - b^T A_X^{-1} b), one factorization for many queries.
class PowerFunction {
 public:
  PowerFunction(const KernelSpec& spec, const PointSet& points, const SolveOptions& options = {});
  /// Reuses the interpolant's factorization when it has one.
  explicit PowerFunction(const Interpolant& s);

  double operator()(PointRef x) const;
  /// One value per column of `eval`.
  Vector batch(const Matrix& eval) const;

 private:
  double finish(double explained) const;

  KernelSpec spec_;
  PointSet points_;
  std::shared_ptr<const SpdFactorization> factorization_;
};

double power_function(const KernelSpec& spec, const PointSet& points, PointRef x);

/// P_X(x) sqrt(C^2 - |s|^2). Throws bound_error if C < |s|.
double error_bound(const Interpolant& s, double norm_bound, PointRef x);
/// P_X(x) C.
double error_bound_loose(const Interpolant& s, double norm_bound, PointRef x);

/// Error bound surface for one interpolant and norm bound.
class ErrorBound {
 public:
  ErrorBound(const Interpolant& s, double norm_bound);

  double norm_bound() const { return norm_bound_; }
  /// sqrt(C^2 - |s|^2).
  double residual_norm() const { return residual_norm_; }

  double operator()(PointRef x) const { return power_(x) * residual_norm_; }
  Vector batch(const Matrix& eval) const { return power_.batch(eval) * residual_norm_; }
  Vector power(const Matrix& eval) const { return power_.batch(eval); }

 private:
  PowerFunction power_;
  double norm_bound_;
  double residual_norm_;
};

}  // namespace rkhs

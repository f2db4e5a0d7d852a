#include "rkhs/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "rkhs/errors.hpp"

namespace rkhs {

namespace {

// Returns -1 on success, otherwise the index of the first non-positive pivot
// together with its value.
std::pair<Eigen::Index, double> try_cholesky(Matrix& l, const Matrix& a) {
  l = a;
  const Eigen::Index fail = Eigen::internal::llt_inplace<double, Eigen::Lower>::blocked(l);
  if (fail < 0) return {-1, 0.0};
  const double pivot = a(fail, fail) - l.row(fail).head(fail).squaredNorm();
  return {fail, pivot};
}

}  // namespace

SpdFactorization::SpdFactorization(const Matrix& a, const SolveOptions& options) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw invalid_argument("SpdFactorization: need a nonempty square matrix");
  }
  const auto n = static_cast<std::size_t>(a.rows());
  auto [fail, pivot] = try_cholesky(l_, a);
  if (fail >= 0 && options.allow_jitter) {
    const double max_diag = a.diagonal().maxCoeff();
    for (double shift = 1e-12 * static_cast<double>(n) * max_diag; shift <= 1e-8 * max_diag;
         shift *= 2.0) {
      Matrix shifted = a;
      shifted.diagonal().array() += shift;
      std::tie(fail, pivot) = try_cholesky(l_, shifted);
      if (fail < 0) {
        jitter_ = shift;
        break;
      }
    }
  }
  if (fail >= 0) {
    throw conditioning_error(
        fmt::format("Cholesky factorization of the {}x{} kernel matrix failed: pivot {} at row {} "
                    "is not positive{}",
                    n, n, pivot, fail, options.allow_jitter ? " even with maximal jitter" : ""),
        n, pivot);
  }
  l_.triangularView<Eigen::StrictlyUpper>().setZero();
  smallest_pivot_ = l_.diagonal().array().square().minCoeff();
}

Vector SpdFactorization::solve(const Vector& b) const {
  Vector x = l_.triangularView<Eigen::Lower>().solve(b);
  l_.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
  return x;
}

Matrix SpdFactorization::solve_lower(const Matrix& b) const {
  return l_.triangularView<Eigen::Lower>().solve(b);
}

Interpolant::Interpolant(KernelSpec spec, PointSet centers, Vector coefficients,
                         double norm_squared, SolveDiagnostics diagnostics,
                         std::shared_ptr<const SpdFactorization> factorization)
    : spec_(spec),
      centers_(std::move(centers)),
      coefficients_(std::move(coefficients)),
      norm_squared_(norm_squared),
      diagnostics_(diagnostics),
      factorization_(std::move(factorization)) {
  if (static_cast<std::size_t>(coefficients_.size()) != centers_.size()) {
    throw invalid_argument("Interpolant: one coefficient per center required");
  }
  if (!(norm_squared_ >= 0.0)) throw invalid_argument("Interpolant: negative norm_squared");
}

double Interpolant::operator()(PointRef x) const {
  return cross_vector(spec_, centers_, x).dot(coefficients_);
}

Interpolant interpolate(const KernelSpec& spec, const PointSet& points, const Vector& values,
                        const SolveOptions& options) {
  if (static_cast<std::size_t>(values.size()) != points.size()) {
    throw invalid_argument(fmt::format("interpolate: {} values for {} points", values.size(),
                                       points.size()));
  }
  if (!values.allFinite()) throw invalid_argument("interpolate: values must be finite");
  const Matrix a = kernel_matrix(spec, points);
  auto factorization = std::make_shared<const SpdFactorization>(a, options);
  Vector alpha = factorization->solve(values);

  SolveDiagnostics diag;
  diag.matrix_size = points.size();
  diag.smallest_pivot = factorization->smallest_pivot();
  diag.jitter_used = factorization->jitter();

  Vector a_alpha = a * alpha;
  const double scale = values.cwiseAbs().maxCoeff();
  const double residual_abs = (a_alpha - values).cwiseAbs().maxCoeff();
  diag.relative_residual = scale > 0.0 ? residual_abs / scale : residual_abs;
  // The jittered system is solved exactly; measure against it.
  if (diag.jitter_used > 0.0) {
    a_alpha += diag.jitter_used * alpha;
    diag.relative_residual =
        (a_alpha - values).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
  }
  if (diag.relative_residual > options.residual_tolerance) {
    throw conditioning_error(
        fmt::format("interpolation residual {:.3g} exceeds tolerance {:.3g} ({} points, "
                    "smallest pivot {:.3g})",
                    diag.relative_residual, options.residual_tolerance, points.size(),
                    diag.smallest_pivot),
        points.size(), diag.smallest_pivot);
  }
  const double norm_squared = std::max(0.0, alpha.dot(values));
  const double quadratic = alpha.dot(a * alpha);
  diag.norm_discrepancy =
      norm_squared > 0.0 ? std::abs(norm_squared - quadratic) / norm_squared : std::abs(quadratic);
  return Interpolant(spec, points, std::move(alpha), norm_squared, diag, std::move(factorization));
}

double evaluate(const Interpolant& s, PointRef x) { return s(x); }

Vector evaluate_batch(const Interpolant& s, const Matrix& eval) {
  return cross_matrix(s.spec(), s.centers(), eval) * s.coefficients();
}

double rkhs_norm(const Interpolant& s) { return std::sqrt(s.norm_squared()); }

double expansion_norm_squared(const KernelSpec& spec, const PointSet& points,
                              const Vector& coefficients) {
  if (static_cast<std::size_t>(coefficients.size()) != points.size()) {
    throw invalid_argument("expansion_norm_squared: one coefficient per point required");
  }
  const Matrix& x = points.points();
  const auto n = static_cast<Eigen::Index>(points.size());
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < j; ++i) off += coefficients[i] * spec.radial((x.col(i) - x.col(j)).norm());
    sum += coefficients[j] * (spec.radial(0.0) * coefficients[j] + 2.0 * off);
  }
  return sum;
}

IncrementNorm increment_norm(const Interpolant& coarse, const Interpolant& fine) {
  if (!(coarse.spec() == fine.spec())) {
    throw invalid_argument("increment_norm: interpolants use different kernels");
  }
  const std::vector<std::size_t> where = embed(coarse.centers(), fine.centers());
  Vector d = fine.coefficients();
  for (std::size_t i = 0; i < where.size(); ++i) {
    d[static_cast<Eigen::Index>(where[i])] -= coarse.coefficients()[static_cast<Eigen::Index>(i)];
  }
  IncrementNorm out;
  out.norm = std::sqrt(std::max(0.0, expansion_norm_squared(fine.spec(), fine.centers(), d)));
  const double gap = fine.norm_squared() - coarse.norm_squared();
  out.subtraction_norm = std::sqrt(std::max(0.0, gap));
  const double scale = fine.norm_squared() > 0.0 ? fine.norm_squared() : 1.0;
  out.discrepancy = std::abs(out.norm * out.norm - gap) / scale;
  if (out.discrepancy > increment_discrepancy_warning) {
    out.warnings.push_back(fmt::format(
        "increment norm discrepancy {:.3g} between union expansion and norm subtraction "
        "({} -> {} points): ill-conditioned solve",
        out.discrepancy, coarse.centers().size(), fine.centers().size()));
  }
  return out;
}

IncrementNorm increment_norm(const KernelSpec& spec, const PointSet& coarse, const PointSet& fine,
                             const Vector& values_fine, const SolveOptions& options) {
  const std::vector<std::size_t> where = embed(coarse, fine);
  if (static_cast<std::size_t>(values_fine.size()) != fine.size()) {
    throw invalid_argument("increment_norm: one value per fine point required");
  }
  Vector values_coarse(static_cast<Eigen::Index>(where.size()));
  for (std::size_t i = 0; i < where.size(); ++i) {
    values_coarse[static_cast<Eigen::Index>(i)] = values_fine[static_cast<Eigen::Index>(where[i])];
  }
  return increment_norm(interpolate(spec, coarse, values_coarse, options),
                        interpolate(spec, fine, values_fine, options));
}

PowerFunction::PowerFunction(const KernelSpec& spec, const PointSet& points,
                             const SolveOptions& options)
    : spec_(spec),
      points_(points),
      factorization_(std::make_shared<const SpdFactorization>(kernel_matrix(spec, points), options)) {}

PowerFunction::PowerFunction(const Interpolant& s)
    : spec_(s.spec()),
      points_(s.centers()),
      factorization_(s.factorization()
                         ? s.factorization()
                         : std::make_shared<const SpdFactorization>(kernel_matrix(s.spec(), s.centers()))) {}

double PowerFunction::finish(double explained) const {
  const double radicand = spec_.radial(0.0) - explained;
  if (radicand < -1e-10) {
    throw conditioning_error(
        fmt::format("power function radicand {:.3g} is negative beyond roundoff", radicand),
        points_.size(), factorization_->smallest_pivot());
  }
  return std::sqrt(std::max(0.0, radicand));
}

double PowerFunction::operator()(PointRef x) const {
  const Vector b = cross_vector(spec_, points_, x);
  return finish(factorization_->solve_lower(b).squaredNorm());
}

Vector PowerFunction::batch(const Matrix& eval) const {
  const Matrix b = cross_matrix(spec_, points_, eval).transpose();
  const Matrix w = factorization_->solve_lower(b);
  Vector out(eval.cols());
  for (Eigen::Index m = 0; m < eval.cols(); ++m) out[m] = finish(w.col(m).squaredNorm());
  return out;
}

double power_function(const KernelSpec& spec, const PointSet& points, PointRef x) {
  return PowerFunction(spec, points)(x);
}

namespace {

double bound_residual(const Interpolant& s, double norm_bound) {
  const double gap = norm_bound * norm_bound - s.norm_squared();
  if (!(norm_bound >= 0.0) || gap < -1e-12 * std::max(1.0, s.norm_squared())) {
    throw bound_error(fmt::format(
        "norm bound {} is below the interpolant norm {}: inconsistent estimate", norm_bound,
        std::sqrt(s.norm_squared())));
  }
  return std::sqrt(std::max(0.0, gap));
}

}  // namespace

double error_bound(const Interpolant& s, double norm_bound, PointRef x) {
  const double r = bound_residual(s, norm_bound);
  return PowerFunction(s)(x) * r;
}

double error_bound_loose(const Interpolant& s, double norm_bound, PointRef x) {
  (void)bound_residual(s, norm_bound);
  return PowerFunction(s)(x) * norm_bound;
}

ErrorBound::ErrorBound(const Interpolant& s, double norm_bound)
    : power_(s), norm_bound_(norm_bound), residual_norm_(bound_residual(s, norm_bound)) {}

}  // namespace rkhs

#include "rkhs/kernel.hpp"

#include <cmath>

#include <fmt/format.h>

#include "rkhs/errors.hpp"

namespace rkhs {

KernelSpec::KernelSpec(int order, double shape) : order_(order), shape_(shape) {
  if (order < 0 || order > 2) {
    throw invalid_argument(fmt::format("Matérn order must be 0, 1 or 2 (got {})", order));
  }
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw invalid_argument(fmt::format("kernel shape must be positive (got {})", shape));
  }
}

double KernelSpec::radial(double r) const {
  const double t = shape_ * r;
  const double e = std::exp(-t);
  switch (order_) {
    case 0:
      return e;
    case 1:
      return (1.0 + t) * e;
    default:
      return (1.0 + t + t * t / 3.0) * e;
  }
}

double KernelSpec::operator()(PointRef x, PointRef z) const {
  return radial((x - z).norm());
}

std::string KernelSpec::name() const { return fmt::format("matern{}", order_); }

double eval_kernel(const KernelSpec& spec, PointRef x, PointRef z) {
  if (x.size() != z.size()) {
    throw invalid_argument(
        fmt::format("eval_kernel: dimension mismatch ({} vs {})", x.size(), z.size()));
  }
  return spec(x, z);
}

Matrix kernel_matrix(const KernelSpec& spec, const PointSet& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  const Matrix& x = points.points();
  Matrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    a(j, j) = spec.radial(0.0);
    for (Eigen::Index i = 0; i < j; ++i) {
      a(i, j) = spec.radial((x.col(i) - x.col(j)).norm());
      a(j, i) = a(i, j);
    }
  }
  return a;
}

Vector cross_vector(const KernelSpec& spec, const PointSet& points, PointRef x) {
  if (x.size() != points.dim()) {
    throw invalid_argument(fmt::format("cross_vector: point has dimension {} but centers have {}",
                                       x.size(), points.dim()));
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  Vector b(n);
  for (Eigen::Index i = 0; i < n; ++i) b[i] = spec.radial((points.points().col(i) - x).norm());
  return b;
}

Matrix cross_matrix(const KernelSpec& spec, const PointSet& points, const Matrix& eval) {
  if (eval.rows() != points.dim()) {
    throw invalid_argument("cross_matrix: evaluation points have the wrong dimension");
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix b(eval.cols(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index m = 0; m < eval.cols(); ++m) {
      b(m, i) = spec.radial((points.points().col(i) - eval.col(m)).norm());
    }
  }
  return b;
}

}  // namespace rkhs

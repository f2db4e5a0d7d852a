#pragma once

#include <string>

#include "rkhs/geometry.hpp"

namespace rkhs {

/// Normalized Matérn kernel k(r) = p(eps r) exp(-eps r) with
/// p_0 = 1, p_1 = 1 + t, p_2 = 1 + t + t^2/3.
class KernelSpec {
 public:
  KernelSpec(int order = 0, double shape = 1.0);

  int order() const { return order_; }
  double shape() const { return shape_; }

  /// Kernel value as a function of the distance r >= 0.
  double radial(double r) const;
  double operator()(PointRef x, PointRef z) const;

  /// Sobolev smoothness tau = order + (d + 1) / 2 of the native space.
  double smoothness(int dim) const { return order_ + 0.5 * (dim + 1); }

  std::string name() const;

  friend bool operator==(const KernelSpec& a, const KernelSpec& b) {
    return a.order_ == b.order_ && a.shape_ == b.shape_;
  }

 private:
  int order_;
  double shape_;
};

double eval_kernel(const KernelSpec& spec, PointRef x, PointRef z);

/// Dense symmetric kernel matrix; the upper triangle is evaluated and mirrored.
Matrix kernel_matrix(const KernelSpec& spec, const PointSet& points);

/// (k(x, x_i))_i.
Vector cross_vector(const KernelSpec& spec, const PointSet& points, PointRef x);

/// Kernel values between every column of `eval` and every point: rows index
/// evaluation points, columns index centers.
Matrix cross_matrix(const KernelSpec& spec, const PointSet& points, const Matrix& eval);

}  // namespace rkhs

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rkhs/estimator.hpp"
#include "rkhs/geometry.hpp"
#include "rkhs/kernel.hpp"

namespace rkhs {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;

  double integrate(const std::function<double(double)>& f) const;
};

/// `order`-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

/// Composite rule: [a, b] is split at the breakpoints, each piece into
/// `panels` equal panels with an `order`-point rule. No panel straddles a
/// breakpoint.
QuadratureRule composite_gauss_legendre(double a, double b, const std::vector<double>& breakpoints,
                                        int panels = 16, int order = 20);

using ScalarFunction = std::function<double(double)>;

/// Native-space norm of f on [a, b] for the exponential kernel exp(-eps r):
/// |f|^2 = (1/(2 eps)) int (f'^2 + eps^2 f^2) + (f(a)^2 + f(b)^2) / 2.
double exp_kernel_norm(const ScalarFunction& f, const ScalarFunction& derivative, double a,
                       double b, double eps, int quad_points = 20,
                       const std::vector<double>& kinks = {}, int panels = 16);

struct DenseReference {
  /// Interpolant norm on the per_dim grid: a lower bound on |f|.
  double norm = 0.0;
  /// Same at roughly half resolution, showing the remaining gap.
  double half_resolution_norm = 0.0;
  std::size_t points = 0;
  std::size_t half_resolution_points = 0;
};

DenseReference dense_reference_norm(const KernelSpec& spec, const Sampler& f,
                                    const BoxDomain& domain, int per_dim,
                                    GridPlacement placement = GridPlacement::closed,
                                    const SolveOptions& options = {});

}  // namespace rkhs

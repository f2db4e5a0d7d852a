#include "rkhs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "rkhs/errors.hpp"
#include "rkhs/interpolation.hpp"

namespace rkhs {

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
  return sum;
}

QuadratureRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw invalid_argument("gauss_legendre: order must be >= 1");
  if (!(a < b)) throw invalid_argument("gauss_legendre: need a < b");
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    rule.nodes[lo] = mid - half * x;
    rule.nodes[hi] = mid + half * x;
    rule.weights[lo] = half * w;
    rule.weights[hi] = half * w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(double a, double b, const std::vector<double>& breakpoints,
                                        int panels, int order) {
  if (panels < 1) throw invalid_argument("composite_gauss_legendre: panels must be >= 1");
  std::vector<double> cuts{a};
  std::vector<double> inner(breakpoints);
  std::sort(inner.begin(), inner.end());
  for (double c : inner) {
    if (c > a && c < b && c > cuts.back()) cuts.push_back(c);
  }
  cuts.push_back(b);
  QuadratureRule rule;
  rule.order = order;
  for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
    const double width = (cuts[piece + 1] - cuts[piece]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = cuts[piece] + p * width;
      const double hi = p == panels - 1 ? cuts[piece + 1] : lo + width;
      const QuadratureRule panel = gauss_legendre(order, lo, hi);
      rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
      rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
    }
  }
  return rule;
}

double exp_kernel_norm(const ScalarFunction& f, const ScalarFunction& derivative, double a,
                       double b, double eps, int quad_points, const std::vector<double>& kinks,
                       int panels) {
  if (!f) throw invalid_argument("exp_kernel_norm: missing function handle");
  if (!derivative) throw invalid_argument("exp_kernel_norm: missing derivative handle");
  if (!(eps > 0.0)) throw invalid_argument("exp_kernel_norm: eps must be positive");
  const QuadratureRule rule = composite_gauss_legendre(a, b, kinks, panels, quad_points);
  const double integral = rule.integrate([&](double x) {
    const double v = f(x);
    const double dv = derivative(x);
    return dv * dv + eps * eps * v * v;
  });
  const double fa = f(a), fb = f(b);
  return std::sqrt(integral / (2.0 * eps) + 0.5 * (fa * fa + fb * fb));
}

DenseReference dense_reference_norm(const KernelSpec& spec, const Sampler& f,
                                    const BoxDomain& domain, int per_dim, GridPlacement placement,
                                    const SolveOptions& options) {
  if (per_dim < 4) throw invalid_argument("dense_reference_norm: per_dim must be >= 4");
  auto norm_on = [&](int n) {
    const PointSet grid =
        tensor_grid(domain, std::vector<int>(static_cast<std::size_t>(domain.dim()), n), placement);
    Vector values(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) values[static_cast<Eigen::Index>(i)] = f(grid.point(i));
    return std::pair{rkhs_norm(interpolate(spec, grid, values, options)), grid.size()};
  };
  const int half = placement == GridPlacement::closed ? (per_dim - 1) / 2 + 1 : (per_dim - 1) / 2;
  DenseReference out;
  std::tie(out.norm, out.points) = norm_on(per_dim);
  std::tie(out.half_resolution_norm, out.half_resolution_points) = norm_on(std::max(half, 2));
  return out;
}

}  // namespace rkhs

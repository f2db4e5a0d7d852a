#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/core.h>

#include "rkhs/errors.hpp"
#include "rkhs/estimator.hpp"
#include "rkhs/fitting.hpp"
#include "rkhs/interpolation.hpp"
#include "rkhs/oracle.hpp"
#include "rkhs/testbed.hpp"

namespace rkhs::testing {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Random subset of a candidate lattice, so that points stay separated by at
// least one lattice step.
Matrix lattice_subset(Rng& rng, const BoxDomain& domain, std::size_t count, int per_axis) {
  const int d = domain.dim();
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(per_axis);
  std::vector<std::size_t> ids(total);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  Matrix pts(d, static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    std::size_t id = ids[j];
    for (int a = 0; a < d; ++a) {
      const auto k = static_cast<double>(id % static_cast<std::size_t>(per_axis));
      id /= static_cast<std::size_t>(per_axis);
      pts(a, static_cast<Eigen::Index>(j)) =
          domain.lo()[a] + domain.extent()[a] * k / static_cast<double>(per_axis - 1);
    }
  }
  return pts;
}

PointSet select_columns(const PointSet& set, const std::vector<std::size_t>& cols) {
  Matrix pts(set.dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) pts.col(static_cast<Eigen::Index>(j)) = set.point(cols[j]);
  return PointSet(pts, set.domain());
}

Vector select_values(const Vector& values, const std::vector<std::size_t>& ids) {
  Vector out(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t j = 0; j < ids.size(); ++j) out[static_cast<Eigen::Index>(j)] = values[static_cast<Eigen::Index>(ids[j])];
  return out;
}

Matrix random_points(Rng& rng, const BoxDomain& domain, std::size_t count) {
  Matrix pts(domain.dim(), static_cast<Eigen::Index>(count));
  for (Eigen::Index j = 0; j < pts.cols(); ++j) {
    for (int a = 0; a < domain.dim(); ++a) pts(a, j) = uniform(rng, domain.lo()[a], domain.hi()[a]);
  }
  return pts;
}

// f = sum_j c_j k(., z_j) with its exact norm.
struct Expansion {
  KernelSpec spec;
  PointSet centers;
  Vector coeffs;
  double norm = 0.0;

  double operator()(PointRef x) const { return cross_vector(spec, centers, x).dot(coeffs); }
};

Expansion make_expansion(const KernelSpec& spec, PointSet centers, Vector coeffs) {
  const double n2 = coeffs.dot(kernel_matrix(spec, centers) * coeffs);
  return Expansion{spec, std::move(centers), std::move(coeffs), std::sqrt(n2)};
}

void record(PropertyResult& r, double measure, double limit, const std::string& what) {
  r.worst = std::max(r.worst, measure);
  if (!(measure <= limit) && r.ok) {
    r.ok = false;
    r.detail = what;
  }
}

}  // namespace

NestedCase random_nested_case(std::uint64_t seed, std::size_t max_points) {
  Rng rng(seed);
  const int order = static_cast<int>(uniform_index(rng, 0, 2));
  const double shape = uniform(rng, 0.5, 3.0);
  const int dim = uniform_index(rng, 0, 3) == 0 ? 2 : 1;
  // Smoother kernels get fewer points and a coarser lattice (in units of
  // 1/shape) to keep the matrices well conditioned.
  const std::size_t cap = std::min(max_points, order == 2 ? std::size_t{30} : order == 1 ? std::size_t{60} : max_points);
  const double min_scaled_gap = order == 2 ? 0.1 : order == 1 ? 0.02 : 0.002;
  const int max_per_axis = static_cast<int>(std::floor(2.0 * shape / min_scaled_gap)) + 1;
  const std::size_t lattice_cap =
      dim == 1 ? static_cast<std::size_t>(max_per_axis)
               : static_cast<std::size_t>(max_per_axis) * static_cast<std::size_t>(max_per_axis);
  const std::size_t n_fine = uniform_index(rng, 2, std::min(cap, lattice_cap));
  const BoxDomain domain = BoxDomain::cube(dim, -1.0, 1.0);
  int per_axis = dim == 1 ? static_cast<int>(3 * n_fine)
                          : static_cast<int>(std::ceil(std::sqrt(3.0 * static_cast<double>(n_fine))));
  per_axis = std::min(per_axis, max_per_axis);
  PointSet fine(lattice_subset(rng, domain, n_fine, std::max(per_axis, 2)), domain);

  const std::size_t n_coarse = uniform_index(rng, 1, n_fine);
  std::vector<std::size_t> ids(n_fine);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(n_coarse);
  PointSet coarse = select_columns(fine, ids);

  Vector values(static_cast<Eigen::Index>(n_fine));
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < values.size(); ++i) values[i] = normal(rng);
  return NestedCase{KernelSpec(order, shape), std::move(coarse), std::move(fine), std::move(values)};
}

PropertyResult check_pythagoras(std::size_t cases, double rel_tol, std::uint64_t seed) {
  PropertyResult r{"pythagoras", true, 0, 0.0, ""};
  for (std::size_t c = 0; c < cases; ++c) {
    const NestedCase nc = random_nested_case(seed * 1000003 + c);
    const Interpolant fine = interpolate(nc.spec, nc.fine, nc.values);
    const Interpolant coarse =
        interpolate(nc.spec, nc.coarse, select_values(nc.values, embed(nc.coarse, nc.fine)));
    const IncrementNorm inc = increment_norm(coarse, fine);
    const double gap = std::abs(fine.norm_squared() - coarse.norm_squared() - inc.norm * inc.norm) /
                       fine.norm_squared();
    record(r, gap, rel_tol,
           fmt::format("case {}: {} |X|={} |Y|={} relative gap {:.3e}", c, nc.spec.name(),
                       nc.coarse.size(), nc.fine.size(), gap));
    ++r.cases;
  }
  return r;
}

PropertyResult check_norm_monotonicity() {
  PropertyResult r{"norm monotonicity", true, 0, 0.0, ""};
  for (const TestFunction& fn : registry()) {
    for (int order = 0; order <= 2; ++order) {
      ScheduleOptions options;
      options.placement = GridPlacement::interior;
      const NestedSchedule schedule = fn.dim == 1 ? make_dyadic_schedule(fn.domain, 3, 6, options)
                                                  : make_dyadic_schedule(fn.domain, 1, 4, options);
      const NormTrace trace = build_trace(KernelSpec(order), schedule, fn.f);
      for (std::size_t i = 1; i < trace.size(); ++i) {
        const double prev = trace.levels[i - 1].norm_squared;
        const double drop = (prev - trace.levels[i].norm_squared) / std::max(prev, 1e-300);
        record(r, std::max(drop, 0.0), 1e-9,
               fmt::format("{} {} level {}: norm^2 drops by {:.3e}", fn.name, KernelSpec(order).name(),
                           i, drop));
      }
      ++r.cases;
    }
  }
  return r;
}

PropertyResult check_node_exactness(std::size_t cases, double rel_tol, std::uint64_t seed) {
  PropertyResult r{"node exactness", true, 0, 0.0, ""};
  for (std::size_t c = 0; c < cases; ++c) {
    const NestedCase nc = random_nested_case(seed * 1000003 + c);
    const Interpolant s = interpolate(nc.spec, nc.fine, nc.values);
    const Vector at_nodes = evaluate_batch(s, nc.fine.points());
    const double err = (at_nodes - nc.values).cwiseAbs().maxCoeff() / nc.values.cwiseAbs().maxCoeff();
    record(r, err, rel_tol, fmt::format("case {}: {} |X|={} relative error {:.3e}", c,
                                        nc.spec.name(), nc.fine.size(), err));
    ++r.cases;
  }
  return r;
}

PropertyResult check_power_function(std::size_t cases, std::uint64_t seed) {
  PropertyResult r{"power function", true, 0, 0.0, ""};
  for (std::size_t c = 0; c < cases; ++c) {
    const NestedCase nc = random_nested_case(seed * 1000003 + c);
    const PowerFunction p_fine(nc.spec, nc.fine);
    const PowerFunction p_coarse(nc.spec, nc.coarse);
    const double at_nodes = p_fine.batch(nc.fine.points()).maxCoeff();
    record(r, at_nodes, 1e-6, fmt::format("case {}: P = {:.3e} at a node", c, at_nodes));

    Rng rng(seed + c);
    const Matrix x = random_points(rng, nc.fine.domain(), 20);
    const Vector pf = p_fine.batch(x);
    const Vector pc = p_coarse.batch(x);
    const double growth = (pf - pc).maxCoeff();
    record(r, std::max(growth, 0.0), 1e-8,
           fmt::format("case {}: P grows by {:.3e} after adding points", c, growth));
    const double above_one = pf.maxCoeff() - 1.0;
    record(r, std::max(above_one, 0.0), 1e-12, fmt::format("case {}: P exceeds sqrt(k(x,x))", c));
    ++r.cases;
  }
  return r;
}

PropertyResult check_bound_validity(std::size_t cases, std::uint64_t seed) {
  PropertyResult r{"error bound validity", true, 0, 0.0, ""};
  for (std::size_t c = 0; c < cases; ++c) {
    const NestedCase nc = random_nested_case(seed * 1000003 + c, 60);
    Rng rng(seed * 7 + c);
    const BoxDomain& domain = nc.fine.domain();
    const std::size_t m = uniform_index(rng, 1, 6);
    PointSet centers(lattice_subset(rng, domain, m, 97), domain);
    Vector coeffs(static_cast<Eigen::Index>(m));
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) coeffs[j] = uniform(rng, -2.0, 2.0);
    const Expansion f = make_expansion(nc.spec, centers, coeffs);

    Vector values(static_cast<Eigen::Index>(nc.fine.size()));
    for (std::size_t i = 0; i < nc.fine.size(); ++i) values[static_cast<Eigen::Index>(i)] = f(nc.fine.point(i));
    const Interpolant s = interpolate(nc.spec, nc.fine, values);
    const ErrorBound bound(s, f.norm * (1.0 + 1e-10));
    const Matrix x = random_points(rng, domain, 50);
    const Vector predicted = evaluate_batch(s, x);
    const Vector b = bound.batch(x);
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      const double err = std::abs(f(x.col(i)) - predicted[i]);
      const double excess = err - b[i] - 1e-9 * (1.0 + f.norm);
      record(r, std::max(excess, 0.0), 0.0,
             fmt::format("case {}: |f - s| = {:.6e} exceeds bound {:.6e}", c, err, b[i]));
    }
    ++r.cases;
  }
  return r;
}

PropertyResult check_finite_expansion_recovery(double rel_tol) {
  PropertyResult r{"finite expansion recovery", true, 0, 0.0, ""};
  for (int dim = 1; dim <= 2; ++dim) {
    for (int order = 0; order <= 2; ++order) {
      const KernelSpec spec(order, 1.0);
      const BoxDomain domain = BoxDomain::cube(dim, -1.0, 1.0);
      const NestedSchedule schedule = make_dyadic_schedule(domain, 3, dim == 1 ? 6 : 4);
      const PointSet& level0 = schedule.levels.front();
      Vector coeffs(static_cast<Eigen::Index>(level0.size()));
      for (Eigen::Index j = 0; j < coeffs.size(); ++j) coeffs[j] = std::cos(1.0 + 2.0 * static_cast<double>(j));
      const Expansion f = make_expansion(spec, level0, coeffs);
      const NormTrace trace = build_trace(spec, schedule, [&](PointRef x) { return f(x); });
      const EstimateSummary summary = estimate_norm(trace);
      for (const auto* report : {&summary.alg1, &summary.alg2}) {
        if (!*report) {
          record(r, 1.0, rel_tol, fmt::format("{}D {}: estimator failed", dim, spec.name()));
          continue;
        }
        const double rel = std::abs((*report)->norm_estimate - f.norm) / f.norm;
        record(r, rel, rel_tol,
               fmt::format("{}D {} algorithm {}: {:.12g} vs exact {:.12g}", dim, spec.name(),
                           (*report)->algorithm, (*report)->norm_estimate, f.norm));
      }
      ++r.cases;
    }
  }
  return r;
}

PropertyResult check_fit_recovery(std::size_t cases, double rel_tol, std::uint64_t seed) {
  PropertyResult r{"fit model recovery", true, 0, 0.0, ""};
  Rng rng(seed);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = uniform_index(rng, 5, 12);
    const double h0 = uniform(rng, 0.1, 1.0);
    const double ratio = uniform(rng, 0.4, 0.8);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = h0 * std::pow(ratio, static_cast<double>(i));

    const double c1 = uniform(rng, 1.0, 50.0);
    const double c1p = uniform(rng, 0.1, 10.0);
    const double beta1 = uniform(rng, 0.3, 3.0);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = c1 - c1p * std::pow(h[i], beta1);
    const SaturatingFit sat = fit_saturating(h, y);
    const double sat_err = std::max({std::abs(sat.c1 - c1) / c1, std::abs(sat.c1_prime - c1p) / c1p,
                                     std::abs(sat.beta1 - beta1) / beta1});
    record(r, sat_err, rel_tol,
           fmt::format("saturating case {}: ({}, {}, {}) fitted as ({}, {}, {})", c, c1, c1p, beta1,
                       sat.c1, sat.c1_prime, sat.beta1));

    const double c2 = uniform(rng, 0.1, 10.0);
    const double beta2 = uniform(rng, 0.2, 3.0);
    for (std::size_t i = 0; i < n; ++i) y[i] = c2 * std::pow(h[i], beta2);
    for (const PowerLawIntercept intercept : {PowerLawIntercept::least_squares, PowerLawIntercept::envelope}) {
      PowerLawFitOptions options;
      options.intercept = intercept;
      const PowerLawFit pl = fit_powerlaw(h, y, options);
      const double pl_err = std::max(std::abs(pl.c2 - c2) / c2, std::abs(pl.beta2 - beta2) / beta2);
      record(r, pl_err, rel_tol,
             fmt::format("power-law case {} ({}): ({}, {}) fitted as ({}, {})", c,
                         to_string(intercept), c2, beta2, pl.c2, pl.beta2));
    }
    ++r.cases;
  }
  return r;
}

PropertyResult check_oracle_agreement(double rel_tol) {
  PropertyResult r{"oracle agreement", true, 0, 0.0, ""};
  const KernelSpec spec(0, 1.0);
  for (const TestFunction& fn : registry()) {
    if (fn.dim != 1) continue;
    const auto exact = analytic_norm(fn, spec);
    if (!exact) continue;
    const DenseReference dense = dense_reference_norm(spec, fn.f, fn.domain, 1025);
    const double excess = (dense.norm - *exact) / *exact;
    record(r, std::max(excess, 0.0), 1e-10,
           fmt::format("{}: dense {:.10g} above analytic {:.10g}", fn.name, dense.norm, *exact));
    const double gap = (*exact - dense.norm) / *exact;
    record(r, gap, rel_tol,
           fmt::format("{}: dense {:.10g} vs analytic {:.10g}", fn.name, dense.norm, *exact));
    ++r.cases;
  }
  return r;
}

std::vector<PropertyResult> run_all_properties() {
  return {check_pythagoras(),
          check_norm_monotonicity(),
          check_node_exactness(),
          check_power_function(),
          check_bound_validity(),
          check_finite_expansion_recovery(),
          check_fit_recovery(),
          check_oracle_agreement()};
}

}  // namespace rkhs::testing

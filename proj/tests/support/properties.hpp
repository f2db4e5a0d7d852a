#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rkhs/geometry.hpp"
#include "rkhs/kernel.hpp"

namespace rkhs::testing {

/// Outcome of one randomized property check.
struct PropertyResult {
  std::string name;
  bool ok = true;
  std::size_t cases = 0;
  /// Largest observed violation measure, in the property's own units.
  double worst = 0.0;
  std::string detail;
};

/// Random coarse subset of a random point set, both at most max_points and
/// separated enough for every kernel order to factorize.
struct NestedCase {
  KernelSpec spec;
  PointSet coarse;
  PointSet fine;
  Vector values;  // on the fine set
};

NestedCase random_nested_case(std::uint64_t seed, std::size_t max_points = 100);

/// |s_fine|^2 = |s_coarse|^2 + |s_fine - s_coarse|^2 within rel_tol.
PropertyResult check_pythagoras(std::size_t cases = 200, double rel_tol = 1e-6,
                                std::uint64_t seed = 1);

/// Interpolant norms never decrease along nested dyadic schedules.
PropertyResult check_norm_monotonicity();

/// s(x_i) = f(x_i) within rel_tol of max |f|.
PropertyResult check_node_exactness(std::size_t cases = 50, double rel_tol = 1e-8,
                                    std::uint64_t seed = 2);

/// P_X vanishes at the nodes and does not grow when points are added.
PropertyResult check_power_function(std::size_t cases = 50, std::uint64_t seed = 3);

/// |f - s| <= P_X sqrt(|f|^2 - |s|^2) for random finite expansions f.
PropertyResult check_bound_validity(std::size_t cases = 50, std::uint64_t seed = 4);

/// Both algorithms return the exact norm of a finite expansion.
PropertyResult check_finite_expansion_recovery(double rel_tol = 1e-8);

/// Saturating and power-law fits recover their own noise-free models.
PropertyResult check_fit_recovery(std::size_t cases = 50, double rel_tol = 1e-6,
                                  std::uint64_t seed = 5);

/// Dense-grid interpolant norms lie below the analytic Matérn 0 norm and
/// within rel_tol of it.
PropertyResult check_oracle_agreement(double rel_tol = 0.01);

std::vector<PropertyResult> run_all_properties();

}  // namespace rkhs::testing

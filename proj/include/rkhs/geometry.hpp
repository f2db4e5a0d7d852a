#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rkhs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;

/// Axis-aligned box [lo, hi] in R^d.
class BoxDomain {
 public:
  BoxDomain(Vector lo, Vector hi);

  static BoxDomain interval(double lo, double hi);
  static BoxDomain cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lo_.size()); }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  Vector extent() const { return hi_ - lo_; }

  bool contains(PointRef x) const;

  friend bool operator==(const BoxDomain& a, const BoxDomain& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  Vector lo_;
  Vector hi_;
};

/// Nonempty set of pairwise-distinct points inside a box, stored column-wise
/// (d x n). The separation distance is computed on construction because it
/// doubles as the distinctness check.
class PointSet {
 public:
  PointSet(Matrix points, BoxDomain domain);

  int dim() const { return static_cast<int>(points_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  const Matrix& points() const { return points_; }
  const BoxDomain& domain() const { return domain_; }

  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }

  /// Minimum pairwise distance; +inf for a single point.
  double separation() const { return separation_; }

 private:
  Matrix points_;
  BoxDomain domain_;
  double separation_ = std::numeric_limits<double>::infinity();
};

/// Where the points of a tensor grid sit on each axis.
///  - closed:   n points including both endpoints, spacing len/(n-1);
///  - interior: n points excluding the endpoints, spacing len/(n+1).
enum class GridPlacement { closed, interior };

const char* to_string(GridPlacement placement);
GridPlacement parse_grid_placement(const std::string& name);

struct FillDistanceOptions {
  /// Candidate grid refinement per axis relative to the point set's own spacing.
  int refinement = 10;
  /// Number of best grid candidates that get a local compass-search polish.
  int polish_candidates = 8;
};

/// sup_{x in domain} min_i |x - x_i|, evaluated by brute force over a dense
/// candidate grid followed by a local polish of the best candidates.
double fill_distance(const PointSet& points, const FillDistanceOptions& options = {});

double separation_distance(const PointSet& points);

/// fill_distance / separation_distance. Equispaced 1D closed grids give 1/2.
double uniformity(const PointSet& points);

/// Tensor grid with `counts[a]` points on axis a, first axis varying fastest.
PointSet tensor_grid(const BoxDomain& domain, const std::vector<int>& counts,
                     GridPlacement placement = GridPlacement::closed);

/// Fill distance of a tensor grid in closed form; used to cross-check the
/// brute-force value.
double tensor_grid_fill_distance(const BoxDomain& domain, const std::vector<int>& counts,
                                 GridPlacement placement);

struct ScheduleOptions {
  GridPlacement placement = GridPlacement::closed;
  /// Cap on the number of points of any level.
  std::size_t max_points = 4225;
};

struct NestedSchedule {
  std::vector<PointSet> levels;
  std::vector<double> fill_distances;
  double decay_ratio = 0.5;

  /// Throws invalid_argument unless every level is contained in the next one
  /// (exact coordinate match) and the fill distances decay at decay_ratio
  /// (+0.05 slack).
  void validate() const;
};

/// Level l has 2^l (base - 1) + 1 points per axis (closed placement) or
/// 2^l (base + 1) - 1 points per axis (interior placement). Both are nested
/// with decay ratio exactly 1/2.
NestedSchedule make_dyadic_schedule(const BoxDomain& domain, int base_per_dim, int num_levels,
                                    const ScheduleOptions& options = {});

struct QuasiUniformSchedule {
  std::vector<PointSet> levels;
  std::vector<double> fill_distances;
  /// fill_distances[i + 1] / fill_distances[i].
  std::vector<double> ratios;
};

/// For each target fill distance, the coarsest equispaced grid (same count on
/// every axis) whose fill distance does not exceed it.
QuasiUniformSchedule make_quasi_uniform_schedule(const BoxDomain& domain,
                                                 const std::vector<double>& fill_targets,
                                                 GridPlacement placement = GridPlacement::closed,
                                                 int max_per_axis = 4097);

/// Indices of `coarse` points inside `fine` (exact coordinate match). Throws
/// invalid_argument if some coarse point is missing.
std::vector<std::size_t> embed(const PointSet& coarse, const PointSet& fine);

/// One point per row, d comma-separated columns, 17 significant digits.
void write_points_csv(std::ostream& out, const PointSet& points);

}  // namespace rkhs

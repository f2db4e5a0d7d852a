#include "rkhs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>

#include "kdtree.hpp"
#include "rkhs/errors.hpp"

namespace rkhs {

BoxDomain::BoxDomain(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() == 0) throw invalid_argument("BoxDomain: dimension must be >= 1");
  if (lo_.size() != hi_.size()) throw invalid_argument("BoxDomain: lo/hi dimension mismatch");
  for (Eigen::Index a = 0; a < lo_.size(); ++a) {
    if (!(lo_[a] < hi_[a]) || !std::isfinite(lo_[a]) || !std::isfinite(hi_[a])) {
      throw invalid_argument(
          fmt::format("BoxDomain: need lo < hi on axis {} (got {} / {})", a, lo_[a], hi_[a]));
    }
  }
}

BoxDomain BoxDomain::interval(double lo, double hi) {
  return BoxDomain(Vector::Constant(1, lo), Vector::Constant(1, hi));
}

BoxDomain BoxDomain::cube(int dim, double lo, double hi) {
  if (dim < 1) throw invalid_argument("BoxDomain: dimension must be >= 1");
  return BoxDomain(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

bool BoxDomain::contains(PointRef x) const {
  if (x.size() != lo_.size()) return false;
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    if (!(x[a] >= lo_[a] && x[a] <= hi_[a])) return false;
  }
  return true;
}

PointSet::PointSet(Matrix points, BoxDomain domain)
    : points_(std::move(points)), domain_(std::move(domain)) {
  if (points_.cols() == 0) throw invalid_argument("PointSet: empty point set");
  if (points_.rows() != domain_.dim()) {
    throw invalid_argument(fmt::format("PointSet: points have dimension {} but domain has {}",
                                       points_.rows(), domain_.dim()));
  }
  for (Eigen::Index i = 0; i < points_.cols(); ++i) {
    if (!domain_.contains(points_.col(i))) {
      throw invalid_argument(fmt::format("PointSet: point {} lies outside the domain", i));
    }
  }
  // -0.0 and +0.0 must compare identical in embed().
  points_.array() += 0.0;
  if (points_.cols() >= 2) {
    separation_ = separation_distance(*this);
    if (!(separation_ > 0.0)) throw invalid_argument("PointSet: points are not pairwise distinct");
  }
}

const char* to_string(GridPlacement placement) {
  return placement == GridPlacement::closed ? "closed" : "interior";
}

GridPlacement parse_grid_placement(const std::string& name) {
  if (name == "closed") return GridPlacement::closed;
  if (name == "interior") return GridPlacement::interior;
  throw invalid_argument("unknown grid placement '" + name + "' (expected closed or interior)");
}

double separation_distance(const PointSet& points) {
  if (points.size() < 2) throw invalid_argument("separation_distance: need at least 2 points");
  const detail::KdTree tree(points.points());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    best = std::min(best, tree.nearest_squared(points.point(i).data(), i));
    if (best == 0.0) break;
  }
  return std::sqrt(best);
}

namespace {

// Candidate coordinates on one axis: a uniform grid with `intervals` steps,
// plus the point coordinates and their midpoints when those are few enough
// (structured sets then get their exact maximizers as candidates).
std::vector<double> axis_candidates(const PointSet& points, int axis, int intervals) {
  const double lo = points.domain().lo()[axis];
  const double hi = points.domain().hi()[axis];
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) {
    out.push_back(i == intervals ? hi : lo + (hi - lo) * i / intervals);
  }
  std::vector<double> coords(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) coords[i] = points.points()(axis, i);
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  if (coords.size() <= static_cast<std::size_t>(intervals) + 1) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
      out.push_back(coords[i]);
      if (i + 1 < coords.size()) out.push_back(0.5 * (coords[i] + coords[i + 1]));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Compass search maximizing the distance to the nearest point, starting from
// x and staying inside the box.
double polish(const detail::KdTree& tree, const BoxDomain& domain, Vector x, double step,
              double value) {
  const int d = domain.dim();
  std::vector<Vector> directions;
  for (int a = 0; a < d; ++a) {
    Vector e = Vector::Zero(d);
    e[a] = 1.0;
    directions.push_back(e);
    directions.push_back(-e);
    for (int b = a + 1; b < d; ++b) {
      for (double sa : {1.0, -1.0}) {
        for (double sb : {1.0, -1.0}) {
          Vector v = Vector::Zero(d);
          v[a] = sa;
          v[b] = sb;
          directions.push_back(v / std::sqrt(2.0));
        }
      }
    }
  }
  const double floor = 1e-15 * std::max(1.0, domain.extent().maxCoeff());
  while (step > floor) {
    bool improved = false;
    for (const Vector& dir : directions) {
      Vector y = (x + step * dir).cwiseMax(domain.lo()).cwiseMin(domain.hi());
      const double v = tree.nearest_squared(y.data());
      if (v > value) {
        value = v;
        x = std::move(y);
        improved = true;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return value;
}

}  // namespace

double fill_distance(const PointSet& points, const FillDistanceOptions& options) {
  if (options.refinement < 1) throw invalid_argument("fill_distance: refinement must be >= 1");
  const int d = points.dim();
  const detail::KdTree tree(points.points());
  const auto per_axis = static_cast<int>(
      std::ceil(std::pow(static_cast<double>(points.size()), 1.0 / d) - 1e-9));
  const int intervals = options.refinement * std::max(1, per_axis);

  std::vector<std::vector<double>> axes;
  for (int a = 0; a < d; ++a) axes.push_back(axis_candidates(points, a, intervals));

  // Keep the best few candidates for polishing (min-heap on value).
  using Entry = std::pair<double, Vector>;
  auto cmp = [](const Entry& a, const Entry& b) { return a.first > b.first; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> best(cmp);
  const auto keep = static_cast<std::size_t>(std::max(1, options.polish_candidates));

  std::vector<std::size_t> idx(d, 0);
  Vector x(d);
  double max_value = 0.0;
  while (true) {
    for (int a = 0; a < d; ++a) x[a] = axes[a][idx[a]];
    const double v = tree.nearest_squared(x.data());
    max_value = std::max(max_value, v);
    if (best.size() < keep) {
      best.emplace(v, x);
    } else if (v > best.top().first) {
      best.pop();
      best.emplace(v, x);
    }
    int a = 0;
    while (a < d && ++idx[a] == axes[a].size()) idx[a++] = 0;
    if (a == d) break;
  }

  if (options.polish_candidates > 0) {
    const double step = points.domain().extent().maxCoeff() / intervals;
    while (!best.empty()) {
      auto [v, start] = best.top();
      best.pop();
      max_value = std::max(max_value, polish(tree, points.domain(), start, step, v));
    }
  }
  return std::sqrt(max_value);
}

double uniformity(const PointSet& points) {
  return fill_distance(points) / separation_distance(points);
}

namespace {

std::vector<double> axis_coordinates(double lo, double hi, int n, GridPlacement placement) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  if (placement == GridPlacement::closed) {
    if (n < 2) throw invalid_argument("closed grids need at least 2 points per axis");
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) out.push_back(i == n - 1 ? hi : lo + i * step);
  } else {
    if (n < 1) throw invalid_argument("interior grids need at least 1 point per axis");
    const double step = (hi - lo) / (n + 1);
    for (int i = 1; i <= n; ++i) out.push_back(lo + i * step);
  }
  return out;
}

}  // namespace

PointSet tensor_grid(const BoxDomain& domain, const std::vector<int>& counts,
                     GridPlacement placement) {
  const int d = domain.dim();
  if (static_cast<int>(counts.size()) != d) {
    throw invalid_argument("tensor_grid: one count per axis required");
  }
  std::vector<std::vector<double>> axes;
  Eigen::Index total = 1;
  for (int a = 0; a < d; ++a) {
    axes.push_back(axis_coordinates(domain.lo()[a], domain.hi()[a], counts[a], placement));
    total *= counts[a];
  }
  Matrix pts(d, total);
  for (Eigen::Index j = 0; j < total; ++j) {
    Eigen::Index rest = j;
    for (int a = 0; a < d; ++a) {
      pts(a, j) = axes[a][static_cast<std::size_t>(rest % counts[a])];
      rest /= counts[a];
    }
  }
  return PointSet(std::move(pts), domain);
}

double tensor_grid_fill_distance(const BoxDomain& domain, const std::vector<int>& counts,
                                 GridPlacement placement) {
  double sum = 0.0;
  for (int a = 0; a < domain.dim(); ++a) {
    const double len = domain.hi()[a] - domain.lo()[a];
    const double half_gap =
        placement == GridPlacement::closed ? len / (2.0 * (counts[a] - 1)) : len / (counts[a] + 1.0);
    sum += half_gap * half_gap;
  }
  return std::sqrt(sum);
}

void NestedSchedule::validate() const {
  if (levels.empty()) throw invalid_argument("schedule has no levels");
  if (fill_distances.size() != levels.size()) {
    throw invalid_argument("schedule: one fill distance per level required");
  }
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    try {
      (void)embed(levels[i], levels[i + 1]);
    } catch (const invalid_argument& e) {
      throw invalid_argument(fmt::format("schedule level {} is not contained in level {}: {}", i,
                                         i + 1, e.what()));
    }
    const double ratio = fill_distances[i + 1] / fill_distances[i];
    if (!(fill_distances[i + 1] < fill_distances[i]) || ratio > decay_ratio + 0.05) {
      throw invalid_argument(fmt::format(
          "schedule fill distances must decay by {} per level (level {}: ratio {})", decay_ratio,
          i + 1, ratio));
    }
  }
}

NestedSchedule make_dyadic_schedule(const BoxDomain& domain, int base_per_dim, int num_levels,
                                    const ScheduleOptions& options) {
  const bool closed = options.placement == GridPlacement::closed;
  if (base_per_dim < (closed ? 2 : 1)) {
    throw invalid_argument(fmt::format("dyadic schedule: base_per_dim must be >= {} for {} grids",
                                       closed ? 2 : 1, to_string(options.placement)));
  }
  if (num_levels < 2) throw invalid_argument("dyadic schedule: need at least 2 levels");
  NestedSchedule schedule;
  schedule.decay_ratio = 0.5;
  for (int level = 0; level < num_levels; ++level) {
    const long scale = 1L << level;
    const long per_axis = closed ? scale * (base_per_dim - 1) + 1 : scale * (base_per_dim + 1) - 1;
    const double total = std::pow(static_cast<double>(per_axis), domain.dim());
    if (total > static_cast<double>(options.max_points)) {
      throw invalid_argument(fmt::format(
          "dyadic schedule: level {} needs {} points, above the cap max_points={}", level, total,
          options.max_points));
    }
    std::vector<int> counts(static_cast<std::size_t>(domain.dim()), static_cast<int>(per_axis));
    schedule.levels.push_back(tensor_grid(domain, counts, options.placement));
    schedule.fill_distances.push_back(fill_distance(schedule.levels.back()));
  }
  schedule.validate();
  return schedule;
}

QuasiUniformSchedule make_quasi_uniform_schedule(const BoxDomain& domain,
                                                 const std::vector<double>& fill_targets,
                                                 GridPlacement placement, int max_per_axis) {
  if (fill_targets.empty()) throw invalid_argument("quasi-uniform schedule: no fill targets");
  for (std::size_t i = 0; i < fill_targets.size(); ++i) {
    if (!(fill_targets[i] > 0.0) || (i > 0 && !(fill_targets[i] < fill_targets[i - 1]))) {
      throw invalid_argument("quasi-uniform schedule: targets must be positive and strictly decreasing");
    }
  }
  const int d = domain.dim();
  QuasiUniformSchedule schedule;
  int n = placement == GridPlacement::closed ? 2 : 1;
  for (double target : fill_targets) {
    auto counts = [&](int k) { return std::vector<int>(static_cast<std::size_t>(d), k); };
    while (tensor_grid_fill_distance(domain, counts(n), placement) > target * (1.0 + 1e-12)) {
      if (++n > max_per_axis) {
        throw invalid_argument(fmt::format(
            "quasi-uniform schedule: fill target {} needs more than {} points per axis", target,
            max_per_axis));
      }
    }
    schedule.levels.push_back(tensor_grid(domain, counts(n), placement));
    schedule.fill_distances.push_back(fill_distance(schedule.levels.back()));
  }
  for (std::size_t i = 1; i < schedule.fill_distances.size(); ++i) {
    schedule.ratios.push_back(schedule.fill_distances[i] / schedule.fill_distances[i - 1]);
  }
  return schedule;
}

namespace {

std::string coordinate_key(const double* p, Eigen::Index d) {
  return std::string(reinterpret_cast<const char*>(p), static_cast<std::size_t>(d) * sizeof(double));
}

}  // namespace

std::vector<std::size_t> embed(const PointSet& coarse, const PointSet& fine) {
  if (coarse.dim() != fine.dim()) throw invalid_argument("embed: dimension mismatch");
  std::unordered_map<std::string, std::size_t> where;
  where.reserve(fine.size());
  for (std::size_t j = 0; j < fine.size(); ++j) {
    where.emplace(coordinate_key(fine.point(j).data(), fine.dim()), j);
  }
  std::vector<std::size_t> out(coarse.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    auto it = where.find(coordinate_key(coarse.point(i).data(), coarse.dim()));
    if (it == where.end()) {
      throw invalid_argument(fmt::format("coarse point {} has no exact match in the fine set", i));
    }
    out[i] = it->second;
  }
  return out;
}

void write_points_csv(std::ostream& out, const PointSet& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int a = 0; a < points.dim(); ++a) {
      out << (a ? "," : "") << fmt::format("{:.17g}", points.points()(a, static_cast<Eigen::Index>(i)));
    }
    out << '\n';
  }
}

}  // namespace rkhs

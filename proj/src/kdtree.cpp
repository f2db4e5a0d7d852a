#include "kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace rkhs::detail {

namespace {
constexpr int kLeafSize = 8;
}

KdTree::KdTree(const Eigen::MatrixXd& points) : points_(points), index_(points.cols()) {
  std::iota(index_.begin(), index_.end(), 0);
  nodes_.reserve(2 * index_.size() / kLeafSize + 2);
  if (!index_.empty()) build(0, static_cast<int>(index_.size()));
}

int KdTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  const int dims = static_cast<int>(points_.rows());
  int best_dim = 0;
  double best_spread = -1.0;
  for (int a = 0; a < dims; ++a) {
    double lo = points_(a, index_[begin]);
    double hi = lo;
    for (int i = begin + 1; i < end; ++i) {
      lo = std::min(lo, points_(a, index_[i]));
      hi = std::max(hi, points_(a, index_[i]));
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = a;
    }
  }
  const int mid = begin + (end - begin) / 2;
  std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                   [&](int a, int b) { return points_(best_dim, a) < points_(best_dim, b); });
  nodes_[id].dim = best_dim;
  nodes_[id].split = points_(best_dim, index_[mid]);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double KdTree::nearest_squared(const double* q, std::size_t skip) const {
  double best = std::numeric_limits<double>::infinity();
  if (!nodes_.empty()) search(0, q, skip, best);
  return best;
}

void KdTree::search(int id, const double* q, std::size_t skip, double& best) const {
  const Node& node = nodes_[id];
  if (node.dim < 0) {
    const auto dims = points_.rows();
    for (int i = node.begin; i < node.end; ++i) {
      const auto j = static_cast<std::size_t>(index_[i]);
      if (j == skip) continue;
      const double* p = points_.col(index_[i]).data();
      double d2 = 0.0;
      for (Eigen::Index a = 0; a < dims; ++a) {
        const double t = q[a] - p[a];
        d2 += t * t;
      }
      best = std::min(best, d2);
    }
    return;
  }
  const double diff = q[node.dim] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search(near, q, skip, best);
  if (diff * diff < best) search(far, q, skip, best);
}

}  // namespace rkhs::detail

#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace rkhs::detail {

/// Static kd-tree over the columns of a d x n matrix, answering nearest
/// neighbour distance queries. Holds a reference to the matrix.
class KdTree {
 public:
  static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

  explicit KdTree(const Eigen::MatrixXd& points);

  /// Squared distance from q to the nearest point, ignoring index `skip`.
  double nearest_squared(const double* q, std::size_t skip = none) const;

 private:
  struct Node {
    int dim = -1;  // -1 marks a leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
    int begin = 0;
    int end = 0;
  };

  int build(int begin, int end);
  void search(int node, const double* q, std::size_t skip, double& best) const;

  const Eigen::MatrixXd& points_;
  std::vector<int> index_;
  std::vector<Node> nodes_;
};

}  // namespace rkhs::detail

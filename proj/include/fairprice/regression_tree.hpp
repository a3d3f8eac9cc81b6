#pragma once

#include "fairprice/common.hpp"

#include <vector>

namespace fairprice {

struct TreeOptions {
  int max_depth = 5;
  std::size_t min_leaf = 5;
};

/// CART regression tree with variance-reduction splits. Ties in gain go to the
/// lowest feature index, then to the lowest threshold.
class RegressionTree {
 public:
  /// Rows of `features` are samples.
  void fit(const Matrix& features, const Vector& targets, TreeOptions options = {});
  double predict(const Eigen::Ref<const Vector>& row) const;

  bool fitted() const { return !nodes_.empty(); }
  std::size_t leaf_count() const;
  int depth() const;

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    int depth = 0;
  };

  int build(const Matrix& features, const Vector& targets, std::vector<Eigen::Index>& idx, std::size_t begin,
            std::size_t end, int depth, const TreeOptions& options);

  std::vector<Node> nodes_;
};

}  // namespace fairprice

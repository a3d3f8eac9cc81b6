#include "fairprice/regression_tree.hpp"

#include <algorithm>
#include <numeric>

namespace fairprice {

void RegressionTree::fit(const Matrix& features, const Vector& targets, TreeOptions options)
{
  if (features.rows() == 0) throw std::invalid_argument("regression tree: empty training set");
  if (features.rows() != targets.size()) throw std::invalid_argument("regression tree: size mismatch");
  if (options.min_leaf == 0) options.min_leaf = 1;
  nodes_.clear();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(features.rows()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  build(features, targets, idx, 0, idx.size(), 0, options);
}

int RegressionTree::build(const Matrix& features, const Vector& targets, std::vector<Eigen::Index>& idx,
                          std::size_t begin, std::size_t end, int depth, const TreeOptions& options)
{
  const std::size_t n = end - begin;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double y = targets[idx[i]];
    sum += y;
    sum_sq += y * y;
  }
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{-1, 0.0, -1, -1, sum / static_cast<double>(n), depth});

  if (depth >= options.max_depth || n < 2 * options.min_leaf) return self;

  const double parent_sse = sum_sq - sum * sum / static_cast<double>(n);
  double best_gain = 1e-12 * std::max(1.0, parent_sse);
  int best_feature = -1;
  double best_threshold = 0.0;

  std::vector<Eigen::Index> sorted(idx.begin() + static_cast<std::ptrdiff_t>(begin),
                                   idx.begin() + static_cast<std::ptrdiff_t>(end));
  for (Eigen::Index f = 0; f < features.cols(); ++f) {
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return features(a, f) < features(b, f); });
    double left_sum = 0.0;
    double left_sq = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double y = targets[sorted[k]];
      left_sum += y;
      left_sq += y * y;
      const std::size_t n_left = k + 1;
      const std::size_t n_right = n - n_left;
      if (n_left < options.min_leaf) continue;
      if (n_right < options.min_leaf) break;
      const double here = features(sorted[k], f);
      const double next = features(sorted[k + 1], f);
      if (!(here < next)) continue;
      const double right_sum = sum - left_sum;
      const double right_sq = sum_sq - left_sq;
      const double sse = (left_sq - left_sum * left_sum / n_left) + (right_sq - right_sum * right_sum / n_right);
      const double gain = parent_sse - sse;
      if (gain > best_gain) {
        best_gain = gain;
        best_feature = static_cast<int>(f);
        best_threshold = 0.5 * (here + next);
      }
    }
  }
  if (best_feature < 0) return self;

  const auto mid_it = std::stable_partition(
      idx.begin() + static_cast<std::ptrdiff_t>(begin), idx.begin() + static_cast<std::ptrdiff_t>(end),
      [&](Eigen::Index i) { return features(i, best_feature) <= best_threshold; });
  const auto mid = static_cast<std::size_t>(mid_it - idx.begin());

  const int left = build(features, targets, idx, begin, mid, depth + 1, options);
  const int right = build(features, targets, idx, mid, end, depth + 1, options);
  nodes_[self].feature = best_feature;
  nodes_[self].threshold = best_threshold;
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

double RegressionTree::predict(const Eigen::Ref<const Vector>& row) const
{
  if (nodes_.empty()) throw std::logic_error("regression tree is not fitted");
  int node = 0;
  while (nodes_[node].feature >= 0) {
    const auto& n = nodes_[node];
    node = row[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[node].value;
}

std::size_t RegressionTree::leaf_count() const
{
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

int RegressionTree::depth() const
{
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

}  // namespace fairprice

#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"

namespace coarcta {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double value = 0.0;  // leaf mean
  int left = -1;
  int right = -1;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  bool empty() const { return nodes.empty(); }
  double predict(const double* row) const;
};

struct TreeOptions {
  int max_depth = 0;         // 0 = unlimited
  int max_leaves = 0;        // >0 switches to best-first leaf-wise growth
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  int feature_subset = 0;    // features sampled per split; 0 = all
};

// CART: recursive binary splits minimizing within-leaf squared error, leaf
// value = mean. Splits scan features in index order with thresholds at
// midpoints of adjacent distinct values; ties keep the first candidate, so
// the structure is reproducible. `rng` is only consulted when
// feature_subset > 0 (random forests).
RegressionTree build_tree(const Matrix& X, const std::vector<double>& y,
                          const std::vector<std::size_t>& rows,
                          const TreeOptions& options, Rng* rng = nullptr);

}  // namespace coarcta

#include "trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace coarcta {

double RegressionTree::predict(const double* row) const {
  if (nodes.empty()) throw NumericError("predict on empty tree");
  int idx = 0;
  while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
    const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
    idx = (row[node.feature] <= node.threshold) ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(idx)].value;
}

namespace {

struct NodeStats {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  double mean() const { return sum / static_cast<double>(count); }
  double sse() const {
    const double s = sum_sq - sum * sum / static_cast<double>(count);
    return s > 0.0 ? s : 0.0;
  }
};

NodeStats stats_of(const std::vector<double>& y,
                   const std::vector<std::size_t>& rows) {
  NodeStats st;
  st.count = rows.size();
  for (std::size_t r : rows) {
    st.sum += y[r];
    st.sum_sq += y[r] * y[r];
  }
  return st;
}

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double children_sse = std::numeric_limits<double>::infinity();
};

// Exhaustive scan over the given features; features must be in ascending
// index order so tie-breaking is stable.
SplitChoice find_best_split(const Matrix& X, const std::vector<double>& y,
                            const std::vector<std::size_t>& rows,
                            const std::vector<int>& features,
                            int min_samples_leaf) {
  SplitChoice best;
  const std::size_t n = rows.size();
  std::vector<std::pair<double, double>> sorted(n);  // (feature value, target)

  for (int f : features) {
    for (std::size_t i = 0; i < n; ++i) {
      sorted[i] = {X.at(rows[i], static_cast<std::size_t>(f)), y[rows[i]]};
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double left_sum = 0.0, left_sq = 0.0;
    double total_sum = 0.0, total_sq = 0.0;
    for (const auto& [v, t] : sorted) {
      total_sum += t;
      total_sq += t * t;
    }

    const auto min_leaf = static_cast<std::size_t>(min_samples_leaf);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_sum += sorted[i].second;
      left_sq += sorted[i].second * sorted[i].second;
      if (sorted[i].first == sorted[i + 1].first) continue;
      const std::size_t n_left = i + 1;
      const std::size_t n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;

      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double sse_left =
          left_sq - left_sum * left_sum / static_cast<double>(n_left);
      const double sse_right =
          right_sq - right_sum * right_sum / static_cast<double>(n_right);
      const double cost = sse_left + sse_right;
      if (cost < best.children_sse) {
        // Midpoint can round up onto the right value when the two are
        // adjacent doubles, which would empty the right child; fall back to
        // the left value so `x <= threshold` splits exactly as counted.
        const double mid = 0.5 * (sorted[i].first + sorted[i + 1].first);
        best.found = true;
        best.feature = f;
        best.threshold = mid < sorted[i + 1].first ? mid : sorted[i].first;
        best.children_sse = cost;
      }
    }
  }
  return best;
}

std::vector<int> pick_features(std::size_t n_features, int subset, Rng* rng) {
  std::vector<int> all(n_features);
  std::iota(all.begin(), all.end(), 0);
  if (subset <= 0 || static_cast<std::size_t>(subset) >= n_features ||
      rng == nullptr) {
    return all;
  }
  // Partial Fisher-Yates, then sort so the split scan stays index-ordered.
  for (int i = 0; i < subset; ++i) {
    const std::size_t j =
        static_cast<std::size_t>(i) +
        rng->next_index(n_features - static_cast<std::size_t>(i));
    std::swap(all[static_cast<std::size_t>(i)], all[j]);
  }
  all.resize(static_cast<std::size_t>(subset));
  std::sort(all.begin(), all.end());
  return all;
}

class TreeBuilder {
public:
  TreeBuilder(const Matrix& X, const std::vector<double>& y,
              const TreeOptions& options, Rng* rng)
      : X_(X), y_(y), options_(options), rng_(rng) {}

  RegressionTree build(std::vector<std::size_t> rows) {
    if (rows.empty()) throw DataError("cannot build tree on zero rows");
    if (options_.max_leaves > 0) {
      build_leafwise(std::move(rows));
    } else {
      build_depthwise(std::move(rows), 0);
    }
    return std::move(tree_);
  }

private:
  int make_leaf(const NodeStats& stats) {
    TreeNode node;
    node.value = stats.mean();
    tree_.nodes.push_back(node);
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  bool splittable(const NodeStats& stats) const {
    return stats.count >= static_cast<std::size_t>(options_.min_samples_split) &&
           stats.sse() > 0.0;
  }

  SplitChoice search(const std::vector<std::size_t>& rows) {
    auto features = pick_features(X_.cols, options_.feature_subset, rng_);
    return find_best_split(X_, y_, rows, features, options_.min_samples_leaf);
  }

  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partition(
      const std::vector<std::size_t>& rows, const SplitChoice& split) const {
    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      if (X_.at(r, static_cast<std::size_t>(split.feature)) <=
          split.threshold) {
        left.push_back(r);
      } else {
        right.push_back(r);
      }
    }
    if (left.empty() || right.empty()) {
      throw NumericError("tree split produced an empty child");
    }
    return {std::move(left), std::move(right)};
  }

  int build_depthwise(std::vector<std::size_t> rows, int depth) {
    const NodeStats stats = stats_of(y_, rows);
    const bool depth_capped =
        options_.max_depth > 0 && depth >= options_.max_depth;
    if (depth_capped || !splittable(stats)) return make_leaf(stats);

    const SplitChoice split = search(rows);
    if (!split.found) return make_leaf(stats);

    auto [left_rows, right_rows] = partition(rows, split);
    rows.clear();
    rows.shrink_to_fit();

    TreeNode node;
    node.feature = split.feature;
    node.threshold = split.threshold;
    tree_.nodes.push_back(node);
    const int self = static_cast<int>(tree_.nodes.size()) - 1;
    const int left = build_depthwise(std::move(left_rows), depth + 1);
    tree_.nodes[static_cast<std::size_t>(self)].left = left;
    const int right = build_depthwise(std::move(right_rows), depth + 1);
    tree_.nodes[static_cast<std::size_t>(self)].right = right;
    return self;
  }

  // Best-first growth: always split the leaf with the largest SSE reduction,
  // until the leaf cap is reached. Ties fall back to creation order.
  struct Candidate {
    double reduction = 0.0;
    std::uint64_t order = 0;
    int node_index = -1;
    SplitChoice split;
    std::vector<std::size_t> rows;
    NodeStats stats;
  };

  struct CandidateLess {
    bool operator()(const Candidate& a, const Candidate& b) const {
      if (a.reduction != b.reduction) return a.reduction < b.reduction;
      return a.order > b.order;
    }
  };

  void build_leafwise(std::vector<std::size_t> rows) {
    std::priority_queue<Candidate, std::vector<Candidate>, CandidateLess>
        frontier;
    std::uint64_t counter = 0;

    const NodeStats root_stats = stats_of(y_, rows);
    const int root = make_leaf(root_stats);
    int leaves = 1;
    enqueue(frontier, counter, root, std::move(rows), root_stats);

    while (leaves < options_.max_leaves && !frontier.empty()) {
      Candidate cand =
          std::move(const_cast<Candidate&>(frontier.top()));
      frontier.pop();

      auto [left_rows, right_rows] = partition(cand.rows, cand.split);
      const NodeStats left_stats = stats_of(y_, left_rows);
      const NodeStats right_stats = stats_of(y_, right_rows);

      const int left = make_leaf(left_stats);
      const int right = make_leaf(right_stats);
      TreeNode& node = tree_.nodes[static_cast<std::size_t>(cand.node_index)];
      node.feature = cand.split.feature;
      node.threshold = cand.split.threshold;
      node.value = 0.0;
      node.left = left;
      node.right = right;
      ++leaves;

      enqueue(frontier, counter, left, std::move(left_rows), left_stats);
      enqueue(frontier, counter, right, std::move(right_rows), right_stats);
    }
  }

  template <typename Queue>
  void enqueue(Queue& frontier, std::uint64_t& counter, int node_index,
               std::vector<std::size_t> rows, const NodeStats& stats) {
    if (!splittable(stats)) return;
    SplitChoice split = search(rows);
    if (!split.found) return;
    const double reduction = stats.sse() - split.children_sse;
    if (reduction <= 0.0) return;
    Candidate cand;
    cand.reduction = reduction;
    cand.order = counter++;
    cand.node_index = node_index;
    cand.split = split;
    cand.rows = std::move(rows);
    cand.stats = stats;
    frontier.push(std::move(cand));
  }

  const Matrix& X_;
  const std::vector<double>& y_;
  TreeOptions options_;
  Rng* rng_;
  RegressionTree tree_;
};

}  // namespace

RegressionTree build_tree(const Matrix& X, const std::vector<double>& y,
                          const std::vector<std::size_t>& rows,
                          const TreeOptions& options, Rng* rng) {
  TreeBuilder builder(X, y, options, rng);
  return builder.build(rows);
}

}  // namespace coarcta

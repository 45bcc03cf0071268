#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ragq/matrix.hpp"
#include "ragq/model_io.hpp"
#include "ragq/parallel.hpp"

namespace ragq {

// Flat binary regression tree. Internal nodes send x[feature] <= threshold
// to the left child.
class RegressionTree {
 public:
  struct Node {
    std::int64_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int64_t left = -1;
    std::int64_t right = -1;
    double value = 0.0;
  };

  double predict_row(std::span<const double> x) const;
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const;
  int depth() const;
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  void write(BinaryWriter& out) const;
  static RegressionTree read(BinaryReader& in);

  // Appends a node and returns its index.
  std::size_t add(const Node& n) {
    nodes_.push_back(n);
    return nodes_.size() - 1;
  }
  Node& node(std::size_t i) { return nodes_[i]; }

 private:
  std::vector<Node> nodes_;
};

// Row indices of every column sorted by (value, row index). Built once per
// training matrix and shared by all trees fitted on it.
class SortedColumns {
 public:
  explicit SortedColumns(const Matrix& x);
  const std::vector<std::uint32_t>& column(std::size_t c) const { return order_[c]; }
  std::size_t cols() const noexcept { return order_.size(); }

 private:
  std::vector<std::vector<std::uint32_t>> order_;
};

struct TreeParams {
  int max_depth = 6;
  double lambda = 0.0;  // L2 on leaf weights
  double gamma = 0.0;   // minimum gain to split
  int min_leaf_samples = 1;
};

// Second-order greedy tree over exact scans of sorted feature values.
// Leaf weight -G/(H + lambda); a split is kept when
//   1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma > 0.
// With grad = -w*y and hess = w this is the weighted variance-reduction tree.
RegressionTree build_exact_tree(const Matrix& x, const SortedColumns& sorted,
                                std::span<const double> grad, std::span<const double> hess,
                                const TreeParams& params, Exec exec = Exec::serial);

// Extremely randomized tree: one uniform threshold per feature per node, the
// best by variance reduction wins. Leaves hold the mean target.
RegressionTree build_random_tree(const Matrix& x, std::span<const double> y, int max_depth,
                                 int min_samples_split, std::uint64_t seed);

}  // namespace ragq

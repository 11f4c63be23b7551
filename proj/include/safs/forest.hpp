#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "safs/matrix.hpp"
#include "safs/ranking.hpp"

namespace safs {

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;  // rows with x[feature] <= threshold go left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double value = 0.0;  // leaf prediction

  bool is_leaf() const { return feature == kLeaf; }
  bool operator==(const TreeNode&) const = default;
};

/// CART regression tree. Node 0 is the root.
class RegressionTree {
 public:
  RegressionTree() = default;
  RegressionTree(std::vector<TreeNode> nodes, std::vector<double> impurity_decrease);

  double predict(std::span<const double> row) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  /// Per-feature sum of squared-error reduction over this tree's splits.
  const std::vector<double>& impurity_decrease() const { return impurity_decrease_; }
  std::size_t leaf_count() const;

  bool operator==(const RegressionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<double> impurity_decrease_;
};

struct ForestParams {
  std::size_t n_trees = 100;
  /// Features tried per split; 0 selects max(1, p/3).
  std::size_t mtry = 0;
  std::size_t min_leaf = 5;
  /// Disable only for exact-fit tests.
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct RandomForest {
  std::vector<RegressionTree> trees;
  std::size_t n_features = 0;
  std::size_t mtry = 0;
  std::size_t min_leaf = 0;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  std::size_t n_trees() const { return trees.size(); }
  bool operator==(const RandomForest&) const = default;
};

/// Grows one tree on the given (possibly repeated) sample rows.
RegressionTree fit_tree(const Matrix& x, std::span<const double> y, std::vector<std::size_t> samples,
                        std::size_t mtry, std::size_t min_leaf, std::uint64_t seed);

/// Seed of tree `index` in a forest seeded with `seed`.
std::uint64_t tree_seed(std::uint64_t seed, std::size_t index);

/// Trees are fit in parallel (up to `threads` OpenMP threads), each from its
/// own derived seed, so the forest is independent of scheduling.
RandomForest fit_random_forest(const Matrix& x, std::span<const double> y, const ForestParams& params,
                               int threads = 1);

/// Mean of per-tree predictions.
std::vector<double> rf_predict(const RandomForest& forest, const Matrix& x, int threads = 1);

/// Raw per-feature impurity decrease summed over every tree.
std::vector<double> rf_raw_importance(const RandomForest& forest);
ImportanceRanking rf_importance(const RandomForest& forest, std::span<const std::string> names);

std::size_t default_mtry(std::size_t features);

}  // namespace safs

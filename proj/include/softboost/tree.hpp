#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "softboost/data.hpp"

namespace softboost {

enum class TreeKind { regression, probability };

struct TreeConfig {
  int max_depth = 6;
  /// Minimum hessian sum per child (regression trees) or minimum weighted
  /// row count per child (probability trees).
  double min_child_weight = 1.0;
  double lambda = 1.0;  // leaf L2 penalty, regression trees only
  double gamma = 0.0;   // minimum split gain
  double colsample = 1.0;
  bool randomized_thresholds = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // present values x < threshold go left
  bool default_left = true;  // direction of a missing value
  int left = -1;
  int right = -1;
  double gain = 0.0;      // split gain / impurity decrease, before gamma
  double weight = 0.0;    // hessian sum or weighted row count of the node
  double grad_sum = 0.0;  // regression only
  std::vector<double> value;  // leaf output, also kept on internal nodes

  bool is_leaf() const { return feature < 0; }
};

class Tree {
 public:
  Tree() = default;
  Tree(TreeKind kind, std::size_t n_features, std::vector<TreeNode> nodes);

  TreeKind kind() const { return kind_; }
  std::size_t n_features() const { return n_features_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  std::size_t leaf_index(std::span<const double> row) const;
  /// Leaf value reached by the row; size 1 for regression trees.
  std::span<const double> predict(std::span<const double> row) const;
  int depth() const;

  /// Multiplies every node value by `factor` (used to bake in a learning rate).
  void scale_values(double factor);

 private:
  TreeKind kind_ = TreeKind::regression;
  std::size_t n_features_ = 0;
  std::vector<TreeNode> nodes_;
};

/// Present values of every feature sorted ascending (ties by row), so that
/// repeated tree fits on one dataset sort only once.
class SortedColumns {
 public:
  struct Entry {
    std::uint32_t row;
    double value;
  };
  SortedColumns() = default;
  explicit SortedColumns(const Matrix& x);

  std::size_t n_features() const { return columns_.size(); }
  std::span<const Entry> column(std::size_t f) const { return columns_[f]; }

 private:
  std::vector<std::vector<Entry>> columns_;
};

/// Second-order regression tree. `row_weight`, when nonempty, multiplies each
/// row's gradient and hessian (zero excludes the row).
Tree build_regression_tree(const Matrix& x, std::span<const double> grad,
                           std::span<const double> hess, const TreeConfig& config,
                           const SortedColumns* presorted = nullptr,
                           std::span<const double> row_weight = {});

/// Probability-estimation tree on soft labels with weighted Brier impurity.
/// `bootstrap_indices` lists the sampled rows with repetition; empty means
/// every row once.
Tree build_probability_tree(const Matrix& x, const SoftLabelMatrix& labels,
                            const ClassWeights& weights, const TreeConfig& config,
                            std::span<const std::size_t> bootstrap_indices = {},
                            const SortedColumns* presorted = nullptr);

/// Checks arity and returns the leaf value.
std::span<const double> tree_predict(const Tree& tree, std::span<const double> row);

struct ImportanceEntry {
  std::string name;
  double share;
};

/// Total split gain per feature, normalized to sum 1, descending (ties by
/// name). Features never split on get share 0.
std::vector<ImportanceEntry> feature_importance(std::span<const Tree> trees,
                                                const std::vector<std::string>& names);

/// Two-column text table, importance shown in percent with 4 decimals.
std::string format_importance_table(const std::vector<ImportanceEntry>& ranked,
                                    std::size_t top_n = 15);

struct GainAudit {
  std::size_t splits = 0;
  std::size_t below_gamma = 0;      // recomputed gain < gamma
  double max_mismatch = 0.0;        // |recomputed - stored| over all splits
};

/// Recomputes every split gain from the children's stored statistics.
GainAudit audit_split_gains(const Tree& tree, const TreeConfig& config,
                            const ClassWeights* weights = nullptr);

}  // namespace softboost

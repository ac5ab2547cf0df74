#pragma once

#include <vector>

#include "softboost/tree.hpp"

namespace softboost {

struct ForestConfig {
  int n_trees = 100;
  bool bootstrap = true;
  TreeConfig tree;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Extra-trees settings: random thresholds, no bootstrap.
ForestConfig extra_trees_config(ForestConfig base);

struct Forest {
  std::vector<Tree> trees;
  ForestConfig config;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
};

/// Tree i is fitted with seed config.seed + i, on a bootstrap sample drawn
/// from that seed when config.bootstrap is set.
Forest fit_forest(const Matrix& x, const SoftLabelMatrix& labels, const ClassWeights& weights,
                  const ForestConfig& config);

/// Mean of the trees' leaf distributions.
ScoreMatrix forest_predict(const Forest& forest, const Matrix& x);

inline constexpr double kNbVarianceFloor = 1e-9;

struct GaussianNB {
  std::vector<double> priors;  // length C
  Matrix means;                // C x F
  Matrix variances;            // C x F, floored
};

/// Maximum-likelihood class-conditional Gaussians. Features must be complete.
/// A class absent from the labels gets prior 0 and is never predicted.
GaussianNB fit_gaussian_nb(const Matrix& x, const std::vector<int>& labels,
                           std::size_t n_classes);

ScoreMatrix nb_predict(const GaussianNB& model, const Matrix& x);

}  // namespace softboost

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "softboost/objectives.hpp"
#include "softboost/tree.hpp"

namespace softboost {

enum class ObjectiveKind { softmax_brier, softmax_logloss };

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_from_string(const std::string& name);

struct BoostConfig {
  int n_rounds_max = 200;
  double learning_rate = 0.1;
  double subsample = 1.0;
  TreeConfig tree;
  ObjectiveKind objective = ObjectiveKind::softmax_brier;
  int early_stopping_rounds = 0;  // 0 disables early stopping
  double hess_min = kDefaultHessMin;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One regression tree per class per round. Leaf values already include the
/// learning rate.
struct BoostedEnsemble {
  std::vector<std::vector<Tree>> rounds;
  std::vector<double> base_score;
  BoostConfig config;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::size_t best_round = 0;
  std::vector<double> valid_history;  // weighted Brier after each round
  std::vector<double> train_history;  // weighted Brier after each round (subsample = 1 only)

  std::vector<const Tree*> all_trees() const;
};

struct ValidationSet {
  const Matrix& features;
  const SoftLabelMatrix& labels;
};

/// Multi-class gradient boosting on soft labels. Validation, when given, is
/// scored with the weighted Brier score every round; best_round is its argmin
/// (earliest on ties). Early stopping requires a validation set.
BoostedEnsemble fit_gbdt(const Matrix& x_train, const SoftLabelMatrix& y_train,
                         const ClassWeights& weights, const BoostConfig& config,
                         const std::optional<ValidationSet>& valid = std::nullopt);

/// Raw scores summed over rounds 1..at_round (default best_round).
ScoreMatrix gbdt_predict_raw(const BoostedEnsemble& model, const Matrix& x,
                             std::optional<std::size_t> at_round = std::nullopt);
ScoreMatrix gbdt_predict(const BoostedEnsemble& model, const Matrix& x,
                         std::optional<std::size_t> at_round = std::nullopt);

/// Candidate values per tunable field; an empty list keeps the base value.
struct BoostGrid {
  std::vector<int> max_depth;
  std::vector<double> min_child_weight;
  std::vector<double> colsample;
  std::vector<double> subsample;
  std::vector<double> learning_rate;

  /// Cartesian product in field order (max_depth outermost).
  std::vector<BoostConfig> expand(const BoostConfig& base) const;
};

struct GridResult {
  std::size_t config_id = 0;
  BoostConfig config;
  std::optional<double> valid_brier;  // empty when the fit failed
  std::size_t best_round = 0;
  std::string error;
};

/// Minimal validation Brier; ties to fewer trees, then lower max_depth, then
/// grid order. Throws when every entry failed.
std::size_t select_best(const std::vector<GridResult>& results);

struct GridSearchOutcome {
  BoostConfig best;
  BoostedEnsemble best_model;
  std::vector<GridResult> table;
};

GridSearchOutcome grid_search(const BoostGrid& grid, const BoostConfig& base,
                              const Matrix& x_train, const SoftLabelMatrix& y_train,
                              const ClassWeights& weights, const Matrix& x_valid,
                              const SoftLabelMatrix& y_valid);

/// config_id,max_depth,min_child_weight,colsample,subsample,learning_rate,valid_brier,best_round
std::string grid_table_csv(const std::vector<GridResult>& table);

}  // namespace softboost

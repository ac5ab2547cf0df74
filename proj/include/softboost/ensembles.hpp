#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "softboost/boosting.hpp"
#include "softboost/learners.hpp"

namespace softboost {

/// Leave-one-participant-out folds over the non-holdout participants, plus
/// the holdout block kept aside for validation.
struct FoldPlan {
  std::vector<std::vector<int>> folds;
  std::vector<int> holdout;

  /// Fold index of a participant, or -1 for holdout/unknown participants.
  int fold_of(int participant_id) const;
  std::vector<int> training_participants() const;
};

FoldPlan participant_folds(const std::vector<int>& participants, const std::vector<int>& holdout = {});

enum class Level1Kind { gbdt, forest, extra_trees, naive_bayes };

std::string to_string(Level1Kind kind);
Level1Kind level1_kind_from_string(const std::string& name);

struct Level1Spec {
  std::string name;
  Level1Kind kind = Level1Kind::forest;
  BoostConfig boost;
  ForestConfig forest;
  /// Feature columns whose name starts with any of these are not used.
  std::vector<std::string> exclude_prefixes;
};

struct Level1Model {
  Level1Spec spec;
  std::vector<std::size_t> feature_index;  // columns of the full table used
  std::vector<double> impute_means;        // naive Bayes only, per used column
  std::variant<BoostedEnsemble, Forest, GaussianNB> model;
};

/// Fits one level-1 learner. Boosted models use `valid` for early stopping
/// when their config asks for it.
Level1Model fit_level1(const Level1Spec& spec, const std::vector<std::string>& columns,
                       const Matrix& x, const SoftLabelMatrix& y, const ClassWeights& weights,
                       const std::optional<ValidationSet>& valid = std::nullopt);

/// `x` has the same columns as the table the model was fitted on.
ScoreMatrix level1_predict(const Level1Model& model, const Matrix& x);

/// Which fold model scored each row, and which participants it saw.
struct OofProvenance {
  std::vector<int> producer;                      // per row: block index
  std::vector<std::vector<int>> fitted_participants;  // per block
};

/// Number of rows scored by a model that was fitted on the row's own participant.
std::size_t audit_provenance(const std::vector<RowKey>& keys, const OofProvenance& provenance);

struct TransferResult {
  FrameTable train;
  FrameTable test;
  std::vector<std::string> new_columns;
  OofProvenance provenance;
  std::vector<ScoreMatrix> test_block_predictions;
};

/// Replaces the train-only room column by out-of-fold class probabilities
/// (columns <prefix><r>). Every fold, and the holdout as one more block, is
/// scored by a model fitted on the other blocks; test rows get the mean of
/// all block models.
TransferResult stack_transfer(const FrameTable& train, const FrameTable& test, const FoldPlan& folds,
                              const Level1Spec& learner, std::size_t n_rooms,
                              const std::string& prefix = "room_p");

struct StackConfig {
  BoostConfig stacker;
  BoostGrid grid;
  bool include_base_features = false;
};

struct StackedModel {
  std::vector<Level1Model> level1;  // refit on all rows
  std::vector<std::string> columns; // base feature columns
  BoostedEnsemble stacker;
  bool include_base_features = false;
  std::size_t n_classes = 0;
};

struct StackReport {
  std::vector<std::string> level1_names;
  std::vector<double> level1_holdout_brier;
  std::vector<std::string> dropped;
  double stacked_holdout_brier = 0.0;
  std::vector<std::size_t> holdout_rows;
  Matrix holdout_predictions;  // stacker output on the holdout rows
  std::vector<GridResult> grid;
  std::vector<std::size_t> oof_rows;  // table rows covered by the folds
  Matrix oof;                         // oof_rows x (levels * C)
  OofProvenance provenance;
};

struct StackFit {
  StackedModel model;
  StackReport report;
};

/// Level-1 OOF predictions over the fold rows, a grid-searched stacker
/// validated on the holdout rows, then level-1 refits on every row. Specs
/// that fail to fit are dropped with a warning; fewer than two survivors is
/// an error. Requires a nonempty holdout.
StackFit fit_stack(const std::vector<Level1Spec>& specs, const FoldPlan& folds,
                   const FrameTable& table, const ClassWeights& weights, const StackConfig& config);

ScoreMatrix stack_predict(const StackedModel& model, const Matrix& x);

/// Elementwise mean of same-shaped probability matrices.
ScoreMatrix average_predictions(const std::vector<ScoreMatrix>& predictions);

}  // namespace softboost

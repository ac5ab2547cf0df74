#include "softboost/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace softboost {

int FoldPlan::fold_of(int participant_id) const {
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (std::find(folds[f].begin(), folds[f].end(), participant_id) != folds[f].end()) {
      return static_cast<int>(f);
    }
  }
  return -1;
}

std::vector<int> FoldPlan::training_participants() const {
  std::vector<int> out;
  for (const auto& f : folds) out.insert(out.end(), f.begin(), f.end());
  std::sort(out.begin(), out.end());
  return out;
}

FoldPlan participant_folds(const std::vector<int>& participants, const std::vector<int>& holdout) {
  std::set<int> all(participants.begin(), participants.end());
  std::set<int> held(holdout.begin(), holdout.end());
  for (int h : held) {
    if (!all.count(h)) {
      throw ValidationError("holdout participant " + std::to_string(h) + " is not in the data");
    }
  }
  FoldPlan plan;
  plan.holdout.assign(held.begin(), held.end());
  for (int p : all) {
    if (!held.count(p)) plan.folds.push_back({p});
  }
  if (plan.folds.empty()) throw ValidationError("no training participants left after the holdout");
  return plan;
}

std::string to_string(Level1Kind kind) {
  switch (kind) {
    case Level1Kind::gbdt: return "gbdt";
    case Level1Kind::forest: return "forest";
    case Level1Kind::extra_trees: return "extra_trees";
    case Level1Kind::naive_bayes: return "naive_bayes";
  }
  return "forest";
}

Level1Kind level1_kind_from_string(const std::string& name) {
  for (auto k : {Level1Kind::gbdt, Level1Kind::forest, Level1Kind::extra_trees, Level1Kind::naive_bayes}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown learner kind '" + name + "'");
}

namespace {

std::vector<std::size_t> used_columns(const Level1Spec& spec, const std::vector<std::string>& columns) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    bool excluded = false;
    for (const auto& p : spec.exclude_prefixes) {
      if (columns[j].starts_with(p)) excluded = true;
    }
    if (!excluded) idx.push_back(j);
  }
  if (idx.empty()) throw ValidationError("learner '" + spec.name + "' has no feature columns left");
  return idx;
}

void impute(Matrix& x, const std::vector<double>& means) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (is_missing(r[j])) r[j] = means[j];
    }
  }
}

std::vector<std::size_t> rows_of(const std::vector<RowKey>& keys, const std::vector<int>& participants) {
  std::set<int> want(participants.begin(), participants.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (want.count(keys[i].participant_id)) out.push_back(i);
  }
  return out;
}

std::vector<int> concat_except(const std::vector<std::vector<int>>& blocks, std::size_t skip) {
  std::vector<int> out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b != skip) out.insert(out.end(), blocks[b].begin(), blocks[b].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Level1Model fit_level1(const Level1Spec& spec, const std::vector<std::string>& columns,
                       const Matrix& x, const SoftLabelMatrix& y, const ClassWeights& weights,
                       const std::optional<ValidationSet>& valid) {
  if (columns.size() != x.cols()) throw ValidationError("column names do not match the feature matrix");
  Level1Model m;
  m.spec = spec;
  m.feature_index = used_columns(spec, columns);
  Matrix xs = x.select_cols(m.feature_index);
  switch (spec.kind) {
    case Level1Kind::gbdt: {
      BoostConfig cfg = spec.boost;
      if (valid) {
        Matrix vx = valid->features.select_cols(m.feature_index);
        m.model = fit_gbdt(xs, y, weights, cfg, ValidationSet{vx, valid->labels});
      } else {
        cfg.early_stopping_rounds = 0;
        m.model = fit_gbdt(xs, y, weights, cfg);
      }
      break;
    }
    case Level1Kind::forest:
      m.model = fit_forest(xs, y, weights, spec.forest);
      break;
    case Level1Kind::extra_trees:
      m.model = fit_forest(xs, y, weights, extra_trees_config(spec.forest));
      break;
    case Level1Kind::naive_bayes: {
      m.impute_means.assign(xs.cols(), 0.0);
      for (std::size_t j = 0; j < xs.cols(); ++j) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < xs.rows(); ++i) {
          if (!is_missing(xs(i, j))) {
            sum += xs(i, j);
            ++n;
          }
        }
        m.impute_means[j] = n ? sum / static_cast<double>(n) : 0.0;
      }
      impute(xs, m.impute_means);
      m.model = fit_gaussian_nb(xs, harden_labels(y), y.cols());
      break;
    }
  }
  return m;
}

ScoreMatrix level1_predict(const Level1Model& model, const Matrix& x) {
  Matrix xs = x.select_cols(model.feature_index);
  if (const auto* g = std::get_if<BoostedEnsemble>(&model.model)) return gbdt_predict(*g, xs);
  if (const auto* f = std::get_if<Forest>(&model.model)) return forest_predict(*f, xs);
  impute(xs, model.impute_means);
  return nb_predict(std::get<GaussianNB>(model.model), xs);
}

std::size_t audit_provenance(const std::vector<RowKey>& keys, const OofProvenance& provenance) {
  if (keys.size() != provenance.producer.size()) {
    throw ValidationError("provenance does not cover every row");
  }
  std::size_t bad = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const int b = provenance.producer[i];
    if (b < 0 || static_cast<std::size_t>(b) >= provenance.fitted_participants.size()) {
      ++bad;
      continue;
    }
    const auto& seen = provenance.fitted_participants[static_cast<std::size_t>(b)];
    if (std::binary_search(seen.begin(), seen.end(), keys[i].participant_id)) ++bad;
  }
  return bad;
}

TransferResult stack_transfer(const FrameTable& train, const FrameTable& test, const FoldPlan& folds,
                              const Level1Spec& learner, std::size_t n_rooms, const std::string& prefix) {
  if (n_rooms < 1) throw ValidationError("stack transfer needs at least one room");
  if (!train.room) throw ValidationError("training table has no room column");
  if (test.room && std::any_of(test.room->begin(), test.room->end(), [](int r) { return r != kNoRoom; })) {
    throw ValidationError("test table must not carry room values");
  }
  if (train.columns != test.columns) throw ValidationError("train and test feature columns differ");
  std::vector<int> rooms = *train.room;
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    if (rooms[i] < 0 || static_cast<std::size_t>(rooms[i]) >= n_rooms) {
      throw ValidationError("row " + std::to_string(i) + ": room value missing or out of range");
    }
  }

  std::vector<std::vector<int>> blocks = folds.folds;
  if (!folds.holdout.empty()) blocks.push_back(folds.holdout);
  if (blocks.size() < 2) throw ValidationError("stack transfer needs at least two participant blocks");
  std::vector<std::vector<std::size_t>> block_rows;
  std::size_t covered = 0;
  for (const auto& b : blocks) {
    block_rows.push_back(rows_of(train.keys, b));
    covered += block_rows.back().size();
  }
  if (covered != train.size()) throw ValidationError("fold plan does not cover every training participant");

  const SoftLabelMatrix aux = SoftLabelMatrix::one_hot(rooms, n_rooms);
  const ClassWeights uniform = ClassWeights::uniform(n_rooms);

  TransferResult out;
  out.provenance.producer.assign(train.size(), -1);
  out.provenance.fitted_participants.resize(blocks.size());
  Matrix oof(train.size(), n_rooms, 0.0);
  out.test_block_predictions.resize(blocks.size());

  std::vector<std::string> warnings(blocks.size());
  parallel_for(blocks.size(), [&](std::size_t b) {
    const auto fit_participants = concat_except(blocks, b);
    const auto fit_rows = rows_of(train.keys, fit_participants);
    Matrix xf = train.features.select_rows(fit_rows);
    SoftLabelMatrix yf = aux.select_rows(fit_rows);
    std::vector<bool> present(n_rooms, false);
    for (std::size_t i : fit_rows) present[static_cast<std::size_t>(rooms[i])] = true;

    Level1Spec spec = learner;
    spec.boost.early_stopping_rounds = 0;
    Level1Model model = fit_level1(spec, train.columns, xf, yf, uniform);

    auto predict = [&](const Matrix& x) {
      Matrix p = level1_predict(model, x).values();
      for (std::size_t i = 0; i < p.rows(); ++i) {
        auto r = p.row(i);
        double kept = 0.0;
        for (std::size_t c = 0; c < n_rooms; ++c) {
          if (!present[c]) r[c] = 0.0;
          kept += r[c];
        }
        std::size_t n_present = static_cast<std::size_t>(std::count(present.begin(), present.end(), true));
        for (std::size_t c = 0; c < n_rooms; ++c) {
          if (kept > 0.0) {
            r[c] /= kept;
          } else {
            r[c] = present[c] ? 1.0 / static_cast<double>(n_present) : 0.0;
          }
        }
      }
      return ScoreMatrix::probability(std::move(p));
    };

    ScoreMatrix held = predict(train.features.select_rows(block_rows[b]));
    for (std::size_t k = 0; k < block_rows[b].size(); ++k) {
      auto src = held.row(k);
      std::copy(src.begin(), src.end(), oof.row(block_rows[b][k]).begin());
      out.provenance.producer[block_rows[b][k]] = static_cast<int>(b);
    }
    out.provenance.fitted_participants[b] = fit_participants;
    out.test_block_predictions[b] = predict(test.features);
    if (std::find(present.begin(), present.end(), false) != present.end()) {
      warnings[b] = "stack transfer: block " + std::to_string(b) +
                    " is missing a room class in its training rows; its column is zero";
    }
  });
  for (const auto& w : warnings) {
    if (!w.empty()) warn(w);
  }

  for (std::size_t r = 0; r < n_rooms; ++r) out.new_columns.push_back(prefix + std::to_string(r));
  std::vector<ScoreMatrix> test_parts = out.test_block_predictions;
  Matrix test_mean = average_predictions(test_parts).values();

  out.train = train;
  out.train.room.reset();
  out.train.append_columns(out.new_columns, oof);
  out.test = test;
  out.test.room.reset();
  out.test.append_columns(out.new_columns, test_mean);
  return out;
}

namespace {

struct Level1Outcome {
  bool ok = false;
  std::string error;
  Matrix oof;           // fold rows x C
  Matrix holdout_pred;  // holdout rows x C
  std::size_t rounds = 0;
};

}  // namespace

StackFit fit_stack(const std::vector<Level1Spec>& specs, const FoldPlan& folds, const FrameTable& table,
                   const ClassWeights& weights, const StackConfig& config) {
  if (specs.size() < 2) throw ValidationError("stacking needs at least two level-1 learners");
  if (folds.holdout.empty()) throw ValidationError("stacking needs a holdout block");
  if (folds.folds.size() < 2) throw ValidationError("stacking needs at least two folds");
  const SoftLabelMatrix y = table.soft_labels();
  const std::size_t n_classes = y.cols();

  const auto fit_rows = rows_of(table.keys, folds.training_participants());
  const auto hold_rows = rows_of(table.keys, folds.holdout);
  if (fit_rows.size() + hold_rows.size() != table.size()) {
    throw ValidationError("fold plan does not cover every participant in the table");
  }
  const Matrix x_fit = table.features.select_rows(fit_rows);
  const Matrix x_hold = table.features.select_rows(hold_rows);
  const SoftLabelMatrix y_fit = y.select_rows(fit_rows);
  const SoftLabelMatrix y_hold = y.select_rows(hold_rows);
  const ValidationSet hold{x_hold, y_hold};

  std::vector<RowKey> fit_keys;
  for (std::size_t i : fit_rows) fit_keys.push_back(table.keys[i]);
  std::vector<std::vector<std::size_t>> fold_local;  // positions within fit_rows
  for (const auto& f : folds.folds) fold_local.push_back(rows_of(fit_keys, f));

  StackReport report;
  report.oof_rows = fit_rows;
  report.provenance.producer.assign(fit_rows.size(), -1);
  report.provenance.fitted_participants.resize(folds.folds.size());
  for (std::size_t f = 0; f < folds.folds.size(); ++f) {
    report.provenance.fitted_participants[f] = concat_except(folds.folds, f);
    for (std::size_t k : fold_local[f]) report.provenance.producer[k] = static_cast<int>(f);
  }

  std::vector<Level1Outcome> outcomes(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    auto& o = outcomes[s];
    try {
      o.oof = Matrix(fit_rows.size(), n_classes, 0.0);
      std::vector<Matrix> parts(folds.folds.size());
      parallel_for(folds.folds.size(), [&](std::size_t f) {
        std::vector<std::size_t> train_local;
        for (std::size_t g = 0; g < folds.folds.size(); ++g) {
          if (g != f) train_local.insert(train_local.end(), fold_local[g].begin(), fold_local[g].end());
        }
        std::sort(train_local.begin(), train_local.end());
        Level1Model m = fit_level1(specs[s], table.columns, x_fit.select_rows(train_local),
                                   y_fit.select_rows(train_local), weights, hold);
        parts[f] = level1_predict(m, x_fit.select_rows(fold_local[f])).values();
      });
      for (std::size_t f = 0; f < folds.folds.size(); ++f) {
        for (std::size_t k = 0; k < fold_local[f].size(); ++k) {
          auto src = parts[f].row(k);
          std::copy(src.begin(), src.end(), o.oof.row(fold_local[f][k]).begin());
        }
      }
      Level1Model full = fit_level1(specs[s], table.columns, x_fit, y_fit, weights, hold);
      o.holdout_pred = level1_predict(full, x_hold).values();
      if (const auto* g = std::get_if<BoostedEnsemble>(&full.model)) o.rounds = std::max<std::size_t>(1, g->best_round);
      o.ok = true;
    } catch (const std::exception& e) {
      o.error = e.what();
      warn("level-1 learner '" + specs[s].name + "' dropped: " + o.error);
    }
  }

  std::vector<std::size_t> alive;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    if (outcomes[s].ok) {
      alive.push_back(s);
    } else {
      report.dropped.push_back(specs[s].name);
    }
  }
  if (alive.size() < 2) throw ValidationError("fewer than two level-1 learners survived");

  Matrix z_fit(fit_rows.size(), 0), z_hold(hold_rows.size(), 0);
  for (std::size_t s : alive) {
    z_fit = z_fit.hconcat(outcomes[s].oof);
    z_hold = z_hold.hconcat(outcomes[s].holdout_pred);
    report.level1_names.push_back(specs[s].name);
    report.level1_holdout_brier.push_back(
        brier_score(ScoreMatrix::probability(outcomes[s].holdout_pred), y_hold, weights));
  }
  report.oof = z_fit;
  if (config.include_base_features) {
    z_fit = z_fit.hconcat(x_fit);
    z_hold = z_hold.hconcat(x_hold);
  }

  GridSearchOutcome gs = grid_search(config.grid, config.stacker, z_fit, y_fit, weights, z_hold, y_hold);
  report.grid = gs.table;
  ScoreMatrix stacked_hold = gbdt_predict(gs.best_model, z_hold);
  report.stacked_holdout_brier = brier_score(stacked_hold, y_hold, weights);
  report.holdout_rows = hold_rows;
  report.holdout_predictions = stacked_hold.values();

  StackedModel model;
  model.columns = table.columns;
  model.include_base_features = config.include_base_features;
  model.n_classes = n_classes;
  model.stacker = std::move(gs.best_model);
  model.level1.resize(alive.size());
  const Matrix& x_all = table.features;
  parallel_for(alive.size(), [&](std::size_t i) {
    Level1Spec spec = specs[alive[i]];
    if (spec.kind == Level1Kind::gbdt) {
      spec.boost.n_rounds_max = static_cast<int>(outcomes[alive[i]].rounds);
      spec.boost.early_stopping_rounds = 0;
    }
    model.level1[i] = fit_level1(spec, table.columns, x_all, y, weights);
  });
  return {std::move(model), std::move(report)};
}

ScoreMatrix stack_predict(const StackedModel& model, const Matrix& x) {
  if (x.cols() != model.columns.size()) throw ValidationError("feature count does not match the stacked model");
  Matrix z(x.rows(), 0);
  for (const auto& m : model.level1) z = z.hconcat(level1_predict(m, x).values());
  if (model.include_base_features) z = z.hconcat(x);
  return gbdt_predict(model.stacker, z);
}

ScoreMatrix average_predictions(const std::vector<ScoreMatrix>& predictions) {
  if (predictions.empty()) throw ValidationError("nothing to average");
  const std::size_t n = predictions.front().rows(), c = predictions.front().cols();
  Matrix sum(n, c, 0.0);
  for (const auto& p : predictions) {
    if (p.kind() != ScoreKind::probability) throw ValidationError("can only average probabilities");
    if (p.rows() != n || p.cols() != c) throw ValidationError("prediction shapes differ");
    for (std::size_t i = 0; i < sum.data().size(); ++i) sum.data()[i] += p.values().data()[i];
  }
  const double k = static_cast<double>(predictions.size());
  for (double& v : sum.data()) v /= k;
  return ScoreMatrix::probability(std::move(sum));
}

}  // namespace softboost

#include "softboost/boosting.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace softboost {

std::string to_string(ObjectiveKind kind) {
  return kind == ObjectiveKind::softmax_brier ? "softmax_brier" : "softmax_logloss";
}

ObjectiveKind objective_from_string(const std::string& name) {
  if (name == "softmax_brier") return ObjectiveKind::softmax_brier;
  if (name == "softmax_logloss") return ObjectiveKind::softmax_logloss;
  throw ValidationError("unknown objective '" + name + "'");
}

void BoostConfig::validate() const {
  tree.validate();
  if (n_rounds_max < 0) throw ValidationError("n_rounds_max must be >= 0");
  if (!(learning_rate >= 0.0 && learning_rate <= 1.0)) {
    throw ValidationError("learning_rate must be in [0,1]");
  }
  if (!(subsample > 0.0 && subsample <= 1.0)) throw ValidationError("subsample must be in (0,1]");
  if (early_stopping_rounds < 0) throw ValidationError("early_stopping_rounds must be >= 0");
}

std::vector<const Tree*> BoostedEnsemble::all_trees() const {
  std::vector<const Tree*> out;
  for (const auto& r : rounds) {
    for (const auto& t : r) out.push_back(&t);
  }
  return out;
}

namespace {

void add_round(const std::vector<Tree>& trees, const Matrix& x, Matrix& raw) {
  parallel_for(x.rows(), [&](std::size_t r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < trees.size(); ++c) raw(r, c) += trees[c].predict(row)[0];
  });
}

void check_raw(const Matrix& raw, std::size_t round) {
  for (std::size_t i = 0; i < raw.data().size(); ++i) {
    if (!std::isfinite(raw.data()[i])) {
      throw NumericError("raw score not finite after round " + std::to_string(round + 1) +
                         " at row " + std::to_string(i / raw.cols()) + ", class " +
                         std::to_string(i % raw.cols()));
    }
  }
}

}  // namespace

BoostedEnsemble fit_gbdt(const Matrix& x_train, const SoftLabelMatrix& y_train,
                         const ClassWeights& weights, const BoostConfig& config,
                         const std::optional<ValidationSet>& valid) {
  config.validate();
  const std::size_t n = x_train.rows();
  const std::size_t n_cls = y_train.cols();
  if (n == 0) throw ValidationError("fit_gbdt: empty training set");
  if (y_train.rows() != n) throw ValidationError("fit_gbdt: label rows differ from features");
  if (weights.size() != n_cls) throw ValidationError("fit_gbdt: class weight count mismatch");
  if (config.early_stopping_rounds > 0 && !valid) {
    throw ValidationError("fit_gbdt: early stopping needs a validation set");
  }
  if (valid && (valid->features.rows() != valid->labels.rows() ||
                valid->features.cols() != x_train.cols() || valid->labels.cols() != n_cls)) {
    throw ValidationError("fit_gbdt: validation set shape mismatch");
  }

  BoostedEnsemble model;
  model.config = config;
  model.n_features = x_train.cols();
  model.n_classes = n_cls;
  model.base_score.assign(n_cls, 0.0);

  const SortedColumns sorted(x_train);
  Matrix raw(n, n_cls, 0.0);
  Matrix valid_raw = valid ? Matrix(valid->features.rows(), n_cls, 0.0) : Matrix();
  std::vector<double> row_weight;
  const GradOptions grad_options{config.hess_min, true};
  double best_valid = std::numeric_limits<double>::infinity();
  std::size_t best_round = 0;

  for (int round = 0; round < config.n_rounds_max; ++round) {
    const auto ur = static_cast<std::size_t>(round);
    GradHess gh;
    try {
      auto scores = ScoreMatrix::raw(raw);
      gh = config.objective == ObjectiveKind::softmax_brier
               ? brier_grad_hess(scores, y_train, weights, grad_options)
               : logloss_grad_hess(scores, y_train, grad_options);
    } catch (const NumericError& e) {
      throw NumericError("round " + std::to_string(round + 1) + ": " + e.what());
    }

    row_weight.clear();
    if (config.subsample < 1.0) {
      std::mt19937_64 rng(mix_seed({config.seed, ur, 0x5ab5u}));
      std::bernoulli_distribution keep(config.subsample);
      row_weight.resize(n);
      std::size_t kept = 0;
      for (auto& m : row_weight) {
        m = keep(rng) ? 1.0 : 0.0;
        kept += m > 0.0;
      }
      if (kept == 0) {
        throw ValidationError("round " + std::to_string(round + 1) + ": empty subsample");
      }
    }

    std::vector<Tree> trees(n_cls);
    parallel_for(n_cls, [&](std::size_t c) {
      std::vector<double> g(n), h(n);
      for (std::size_t r = 0; r < n; ++r) {
        g[r] = gh.grad(r, c);
        h[r] = gh.hess(r, c);
      }
      TreeConfig tc = config.tree;
      tc.seed = mix_seed({config.seed, ur, c});
      trees[c] = build_regression_tree(x_train, g, h, tc, &sorted, row_weight);
      trees[c].scale_values(config.learning_rate);
    });

    add_round(trees, x_train, raw);
    check_raw(raw, ur);
    if (valid) {
      add_round(trees, valid->features, valid_raw);
      check_raw(valid_raw, ur);
    }
    model.rounds.push_back(std::move(trees));

    if (config.subsample >= 1.0) {
      double train_brier = brier_loss(ScoreMatrix::raw(raw), y_train, weights);
      if (config.objective == ObjectiveKind::softmax_brier && !model.train_history.empty() &&
          train_brier > model.train_history.back() + 1e-12) {
        warn("training Brier increased at round " + std::to_string(round + 1) + " (" +
             std::to_string(model.train_history.back()) + " -> " +
             std::to_string(train_brier) + ")");
      }
      model.train_history.push_back(train_brier);
    }
    if (valid) {
      double vb = brier_loss(ScoreMatrix::raw(valid_raw), valid->labels, weights);
      model.valid_history.push_back(vb);
      if (vb < best_valid) {
        best_valid = vb;
        best_round = ur + 1;
      }
      if (config.early_stopping_rounds > 0 &&
          ur + 1 - best_round >= static_cast<std::size_t>(config.early_stopping_rounds)) {
        break;
      }
    }
  }
  model.best_round = valid ? best_round : model.rounds.size();
  return model;
}

ScoreMatrix gbdt_predict_raw(const BoostedEnsemble& model, const Matrix& x,
                             std::optional<std::size_t> at_round) {
  if (x.cols() != model.n_features) {
    throw ValidationError("gbdt_predict: " + std::to_string(x.cols()) +
                          " features, model expects " + std::to_string(model.n_features));
  }
  std::size_t upto = at_round.value_or(model.best_round);
  if (upto > model.rounds.size()) {
    throw ValidationError("at_round " + std::to_string(upto) + " exceeds the " +
                          std::to_string(model.rounds.size()) + " fitted rounds");
  }
  Matrix raw(x.rows(), model.n_classes);
  parallel_for(x.rows(), [&](std::size_t r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < model.n_classes; ++c) raw(r, c) = model.base_score[c];
    for (std::size_t k = 0; k < upto; ++k) {
      for (std::size_t c = 0; c < model.n_classes; ++c) {
        raw(r, c) += model.rounds[k][c].predict(row)[0];
      }
    }
  });
  return ScoreMatrix::raw(std::move(raw));
}

ScoreMatrix gbdt_predict(const BoostedEnsemble& model, const Matrix& x,
                         std::optional<std::size_t> at_round) {
  return softmax_rows(gbdt_predict_raw(model, x, at_round));
}

std::vector<BoostConfig> BoostGrid::expand(const BoostConfig& base) const {
  auto or_base = [](const auto& values, auto base_value) {
    using T = decltype(base_value);
    return values.empty() ? std::vector<T>{base_value} : std::vector<T>(values.begin(), values.end());
  };
  std::vector<BoostConfig> out;
  for (int depth : or_base(max_depth, base.tree.max_depth)) {
    for (double mcw : or_base(min_child_weight, base.tree.min_child_weight)) {
      for (double cs : or_base(colsample, base.tree.colsample)) {
        for (double ss : or_base(subsample, base.subsample)) {
          for (double lr : or_base(learning_rate, base.learning_rate)) {
            BoostConfig c = base;
            c.tree.max_depth = depth;
            c.tree.min_child_weight = mcw;
            c.tree.colsample = cs;
            c.subsample = ss;
            c.learning_rate = lr;
            out.push_back(c);
          }
        }
      }
    }
  }
  return out;
}

std::size_t select_best(const std::vector<GridResult>& results) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.valid_brier) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = results[*best];
    if (*r.valid_brier != *b.valid_brier) {
      if (*r.valid_brier < *b.valid_brier) best = i;
    } else if (r.best_round != b.best_round) {
      if (r.best_round < b.best_round) best = i;
    } else if (r.config.tree.max_depth < b.config.tree.max_depth) {
      best = i;
    }
  }
  if (!best) throw ValidationError("grid search: every configuration failed");
  return *best;
}

GridSearchOutcome grid_search(const BoostGrid& grid, const BoostConfig& base,
                              const Matrix& x_train, const SoftLabelMatrix& y_train,
                              const ClassWeights& weights, const Matrix& x_valid,
                              const SoftLabelMatrix& y_valid) {
  auto configs = grid.expand(base);
  if (configs.empty()) throw ValidationError("grid search: empty grid");
  GridSearchOutcome out;
  std::vector<BoostedEnsemble> models(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    GridResult r;
    r.config_id = i;
    r.config = configs[i];
    if (r.config.early_stopping_rounds == 0) r.config.early_stopping_rounds = 10;
    try {
      models[i] = fit_gbdt(x_train, y_train, weights, r.config, ValidationSet{x_valid, y_valid});
      r.best_round = models[i].best_round;
      r.valid_brier = models[i].valid_history.empty()
                          ? std::numeric_limits<double>::infinity()
                          : models[i].valid_history[models[i].best_round - 1];
    } catch (const std::exception& e) {
      r.error = e.what();
      warn("grid config " + std::to_string(i) + " failed: " + r.error);
    }
    out.table.push_back(std::move(r));
  }
  std::size_t best = select_best(out.table);
  out.best = out.table[best].config;
  out.best_model = std::move(models[best]);
  return out;
}

std::string grid_table_csv(const std::vector<GridResult>& table) {
  std::ostringstream out;
  out << "config_id,max_depth,min_child_weight,colsample,subsample,learning_rate,valid_brier,"
         "best_round\n";
  char buf[64];
  for (const auto& r : table) {
    out << r.config_id << ',' << r.config.tree.max_depth << ',' << r.config.tree.min_child_weight
        << ',' << r.config.tree.colsample << ',' << r.config.subsample << ','
        << r.config.learning_rate << ',';
    if (r.valid_brier) {
      std::snprintf(buf, sizeof buf, "%.6f", *r.valid_brier);
      out << buf << ',' << r.best_round;
    } else {
      out << ',';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace softboost

#include "softboost/learners.hpp"

#include <cmath>
#include <random>

namespace softboost {

void ForestConfig::validate() const {
  if (n_trees < 1) throw ValidationError("n_trees must be >= 1");
  tree.validate();
}

ForestConfig extra_trees_config(ForestConfig base) {
  base.bootstrap = false;
  base.tree.randomized_thresholds = true;
  return base;
}

Forest fit_forest(const Matrix& x, const SoftLabelMatrix& labels, const ClassWeights& weights,
                  const ForestConfig& config) {
  config.validate();
  if (x.rows() == 0) throw ValidationError("fit_forest: empty input");
  if (labels.rows() != x.rows()) throw ValidationError("fit_forest: label rows differ");
  Forest forest;
  forest.config = config;
  forest.n_features = x.cols();
  forest.n_classes = labels.cols();
  forest.trees.resize(static_cast<std::size_t>(config.n_trees));
  const SortedColumns sorted(x);
  parallel_for(forest.trees.size(), [&](std::size_t i) {
    TreeConfig tc = config.tree;
    tc.seed = config.seed + i;
    std::vector<std::size_t> sample;
    if (config.bootstrap) {
      std::mt19937_64 rng(mix_seed({tc.seed, 0xb007u}));
      std::uniform_int_distribution<std::size_t> pick(0, x.rows() - 1);
      sample.resize(x.rows());
      for (auto& s : sample) s = pick(rng);
    }
    forest.trees[i] = build_probability_tree(x, labels, weights, tc, sample, &sorted);
  });
  return forest;
}

ScoreMatrix forest_predict(const Forest& forest, const Matrix& x) {
  if (x.cols() != forest.n_features) {
    throw ValidationError("forest_predict: " + std::to_string(x.cols()) +
                          " features, forest expects " + std::to_string(forest.n_features));
  }
  Matrix out(x.rows(), forest.n_classes, 0.0);
  const double inv = 1.0 / static_cast<double>(forest.trees.size());
  parallel_for(x.rows(), [&](std::size_t r) {
    auto row = x.row(r);
    auto dst = out.row(r);
    for (const auto& t : forest.trees) {
      auto leaf = t.predict(row);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += leaf[c];
    }
    double sum = 0.0;
    for (double& v : dst) {
      v *= inv;
      sum += v;
    }
    for (double& v : dst) v /= sum;
  });
  return ScoreMatrix::probability(std::move(out));
}

GaussianNB fit_gaussian_nb(const Matrix& x, const std::vector<int>& labels,
                           std::size_t n_classes) {
  const std::size_t n = x.rows();
  const std::size_t f_count = x.cols();
  if (n == 0) throw ValidationError("fit_gaussian_nb: empty input");
  if (labels.size() != n) throw ValidationError("fit_gaussian_nb: label count differs");
  for (double v : x.data()) {
    if (is_missing(v)) throw ValidationError("fit_gaussian_nb: features must be complete");
  }
  GaussianNB m;
  m.priors.assign(n_classes, 0.0);
  m.means = Matrix(n_classes, f_count, 0.0);
  m.variances = Matrix(n_classes, f_count, 0.0);
  std::vector<double> counts(n_classes, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= n_classes) {
      throw ValidationError("fit_gaussian_nb: label out of range at row " + std::to_string(r));
    }
    auto c = static_cast<std::size_t>(labels[r]);
    counts[c] += 1.0;
    for (std::size_t f = 0; f < f_count; ++f) m.means(c, f) += x(r, f);
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (counts[c] == 0.0) {
      warn("naive Bayes: class " + std::to_string(c) + " absent from training data");
      continue;
    }
    for (std::size_t f = 0; f < f_count; ++f) m.means(c, f) /= counts[c];
  }
  for (std::size_t r = 0; r < n; ++r) {
    auto c = static_cast<std::size_t>(labels[r]);
    for (std::size_t f = 0; f < f_count; ++f) {
      double d = x(r, f) - m.means(c, f);
      m.variances(c, f) += d * d;
    }
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    m.priors[c] = counts[c] / static_cast<double>(n);
    for (std::size_t f = 0; f < f_count; ++f) {
      double v = counts[c] > 0.0 ? m.variances(c, f) / counts[c] : 1.0;
      m.variances(c, f) = std::max(v, kNbVarianceFloor);
    }
  }
  return m;
}

ScoreMatrix nb_predict(const GaussianNB& m, const Matrix& x) {
  const std::size_t n_cls = m.priors.size();
  const std::size_t f_count = m.means.cols();
  if (x.cols() != f_count) throw ValidationError("nb_predict: feature count mismatch");
  Matrix out(x.rows(), n_cls);
  constexpr double kLog2Pi = 1.8378770664093453;  // ln(2 pi)
  parallel_for(x.rows(), [&](std::size_t r) {
    std::vector<double> logp(n_cls, -std::numeric_limits<double>::infinity());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_cls; ++c) {
      if (m.priors[c] <= 0.0) continue;
      double lp = std::log(m.priors[c]);
      for (std::size_t f = 0; f < f_count; ++f) {
        double v = x(r, f);
        if (is_missing(v)) throw ValidationError("nb_predict: missing feature");
        double d = v - m.means(c, f);
        double var = m.variances(c, f);
        lp -= 0.5 * (kLog2Pi + std::log(var) + d * d / var);
      }
      logp[c] = lp;
      best = std::max(best, lp);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < n_cls; ++c) {
      double e = m.priors[c] > 0.0 ? std::exp(logp[c] - best) : 0.0;
      out(r, c) = e;
      sum += e;
    }
    for (std::size_t c = 0; c < n_cls; ++c) out(r, c) /= sum;
  });
  return ScoreMatrix::probability(std::move(out));
}

}  // namespace softboost

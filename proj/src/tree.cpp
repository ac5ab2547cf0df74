#include "softboost/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace softboost {

void TreeConfig::validate() const {
  if (max_depth < 1) throw ValidationError("max_depth must be >= 1");
  if (!(colsample > 0.0 && colsample <= 1.0)) throw ValidationError("colsample must be in (0,1]");
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  if (!(gamma >= 0.0)) throw ValidationError("gamma must be >= 0");
  if (!(min_child_weight >= 0.0)) throw ValidationError("min_child_weight must be >= 0");
}

Tree::Tree(TreeKind kind, std::size_t n_features, std::vector<TreeNode> nodes)
    : kind_(kind), n_features_(n_features), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ValidationError("tree has no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) continue;
    if (static_cast<std::size_t>(n.feature) >= n_features_ || n.left <= static_cast<int>(i) ||
        n.right <= static_cast<int>(i) || static_cast<std::size_t>(n.left) >= nodes_.size() ||
        static_cast<std::size_t>(n.right) >= nodes_.size() || !std::isfinite(n.threshold)) {
      throw ValidationError("malformed tree node " + std::to_string(i));
    }
  }
}

std::size_t Tree::leaf_index(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    double v = row[static_cast<std::size_t>(n.feature)];
    bool go_left = is_missing(v) ? n.default_left : v < n.threshold;
    i = static_cast<std::size_t>(go_left ? n.left : n.right);
  }
  return i;
}

std::span<const double> Tree::predict(std::span<const double> row) const {
  return nodes_[leaf_index(row)].value;
}

int Tree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

void Tree::scale_values(double factor) {
  for (auto& n : nodes_) {
    for (double& v : n.value) v *= factor;
  }
}

SortedColumns::SortedColumns(const Matrix& x) : columns_(x.cols()) {
  parallel_for(x.cols(), [&](std::size_t f) {
    auto& col = columns_[f];
    for (std::size_t r = 0; r < x.rows(); ++r) {
      double v = x(r, f);
      if (!is_missing(v)) col.push_back({static_cast<std::uint32_t>(r), v});
    }
    std::sort(col.begin(), col.end(), [](const Entry& a, const Entry& b) {
      return a.value < b.value || (a.value == b.value && a.row < b.row);
    });
  });
}

std::span<const double> tree_predict(const Tree& tree, std::span<const double> row) {
  if (row.size() != tree.n_features()) {
    throw ValidationError("row has " + std::to_string(row.size()) + " features, tree expects " +
                          std::to_string(tree.n_features()));
  }
  return tree.predict(row);
}

namespace {

// Level-wise exact greedy builder shared by both tree kinds. Node statistics
// are flat vectors of length `dim_`:
//   regression:  (sum g, sum h, weight)
//   probability: (sum y_0 .. sum y_{C-1}, weight)
// where every row term is multiplied by the row's weight.
class Builder {
 public:
  Builder(TreeKind kind, const Matrix& x, const TreeConfig& cfg, const SortedColumns* presorted,
          std::vector<double> row_stats, std::size_t dim, std::vector<double> class_weights)
      : kind_(kind),
        x_(x),
        cfg_(cfg),
        presorted_(presorted),
        row_stats_(std::move(row_stats)),
        dim_(dim),
        class_weights_(std::move(class_weights)) {}

  Tree build() {
    const std::size_t n = x_.rows();
    positions_.assign(n, -1);
    std::vector<double> root(dim_, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const double* s = &row_stats_[r * dim_];
      if (s[dim_ - 1] <= 0.0) continue;
      positions_[r] = 0;
      for (std::size_t d = 0; d < dim_; ++d) root[d] += s[d];
    }
    if (!(root[dim_ - 1] > 0.0)) throw ValidationError("tree fit on an empty row set");

    choose_features();
    if (!presorted_) {
      owned_sorted_ = SortedColumns(x_);
      presorted_ = &owned_sorted_;
    }

    nodes_.emplace_back();
    stats_.push_back(root);
    std::vector<int> open{0};
    for (int depth = 0; depth < cfg_.max_depth && !open.empty(); ++depth) {
      open = split_level(open);
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) set_value(i);
    return Tree(kind_, x_.cols(), std::move(nodes_));
  }

 private:
  struct Candidate {
    double gain = -std::numeric_limits<double>::infinity();
    int feature = -1;
    double threshold = 0.0;
    bool default_left = true;
    std::vector<double> left;  // statistics routed left, missing included
  };

  void choose_features() {
    const std::size_t f_count = x_.cols();
    std::size_t k = static_cast<std::size_t>(std::llround(cfg_.colsample * static_cast<double>(f_count)));
    k = std::clamp<std::size_t>(k, 1, std::max<std::size_t>(f_count, 1));
    features_.resize(f_count);
    std::iota(features_.begin(), features_.end(), 0);
    if (k < f_count) {
      std::mt19937_64 rng(mix_seed({cfg_.seed, 0xC01u}));
      std::shuffle(features_.begin(), features_.end(), rng);
      features_.resize(k);
      std::sort(features_.begin(), features_.end());
    }
  }

  double score(const double* s) const {
    const double w = s[dim_ - 1];
    if (kind_ == TreeKind::regression) {
      const double denom = s[1] + cfg_.lambda;
      return denom > 0.0 ? s[0] * s[0] / denom : 0.0;
    }
    if (w <= 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < dim_; ++c) acc += class_weights_[c] * s[c] * s[c];
    return acc / w;
  }

  double gain(const double* left, const double* right, const double* parent) const {
    double g = score(left) + score(right) - score(parent);
    return kind_ == TreeKind::regression ? 0.5 * g : g;
  }

  bool admissible(const double* s) const {
    const double w = s[dim_ - 1];
    if (!(w > 0.0)) return false;
    if (kind_ == TreeKind::regression) return s[1] >= cfg_.min_child_weight;
    return w >= cfg_.min_child_weight;
  }

  void consider(Candidate& best, const double* left, const double* parent, int feature,
                double threshold, bool default_left, double* scratch) const {
    for (std::size_t d = 0; d < dim_; ++d) scratch[d] = parent[d] - left[d];
    if (!admissible(left) || !admissible(scratch)) return;
    double g = gain(left, scratch, parent);
    if (g > best.gain) {
      best.gain = g;
      best.feature = feature;
      best.threshold = threshold;
      best.default_left = default_left;
      best.left.assign(left, left + dim_);
    }
  }

  std::vector<Candidate> scan_feature(std::size_t f, const std::vector<int>& slot_of,
                                      const std::vector<int>& open) const {
    const std::size_t slots = open.size();
    std::vector<Candidate> best(slots);
    std::vector<double> present(slots * dim_, 0.0);
    std::vector<double> lo(slots, std::numeric_limits<double>::infinity());
    std::vector<double> hi(slots, -std::numeric_limits<double>::infinity());
    auto column = presorted_->column(f);

    for (const auto& e : column) {
      int node = positions_[e.row];
      if (node < 0 || slot_of[static_cast<std::size_t>(node)] < 0) continue;
      std::size_t s = static_cast<std::size_t>(slot_of[static_cast<std::size_t>(node)]);
      const double* rs = &row_stats_[e.row * dim_];
      for (std::size_t d = 0; d < dim_; ++d) present[s * dim_ + d] += rs[d];
      lo[s] = std::min(lo[s], e.value);
      hi[s] = std::max(hi[s], e.value);
    }

    std::vector<double> missing(slots * dim_);
    std::vector<double> running(slots * dim_, 0.0);
    std::vector<double> scratch(dim_), with_missing(dim_);
    for (std::size_t s = 0; s < slots; ++s) {
      const auto& total = stats_[static_cast<std::size_t>(open[s])];
      for (std::size_t d = 0; d < dim_; ++d) {
        missing[s * dim_ + d] = total[d] - present[s * dim_ + d];
      }
    }
    const int feature = static_cast<int>(f);

    if (cfg_.randomized_thresholds) {
      std::vector<double> threshold(slots, std::numeric_limits<double>::quiet_NaN());
      for (std::size_t s = 0; s < slots; ++s) {
        if (!(lo[s] < hi[s])) continue;
        std::mt19937_64 rng(mix_seed({cfg_.seed, static_cast<std::uint64_t>(open[s]), f}));
        threshold[s] = std::uniform_real_distribution<double>(lo[s], hi[s])(rng);
        if (!(threshold[s] > lo[s])) threshold[s] = hi[s];
      }
      for (const auto& e : column) {
        int node = positions_[e.row];
        if (node < 0 || slot_of[static_cast<std::size_t>(node)] < 0) continue;
        std::size_t s = static_cast<std::size_t>(slot_of[static_cast<std::size_t>(node)]);
        if (!(e.value < threshold[s])) continue;
        const double* rs = &row_stats_[e.row * dim_];
        for (std::size_t d = 0; d < dim_; ++d) running[s * dim_ + d] += rs[d];
      }
      for (std::size_t s = 0; s < slots; ++s) {
        if (is_missing(threshold[s])) continue;
        const double* parent = stats_[static_cast<std::size_t>(open[s])].data();
        const double* left = &running[s * dim_];
        const double* miss = &missing[s * dim_];
        const double left_w = left[dim_ - 1];
        const double right_w = present[s * dim_ + dim_ - 1] - left_w;
        // Missing rows follow the heavier present side, ties left.
        bool default_left = left_w >= right_w;
        if (default_left) {
          for (std::size_t d = 0; d < dim_; ++d) with_missing[d] = left[d] + miss[d];
          consider(best[s], with_missing.data(), parent, feature, threshold[s], true,
                   scratch.data());
        } else {
          consider(best[s], left, parent, feature, threshold[s], false, scratch.data());
        }
      }
      return best;
    }

    // Missing rows split off on their own: every present value goes right.
    for (std::size_t s = 0; s < slots; ++s) {
      const double* miss = &missing[s * dim_];
      if (miss[dim_ - 1] > 0.0 && present[s * dim_ + dim_ - 1] > 0.0) {
        consider(best[s], miss, stats_[static_cast<std::size_t>(open[s])].data(), feature, lo[s],
                 true, scratch.data());
      }
    }

    std::vector<double> last(slots, 0.0);
    std::vector<char> started(slots, 0);
    for (const auto& e : column) {
      int node = positions_[e.row];
      if (node < 0 || slot_of[static_cast<std::size_t>(node)] < 0) continue;
      std::size_t s = static_cast<std::size_t>(slot_of[static_cast<std::size_t>(node)]);
      double* left = &running[s * dim_];
      if (started[s] && e.value > last[s]) {
        double thr = last[s] + (e.value - last[s]) * 0.5;
        if (!(thr > last[s])) thr = e.value;
        const double* parent = stats_[static_cast<std::size_t>(open[s])].data();
        const double* miss = &missing[s * dim_];
        if (miss[dim_ - 1] > 0.0) {
          consider(best[s], left, parent, feature, thr, false, scratch.data());
          for (std::size_t d = 0; d < dim_; ++d) with_missing[d] = left[d] + miss[d];
          consider(best[s], with_missing.data(), parent, feature, thr, true, scratch.data());
        } else {
          const double left_w = left[dim_ - 1];
          consider(best[s], left, parent, feature, thr, left_w >= parent[dim_ - 1] - left_w,
                   scratch.data());
        }
      }
      const double* rs = &row_stats_[e.row * dim_];
      for (std::size_t d = 0; d < dim_; ++d) left[d] += rs[d];
      last[s] = e.value;
      started[s] = 1;
    }
    return best;
  }

  std::vector<int> split_level(const std::vector<int>& open) {
    std::vector<int> slot_of(nodes_.size(), -1);
    for (std::size_t s = 0; s < open.size(); ++s) slot_of[static_cast<std::size_t>(open[s])] = static_cast<int>(s);

    std::vector<std::vector<Candidate>> per_feature(features_.size());
    parallel_for(features_.size(), [&](std::size_t i) {
      per_feature[i] = scan_feature(features_[i], slot_of, open);
    });

    std::vector<int> next;
    std::vector<int> split_node_left(nodes_.size(), -1);
    for (std::size_t s = 0; s < open.size(); ++s) {
      Candidate best;
      for (const auto& cands : per_feature) {
        if (cands[s].gain > best.gain) best = cands[s];
      }
      const std::size_t id = static_cast<std::size_t>(open[s]);
      const double parent_score = std::abs(score(stats_[id].data()));
      if (best.feature < 0 || !(best.gain > cfg_.gamma + 1e-12 * (1.0 + parent_score))) continue;

      std::vector<double> right(dim_);
      for (std::size_t d = 0; d < dim_; ++d) right[d] = stats_[id][d] - best.left[d];
      const int left_id = static_cast<int>(nodes_.size());
      nodes_.emplace_back();
      nodes_.emplace_back();
      stats_.push_back(best.left);
      stats_.push_back(std::move(right));
      auto& node = nodes_[id];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.default_left = best.default_left;
      node.left = left_id;
      node.right = left_id + 1;
      node.gain = best.gain;
      split_node_left.resize(nodes_.size(), -1);
      split_node_left[id] = left_id;
      next.push_back(left_id);
      next.push_back(left_id + 1);
    }

    for (std::size_t r = 0; r < positions_.size(); ++r) {
      int node = positions_[r];
      if (node < 0 || split_node_left[static_cast<std::size_t>(node)] < 0) continue;
      const auto& n = nodes_[static_cast<std::size_t>(node)];
      double v = x_(r, static_cast<std::size_t>(n.feature));
      bool go_left = is_missing(v) ? n.default_left : v < n.threshold;
      positions_[r] = go_left ? n.left : n.right;
    }
    return next;
  }

  void set_value(std::size_t id) {
    const auto& s = stats_[id];
    auto& node = nodes_[id];
    node.weight = kind_ == TreeKind::regression ? s[1] : s[dim_ - 1];
    if (kind_ == TreeKind::regression) {
      node.grad_sum = s[0];
      node.value = {-s[0] / (s[1] + cfg_.lambda)};
    } else {
      node.value.resize(dim_ - 1);
      double total = 0.0;
      for (std::size_t c = 0; c + 1 < dim_; ++c) {
        node.value[c] = std::max(0.0, s[c] / s[dim_ - 1]);
        total += node.value[c];
      }
      for (double& v : node.value) v /= total;
    }
  }

  TreeKind kind_;
  const Matrix& x_;
  TreeConfig cfg_;
  const SortedColumns* presorted_;
  SortedColumns owned_sorted_;
  std::vector<double> row_stats_;
  std::size_t dim_;
  std::vector<double> class_weights_;
  std::vector<std::size_t> features_;
  std::vector<int> positions_;
  std::vector<TreeNode> nodes_;
  std::vector<std::vector<double>> stats_;
};

}  // namespace

Tree build_regression_tree(const Matrix& x, std::span<const double> grad,
                           std::span<const double> hess, const TreeConfig& config,
                           const SortedColumns* presorted, std::span<const double> row_weight) {
  config.validate();
  const std::size_t n = x.rows();
  if (n == 0) throw ValidationError("build_regression_tree: empty input");
  if (grad.size() != n || hess.size() != n || (!row_weight.empty() && row_weight.size() != n)) {
    throw ValidationError("build_regression_tree: gradient/hessian length differs from rows");
  }
  if (presorted && presorted->n_features() != x.cols()) {
    throw ValidationError("presorted columns do not match the feature matrix");
  }
  std::vector<double> stats(n * 3);
  for (std::size_t r = 0; r < n; ++r) {
    if (hess[r] < 0.0) throw ValidationError("negative hessian at row " + std::to_string(r));
    double m = row_weight.empty() ? 1.0 : row_weight[r];
    stats[r * 3] = m * grad[r];
    stats[r * 3 + 1] = m * hess[r];
    stats[r * 3 + 2] = m;
  }
  Builder b(TreeKind::regression, x, config, presorted, std::move(stats), 3, {});
  return b.build();
}

Tree build_probability_tree(const Matrix& x, const SoftLabelMatrix& labels,
                            const ClassWeights& weights, const TreeConfig& config,
                            std::span<const std::size_t> bootstrap_indices,
                            const SortedColumns* presorted) {
  config.validate();
  const std::size_t n = x.rows();
  const std::size_t c_count = labels.cols();
  if (n == 0) throw ValidationError("build_probability_tree: empty input");
  if (labels.rows() != n) throw ValidationError("build_probability_tree: label rows differ");
  if (weights.size() != c_count) throw ValidationError("build_probability_tree: weight count");
  std::vector<double> multiplicity(n, bootstrap_indices.empty() ? 1.0 : 0.0);
  for (std::size_t i : bootstrap_indices) {
    if (i >= n) throw ValidationError("bootstrap index out of range");
    multiplicity[i] += 1.0;
  }
  const std::size_t dim = c_count + 1;
  std::vector<double> stats(n * dim);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < c_count; ++c) stats[r * dim + c] = multiplicity[r] * labels(r, c);
    stats[r * dim + c_count] = multiplicity[r];
  }
  Builder b(TreeKind::probability, x, config, presorted, std::move(stats), dim, weights.values());
  return b.build();
}

std::vector<ImportanceEntry> feature_importance(std::span<const Tree> trees,
                                                const std::vector<std::string>& names) {
  std::vector<double> total(names.size(), 0.0);
  for (const auto& t : trees) {
    if (t.n_features() != names.size()) throw ValidationError("importance: name count mismatch");
    for (const auto& n : t.nodes()) {
      if (!n.is_leaf()) total[static_cast<std::size_t>(n.feature)] += n.gain;
    }
  }
  double sum = std::accumulate(total.begin(), total.end(), 0.0);
  std::vector<ImportanceEntry> out;
  for (std::size_t f = 0; f < names.size(); ++f) {
    out.push_back({names[f], sum > 0.0 ? total[f] / sum : 0.0});
  }
  std::sort(out.begin(), out.end(), [](const ImportanceEntry& a, const ImportanceEntry& b) {
    return a.share > b.share || (a.share == b.share && a.name < b.name);
  });
  return out;
}

std::string format_importance_table(const std::vector<ImportanceEntry>& ranked,
                                    std::size_t top_n) {
  std::size_t width = std::string("Feature name").size();
  const std::size_t n = std::min(top_n, ranked.size());
  for (std::size_t i = 0; i < n; ++i) width = std::max(width, ranked[i].name.size());
  std::ostringstream out;
  out << "# importance metric: total split gain\n";
  auto line = [&](const std::string& a, const std::string& b) {
    out << "| " << a << std::string(width - a.size(), ' ') << " | " << b << " |\n";
  };
  line("Feature name", "Importance (%)");
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", 100.0 * ranked[i].share);
    line(ranked[i].name, buf);
  }
  return out.str();
}

GainAudit audit_split_gains(const Tree& tree, const TreeConfig& config,
                            const ClassWeights* weights) {
  GainAudit audit;
  const auto& nodes = tree.nodes();
  auto score = [&](const TreeNode& n) {
    if (tree.kind() == TreeKind::regression) {
      return n.grad_sum * n.grad_sum / (n.weight + config.lambda);
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < n.value.size(); ++c) {
      double s = n.value[c] * n.weight;
      acc += (weights ? (*weights)[c] : 1.0) * s * s;
    }
    return n.weight > 0.0 ? acc / n.weight : 0.0;
  };
  for (const auto& n : nodes) {
    if (n.is_leaf()) continue;
    const auto& l = nodes[static_cast<std::size_t>(n.left)];
    const auto& r = nodes[static_cast<std::size_t>(n.right)];
    double g = score(l) + score(r) - score(n);
    if (tree.kind() == TreeKind::regression) g *= 0.5;
    ++audit.splits;
    if (g < config.gamma) ++audit.below_gamma;
    audit.max_mismatch = std::max(audit.max_mismatch, std::abs(g - n.gain));
  }
  return audit;
}

}  // namespace softboost

#include "softboost/data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace softboost {

namespace {

void check_distribution_rows(const Matrix& m, const char* what) {
  for (std::size_t n = 0; n < m.rows(); ++n) {
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      double v = m(n, c);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError(std::string(what) + ": entry (" + std::to_string(n) + "," +
                              std::to_string(c) + ") = " + std::to_string(v) +
                              " is outside [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
      throw ValidationError(std::string(what) + ": row " + std::to_string(n) + " sums to " +
                            std::to_string(sum));
    }
  }
}

}  // namespace

SoftLabelMatrix::SoftLabelMatrix(Matrix values) : values_(std::move(values)) {
  check_distribution_rows(values_, "soft labels");
}

SoftLabelMatrix SoftLabelMatrix::one_hot(const std::vector<int>& labels, std::size_t n_classes) {
  Matrix m(labels.size(), n_classes);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (labels[n] < 0 || static_cast<std::size_t>(labels[n]) >= n_classes) {
      throw ValidationError("label " + std::to_string(labels[n]) + " out of range");
    }
    m(n, static_cast<std::size_t>(labels[n])) = 1.0;
  }
  return SoftLabelMatrix(std::move(m));
}

SoftLabelMatrix SoftLabelMatrix::select_rows(std::span<const std::size_t> idx) const {
  SoftLabelMatrix out;
  out.values_ = values_.select_rows(idx);
  return out;
}

ClassWeights::ClassWeights(std::vector<double> weights) : weights_(std::move(weights)) {
  for (std::size_t c = 0; c < weights_.size(); ++c) {
    if (!(weights_[c] > 0.0) || !std::isfinite(weights_[c])) {
      throw ValidationError("class weight " + std::to_string(c) + " must be positive and finite");
    }
  }
}

ScoreMatrix ScoreMatrix::raw(Matrix values) {
  for (std::size_t i = 0; i < values.data().size(); ++i) {
    if (!std::isfinite(values.data()[i])) {
      throw ValidationError("raw score (" + std::to_string(i / std::max<std::size_t>(values.cols(), 1)) +
                            "," + std::to_string(i % std::max<std::size_t>(values.cols(), 1)) +
                            ") is not finite");
    }
  }
  return ScoreMatrix(std::move(values), ScoreKind::raw);
}

ScoreMatrix ScoreMatrix::probability(Matrix values) {
  check_distribution_rows(values, "probabilities");
  return ScoreMatrix(std::move(values), ScoreKind::probability);
}

std::optional<std::size_t> FrameTable::find_column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns.begin());
}

std::size_t FrameTable::column_index(const std::string& name) const {
  auto idx = find_column(name);
  if (!idx) throw ValidationError("unknown column '" + name + "'");
  return *idx;
}

SoftLabelMatrix FrameTable::soft_labels() const {
  if (!labels) throw ValidationError("frame table has no soft labels");
  return SoftLabelMatrix(*labels);
}

FrameTable FrameTable::select_rows(std::span<const std::size_t> idx) const {
  FrameTable out;
  out.columns = columns;
  out.n_classes = n_classes;
  out.keys.reserve(idx.size());
  for (std::size_t i : idx) out.keys.push_back(keys[i]);
  out.features = features.select_rows(idx);
  if (room) {
    out.room.emplace();
    for (std::size_t i : idx) out.room->push_back((*room)[i]);
  }
  if (labels) out.labels = labels->select_rows(idx);
  return out;
}

void FrameTable::append_columns(const std::vector<std::string>& names, const Matrix& values) {
  if (values.rows() != size() || values.cols() != names.size()) {
    throw ValidationError("append_columns: shape mismatch");
  }
  for (const auto& n : names) {
    if (find_column(n)) throw ValidationError("duplicate column '" + n + "'");
  }
  features = features.cols() == 0 ? values : features.hconcat(values);
  columns.insert(columns.end(), names.begin(), names.end());
}

void FrameTable::drop_columns(const std::vector<std::string>& names) {
  std::vector<std::size_t> keep;
  std::vector<std::string> kept_names;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (std::find(names.begin(), names.end(), columns[j]) == names.end()) {
      keep.push_back(j);
      kept_names.push_back(columns[j]);
    }
  }
  features = features.select_cols(keep);
  columns = std::move(kept_names);
}

std::vector<Violation> validate_table(const FrameTable& t) {
  std::vector<Violation> out;
  if (t.features.rows() != t.size() || t.features.cols() != t.columns.size()) {
    out.push_back({0, "arity",
                   "feature matrix is " + std::to_string(t.features.rows()) + "x" +
                       std::to_string(t.features.cols()) + ", expected " +
                       std::to_string(t.size()) + "x" + std::to_string(t.columns.size())});
    return out;
  }
  if (t.room && t.room->size() != t.size()) {
    out.push_back({0, "arity", "room column length differs from row count"});
  }

  std::map<RowKey, std::size_t> seen;
  std::map<std::pair<int, int>, std::vector<std::pair<int, std::size_t>>> seconds;
  for (std::size_t r = 0; r < t.size(); ++r) {
    auto [it, inserted] = seen.emplace(t.keys[r], r);
    if (!inserted) {
      out.push_back({r, "uniqueness",
                     "key duplicates row " + std::to_string(it->second)});
      continue;
    }
    seconds[{t.keys[r].participant_id, t.keys[r].subsequence_id}].push_back(
        {t.keys[r].second_index, r});
  }
  for (auto& [sub, secs] : seconds) {
    std::sort(secs.begin(), secs.end());
    for (std::size_t i = 0; i < secs.size(); ++i) {
      if (secs[i].first != static_cast<int>(i)) {
        out.push_back({secs[i].second, "consecutive",
                       "subsequence (" + std::to_string(sub.first) + "," +
                           std::to_string(sub.second) + ") second " +
                           std::to_string(secs[i].first) + " where " + std::to_string(i) +
                           " was expected"});
        break;
      }
    }
  }

  if (t.labels) {
    const Matrix& y = *t.labels;
    if (y.rows() != t.size() || y.cols() != t.n_classes) {
      out.push_back({0, "arity", "label matrix shape differs from rows x n_classes"});
    } else {
      for (std::size_t r = 0; r < y.rows(); ++r) {
        double sum = 0.0;
        bool in_range = true;
        for (std::size_t c = 0; c < y.cols(); ++c) {
          double v = y(r, c);
          if (!(v >= 0.0 && v <= 1.0)) in_range = false;
          sum += v;
        }
        if (!in_range) out.push_back({r, "label_range", "soft label entry outside [0,1]"});
        if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
          out.push_back({r, "label_sum", "soft label sums to " + std::to_string(sum)});
        }
      }
    }
  }
  return out;
}

std::vector<int> harden_labels(const SoftLabelMatrix& labels) {
  std::vector<int> out(labels.rows());
  for (std::size_t n = 0; n < labels.rows(); ++n) {
    auto row = labels.row(n);
    out[n] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

ClassWeights class_weights_from_frequency(const SoftLabelMatrix& labels) {
  const std::size_t n = labels.rows();
  const std::size_t c_count = labels.cols();
  if (n == 0 || c_count == 0) throw ValidationError("class weights need a nonempty label matrix");
  std::vector<double> weights(c_count, 0.0);
  std::vector<double> column(n);
  std::vector<std::size_t> empty_classes;
  double max_weight = 0.0;
  for (std::size_t c = 0; c < c_count; ++c) {
    for (std::size_t r = 0; r < n; ++r) column[r] = labels(r, c);
    double mass = pairwise_sum(column);
    if (mass <= 0.0) {
      empty_classes.push_back(c);
      continue;
    }
    weights[c] = static_cast<double>(n) / mass;
    max_weight = std::max(max_weight, weights[c]);
  }
  for (std::size_t c : empty_classes) {
    warn("class " + std::to_string(c) + " has zero label mass; using the largest weight");
    weights[c] = max_weight;
  }
  double total = pairwise_sum(weights);
  for (double& w : weights) w *= static_cast<double>(c_count) / total;
  return ClassWeights(std::move(weights));
}

std::vector<int> participants_of(const FrameTable& table) {
  std::set<int> ids;
  for (const auto& k : table.keys) ids.insert(k.participant_id);
  return {ids.begin(), ids.end()};
}

}  // namespace softboost

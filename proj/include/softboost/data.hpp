#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "softboost/common.hpp"

namespace softboost {

inline constexpr double kProbabilityTolerance = 1e-9;

/// N x C matrix of annotator proportions; every row is a distribution.
class SoftLabelMatrix {
 public:
  SoftLabelMatrix() = default;
  explicit SoftLabelMatrix(Matrix values);

  static SoftLabelMatrix one_hot(const std::vector<int>& labels, std::size_t n_classes);

  const Matrix& values() const { return values_; }
  std::size_t rows() const { return values_.rows(); }
  std::size_t cols() const { return values_.cols(); }
  double operator()(std::size_t n, std::size_t c) const { return values_(n, c); }
  std::span<const double> row(std::size_t n) const { return values_.row(n); }

  SoftLabelMatrix select_rows(std::span<const std::size_t> idx) const;

 private:
  Matrix values_;
};

/// Positive, finite per-class weights.
class ClassWeights {
 public:
  ClassWeights() = default;
  explicit ClassWeights(std::vector<double> weights);
  static ClassWeights uniform(std::size_t n_classes) {
    return ClassWeights(std::vector<double>(n_classes, 1.0));
  }

  const std::vector<double>& values() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t c) const { return weights_[c]; }

 private:
  std::vector<double> weights_;
};

enum class ScoreKind { raw, probability };

/// Raw (pre-softmax) scores or probabilities, tagged with which one it is.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  static ScoreMatrix raw(Matrix values);
  static ScoreMatrix probability(Matrix values);

  ScoreKind kind() const { return kind_; }
  const Matrix& values() const { return values_; }
  std::size_t rows() const { return values_.rows(); }
  std::size_t cols() const { return values_.cols(); }
  double operator()(std::size_t n, std::size_t c) const { return values_(n, c); }
  std::span<const double> row(std::size_t n) const { return values_.row(n); }

 private:
  ScoreMatrix(Matrix values, ScoreKind kind) : values_(std::move(values)), kind_(kind) {}
  Matrix values_;
  ScoreKind kind_ = ScoreKind::raw;
};

struct RowKey {
  int participant_id = 0;
  int subsequence_id = 0;
  int second_index = 0;
  auto operator<=>(const RowKey&) const = default;
};

inline constexpr int kNoRoom = -1;

/// Per-second feature rows keyed by (participant, subsequence, second).
///
/// Features live in one row-major matrix; NaN marks a missing cell. The room
/// column and the soft labels are table-level optional: either every row
/// carries the field (room may still hold kNoRoom per row) or none does.
struct FrameTable {
  std::vector<std::string> columns;
  std::size_t n_classes = 0;
  std::vector<RowKey> keys;
  Matrix features;
  std::optional<std::vector<int>> room;
  std::optional<Matrix> labels;

  std::size_t size() const { return keys.size(); }
  std::optional<double> feature(std::size_t row, std::size_t col) const {
    double v = features(row, col);
    if (is_missing(v)) return std::nullopt;
    return v;
  }
  /// Throws ValidationError for unknown names.
  std::size_t column_index(const std::string& name) const;
  std::optional<std::size_t> find_column(const std::string& name) const;

  /// Soft labels wrapped (and validated) as a SoftLabelMatrix.
  SoftLabelMatrix soft_labels() const;

  /// Rows picked by index; all optional fields follow.
  FrameTable select_rows(std::span<const std::size_t> idx) const;
  /// Appends columns (names + values). Row counts must agree.
  void append_columns(const std::vector<std::string>& names, const Matrix& values);
  /// Drops the named columns; unknown names are ignored.
  void drop_columns(const std::vector<std::string>& names);
};

struct Violation {
  std::size_t row;
  std::string rule;
  std::string message;
};

/// Returns every broken FrameTable invariant; empty means the table is valid.
std::vector<Violation> validate_table(const FrameTable& table);

/// Argmax per row, ties to the lowest class index.
std::vector<int> harden_labels(const SoftLabelMatrix& labels);

/// Inverse class frequency, rescaled so the weights sum to C. A class with
/// zero total mass falls back to the largest computed weight (with a warning).
ClassWeights class_weights_from_frequency(const SoftLabelMatrix& labels);

/// Distinct participant ids, ascending.
std::vector<int> participants_of(const FrameTable& table);

}  // namespace softboost

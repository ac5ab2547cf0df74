#pragma once

#include <utility>
#include <vector>

#include "softboost/data.hpp"

namespace softboost {

/// Default floor applied to diagonal Hessian entries. Softmax-Brier second
/// partials can be negative; they are clamped to this value, not to |h|.
inline constexpr double kDefaultHessMin = 1e-16;

struct GradHess {
  Matrix grad;
  Matrix hess;
};

struct GradOptions {
  double hess_min = kDefaultHessMin;
  /// When false the derivatives are those of the mean loss (factor 1/N).
  /// When true the 1/N factor is dropped, giving per-instance derivatives,
  /// which is what a boosting round consumes.
  bool per_instance = false;
};

/// Row-wise softmax with max subtraction. Rejects non-finite input.
ScoreMatrix softmax_rows(const ScoreMatrix& raw);

/// (1/N) sum_n sum_c w_c (P[n,c] - Y[n,c])^2, reduced by pairwise summation
/// over per-row terms.
double brier_score(const ScoreMatrix& probabilities, const SoftLabelMatrix& labels,
                   const ClassWeights& weights);

/// brier_score(softmax_rows(raw), labels, weights).
double brier_loss(const ScoreMatrix& raw, const SoftLabelMatrix& labels,
                  const ClassWeights& weights);

/// Gradient and diagonal Hessian of brier_loss with respect to each raw
/// score. Only row n contributes to the partials of raw[n, *]:
///
///   a_c  = w_c (s_c - y_c)
///   S    = sum_c a_c s_c
///   dL/dp_k   = 2 s_k (a_k - S)
///   d2L/dp_k2 = 2 [ s_k(1-s_k)(a_k - S)
///                 + s_k ( w_k s_k (1-s_k) - dS/dp_k ) ]
///   dS/dp_k   = s_k (w_k s_k + a_k) - s_k sum_c (w_c s_c + a_c) s_c
///
/// with s = softmax(raw[n]), scaled by 1/N unless options.per_instance.
GradHess brier_grad_hess(const ScoreMatrix& raw, const SoftLabelMatrix& labels,
                         const ClassWeights& weights, const GradOptions& options = {});

/// Softmax cross-entropy against soft targets: grad = s - y,
/// hess = s (1 - s) floored at hess_min. No 1/N factor.
GradHess logloss_grad_hess(const ScoreMatrix& raw, const SoftLabelMatrix& labels,
                           const GradOptions& options = {});

/// Resolution parameter K of the hard-target approximation.
class Resolution {
 public:
  explicit Resolution(int k);
  int k() const { return k_; }

 private:
  int k_;
};

enum class DuplicationMode { floor, largest_remainder };

struct DuplicatedRows {
  FrameTable table;                      // one row per copy
  std::vector<int> labels;               // hard label of each copy
  std::vector<std::size_t> source_rows;  // source row of each copy
  std::size_t dropped_rows = 0;          // floor mode rows that got no copy
};

/// Expands each soft-labelled row into hard-labelled copies.
/// floor: floor(K * y_c) copies of class c (at most K per row; rows getting
/// none are dropped with a warning). largest_remainder: exactly K copies,
/// leftover copies go to the largest fractional parts, ties to the lower
/// class index.
DuplicatedRows duplicate_for_resolution(const FrameTable& table, const SoftLabelMatrix& labels,
                                        Resolution k, DuplicationMode mode = DuplicationMode::floor);

/// Per-class copy counts for one soft-label row.
std::vector<int> resolution_counts(std::span<const double> label_row, Resolution k,
                                   DuplicationMode mode);

struct ApproxExactGap {
  double approx;
  double exact;
  /// (1/N) sum w_c (2 y/K + 2 p/K + 1/K^2); |approx - exact| never exceeds it.
  double bound;
};

/// The approximate (probabilities quantized to floor(K p)/K) and exact
/// expanded-square Brier losses for a probability matrix.
ApproxExactGap approx_exact_gap(const ScoreMatrix& probabilities, const SoftLabelMatrix& labels,
                                const ClassWeights& weights, Resolution k);

}  // namespace softboost

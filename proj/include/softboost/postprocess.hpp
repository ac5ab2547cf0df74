#pragma once

#include <array>
#include <vector>

#include "softboost/data.hpp"

namespace softboost {

/// Weights for offsets -2..+2 seconds; non-negative, summing to 1.
class SmoothKernel {
 public:
  SmoothKernel() : weights_{0.0, 0.0, 1.0, 0.0, 0.0} {}
  explicit SmoothKernel(std::array<double, 5> weights);

  static SmoothKernel identity() { return {}; }
  const std::array<double, 5>& weights() const { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::array<double, 5> weights_;
};

/// For each row, the row indices at offsets -2..+2 within its subsequence
/// (-1 outside it), derived from the row keys.
class SequenceStructure {
 public:
  SequenceStructure() = default;
  explicit SequenceStructure(const std::vector<RowKey>& keys);

  std::size_t size() const { return neighbours_.size(); }
  const std::array<long, 5>& neighbours(std::size_t row) const { return neighbours_[row]; }

 private:
  std::vector<std::array<long, 5>> neighbours_;
};

/// out[s] = sum_d k[d] P[s+d] over offsets inside the subsequence, with the
/// used weights renormalized to 1.
ScoreMatrix smooth(const ScoreMatrix& probabilities, const SequenceStructure& structure,
                   const SmoothKernel& kernel);

struct SmoothFit {
  SmoothKernel kernel;
  double identity_brier = 0.0;
  double best_brier = 0.0;
  int sweeps = 0;
};

/// Cyclic coordinate descent over the 5-weight simplex: each step runs a
/// golden-section search on the segment from the current kernel to one
/// vertex. Starts at the identity kernel and only accepts improvements, so
/// the result never scores worse than the identity.
SmoothFit optimize_smooth_weights(const ScoreMatrix& probabilities, const SoftLabelMatrix& labels,
                                  const ClassWeights& weights, const SequenceStructure& structure,
                                  double tolerance = 1e-7, int max_sweeps = 100);

}  // namespace softboost

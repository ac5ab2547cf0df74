#include "softboost/postprocess.hpp"

#include <cmath>
#include <map>

#include "softboost/objectives.hpp"

namespace softboost {

SmoothKernel::SmoothKernel(std::array<double, 5> weights) : weights_(weights) {
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("kernel weights must be finite and >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("kernel weights must sum to 1");
}

SequenceStructure::SequenceStructure(const std::vector<RowKey>& keys) {
  std::map<RowKey, long> position;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!position.emplace(keys[i], static_cast<long>(i)).second) {
      throw ValidationError("duplicate row key in sequence structure");
    }
  }
  neighbours_.resize(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (int d = -2; d <= 2; ++d) {
      RowKey k = keys[i];
      k.second_index += d;
      auto it = position.find(k);
      neighbours_[i][static_cast<std::size_t>(d + 2)] = it == position.end() ? -1 : it->second;
    }
  }
}

ScoreMatrix smooth(const ScoreMatrix& probabilities, const SequenceStructure& structure,
                   const SmoothKernel& kernel) {
  if (probabilities.kind() != ScoreKind::probability) {
    throw ValidationError("smooth expects probabilities");
  }
  if (structure.size() != probabilities.rows()) {
    throw ValidationError("sequence structure does not match prediction rows");
  }
  const std::size_t n = probabilities.rows(), c = probabilities.cols();
  Matrix out(n, c, 0.0);
  parallel_for(n, [&](std::size_t s) {
    const auto& nb = structure.neighbours(s);
    double used = 0.0;
    for (std::size_t d = 0; d < 5; ++d) {
      if (nb[d] >= 0 && kernel[d] > 0.0) used += kernel[d];
    }
    auto dst = out.row(s);
    if (used <= 0.0) {
      // All weight falls outside the subsequence.
      auto src = probabilities.row(s);
      std::copy(src.begin(), src.end(), dst.begin());
      return;
    }
    for (std::size_t d = 0; d < 5; ++d) {
      if (nb[d] < 0 || kernel[d] <= 0.0) continue;
      const double w = kernel[d] / used;
      auto src = probabilities.row(static_cast<std::size_t>(nb[d]));
      for (std::size_t j = 0; j < c; ++j) dst[j] += w * src[j];
    }
  });
  return ScoreMatrix::probability(std::move(out));
}

namespace {

std::array<double, 5> blend(const std::array<double, 5>& a, std::size_t vertex, double t) {
  std::array<double, 5> r{};
  for (std::size_t i = 0; i < 5; ++i) r[i] = (1.0 - t) * a[i] + (i == vertex ? t : 0.0);
  double sum = 0.0;
  for (double v : r) sum += v;
  for (double& v : r) v /= sum;
  return r;
}

}  // namespace

SmoothFit optimize_smooth_weights(const ScoreMatrix& probabilities, const SoftLabelMatrix& labels,
                                  const ClassWeights& weights, const SequenceStructure& structure,
                                  double tolerance, int max_sweeps) {
  auto score = [&](const std::array<double, 5>& k) {
    return brier_score(smooth(probabilities, structure, SmoothKernel(k)), labels, weights);
  };
  SmoothFit fit;
  std::array<double, 5> current = SmoothKernel::identity().weights();
  fit.identity_brier = score(current);
  double best = fit.identity_brier;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double sweep_start = best;
    for (std::size_t v = 0; v < 5; ++v) {
      double lo = 0.0, hi = 1.0;
      double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
      double f1 = score(blend(current, v, x1)), f2 = score(blend(current, v, x2));
      while (hi - lo > 1e-6) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - inv_phi * (hi - lo);
          f1 = score(blend(current, v, x1));
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + inv_phi * (hi - lo);
          f2 = score(blend(current, v, x2));
        }
      }
      double t = f1 < f2 ? x1 : x2;
      double ft = std::min(f1, f2);
      const double f_end = score(blend(current, v, 1.0));
      if (f_end < ft) {
        t = 1.0;
        ft = f_end;
      }
      if (ft < best) {
        best = ft;
        current = blend(current, v, t);
      }
    }
    fit.sweeps = sweep + 1;
    if (sweep_start - best < tolerance) break;
  }
  fit.kernel = SmoothKernel(current);
  fit.best_brier = best;
  return fit;
}

}  // namespace softboost

#include "softboost/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace softboost {

namespace {

void require_raw(const ScoreMatrix& m) {
  if (m.kind() != ScoreKind::raw) throw ValidationError("expected raw scores");
}

void require_shapes(const ScoreMatrix& s, const SoftLabelMatrix& y) {
  if (s.rows() != y.rows() || s.cols() != y.cols()) {
    throw ValidationError("score matrix is " + std::to_string(s.rows()) + "x" +
                          std::to_string(s.cols()) + " but labels are " +
                          std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
  }
}

void require_weights(const ClassWeights& w, std::size_t n_classes) {
  if (w.size() != n_classes) {
    throw ValidationError("expected " + std::to_string(n_classes) + " class weights, got " +
                          std::to_string(w.size()));
  }
}

void softmax_into(std::span<const double> raw, std::span<double> out) {
  double m = *std::max_element(raw.begin(), raw.end());
  double sum = 0.0;
  for (std::size_t c = 0; c < raw.size(); ++c) {
    out[c] = std::exp(raw[c] - m);
    sum += out[c];
  }
  for (double& v : out) v /= sum;
}

void check_finite(double v, std::size_t n, std::size_t c, const char* what) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string(what) + " is not finite at (" + std::to_string(n) + "," +
                       std::to_string(c) + ")");
  }
}

// Floors k * x, tolerating products like 0.29 * 100 = 28.999999999999996.
double quantize_count(double x, int k) {
  return std::floor(static_cast<double>(k) * x * (1.0 + 1e-12));
}

}  // namespace

ScoreMatrix softmax_rows(const ScoreMatrix& raw) {
  require_raw(raw);
  Matrix out(raw.rows(), raw.cols());
  for (std::size_t n = 0; n < raw.rows(); ++n) softmax_into(raw.row(n), out.row(n));
  return ScoreMatrix::probability(std::move(out));
}

double brier_score(const ScoreMatrix& p, const SoftLabelMatrix& y, const ClassWeights& w) {
  if (p.kind() != ScoreKind::probability) throw ValidationError("brier_score expects probabilities");
  require_shapes(p, y);
  require_weights(w, y.cols());
  if (p.rows() == 0) throw ValidationError("brier_score of an empty matrix");
  std::vector<double> per_row(p.rows());
  for (std::size_t n = 0; n < p.rows(); ++n) {
    double s = 0.0;
    for (std::size_t c = 0; c < p.cols(); ++c) {
      double d = p(n, c) - y(n, c);
      s += w[c] * d * d;
    }
    per_row[n] = s;
  }
  return pairwise_sum(per_row) / static_cast<double>(p.rows());
}

double brier_loss(const ScoreMatrix& raw, const SoftLabelMatrix& y, const ClassWeights& w) {
  return brier_score(softmax_rows(raw), y, w);
}

GradHess brier_grad_hess(const ScoreMatrix& raw, const SoftLabelMatrix& y, const ClassWeights& w,
                         const GradOptions& options) {
  require_raw(raw);
  require_shapes(raw, y);
  require_weights(w, y.cols());
  const std::size_t n_rows = raw.rows();
  const std::size_t n_cls = raw.cols();
  const double scale = options.per_instance ? 1.0 : 1.0 / static_cast<double>(n_rows);
  GradHess out{Matrix(n_rows, n_cls), Matrix(n_rows, n_cls)};

  parallel_for(n_rows, [&](std::size_t n) {
    std::vector<double> s(n_cls);
    std::vector<double> a(n_cls);
    softmax_into(raw.row(n), s);
    double big_s = 0.0;  // sum_c a_c s_c
    double t = 0.0;      // sum_c (w_c s_c + a_c) s_c
    for (std::size_t c = 0; c < n_cls; ++c) {
      a[c] = w[c] * (s[c] - y(n, c));
      big_s += a[c] * s[c];
      t += (w[c] * s[c] + a[c]) * s[c];
    }
    for (std::size_t k = 0; k < n_cls; ++k) {
      const double sk = s[k];
      const double g = 2.0 * sk * (a[k] - big_s);
      const double ds = sk * (w[k] * sk + a[k]) - sk * t;
      const double h = 2.0 * (sk * (1.0 - sk) * (a[k] - big_s) + sk * (w[k] * sk * (1.0 - sk) - ds));
      check_finite(g, n, k, "softmax-Brier gradient");
      check_finite(h, n, k, "softmax-Brier hessian");
      out.grad(n, k) = scale * g;
      out.hess(n, k) = std::max(scale * h, options.hess_min);
    }
  });
  return out;
}

GradHess logloss_grad_hess(const ScoreMatrix& raw, const SoftLabelMatrix& y,
                           const GradOptions& options) {
  require_raw(raw);
  require_shapes(raw, y);
  const std::size_t n_rows = raw.rows();
  const std::size_t n_cls = raw.cols();
  GradHess out{Matrix(n_rows, n_cls), Matrix(n_rows, n_cls)};
  parallel_for(n_rows, [&](std::size_t n) {
    std::vector<double> s(n_cls);
    softmax_into(raw.row(n), s);
    for (std::size_t k = 0; k < n_cls; ++k) {
      double g = s[k] - y(n, k);
      double h = s[k] * (1.0 - s[k]);
      check_finite(g, n, k, "logloss gradient");
      out.grad(n, k) = g;
      out.hess(n, k) = std::max(h, options.hess_min);
    }
  });
  return out;
}

Resolution::Resolution(int k) : k_(k) {
  if (k < 1) throw ValidationError("resolution K must be >= 1, got " + std::to_string(k));
}

std::vector<int> resolution_counts(std::span<const double> y, Resolution k, DuplicationMode mode) {
  const std::size_t n_cls = y.size();
  std::vector<int> counts(n_cls);
  int assigned = 0;
  for (std::size_t c = 0; c < n_cls; ++c) {
    counts[c] = static_cast<int>(quantize_count(y[c], k.k()));
    assigned += counts[c];
  }
  if (mode == DuplicationMode::largest_remainder) {
    std::vector<std::size_t> order(n_cls);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> frac(n_cls);
    for (std::size_t c = 0; c < n_cls; ++c) {
      frac[c] = static_cast<double>(k.k()) * y[c] - counts[c];
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t i = 0; assigned < k.k(); i = (i + 1) % n_cls) {
      ++counts[order[i]];
      ++assigned;
    }
  }
  return counts;
}

DuplicatedRows duplicate_for_resolution(const FrameTable& table, const SoftLabelMatrix& y,
                                        Resolution k, DuplicationMode mode) {
  if (y.rows() != table.size()) throw ValidationError("labels and table row counts differ");
  DuplicatedRows out;
  std::vector<std::size_t> copies;
  for (std::size_t n = 0; n < y.rows(); ++n) {
    auto counts = resolution_counts(y.row(n), k, mode);
    std::size_t before = copies.size();
    for (std::size_t c = 0; c < counts.size(); ++c) {
      for (int i = 0; i < counts[c]; ++i) {
        copies.push_back(n);
        out.labels.push_back(static_cast<int>(c));
      }
    }
    if (copies.size() == before) ++out.dropped_rows;
  }
  if (out.dropped_rows > 0) {
    warn(std::to_string(out.dropped_rows) + " rows received no copies at resolution K=" +
         std::to_string(k.k()) + " and were dropped");
  }
  out.table = table.select_rows(copies);
  out.table.labels = SoftLabelMatrix::one_hot(out.labels, y.cols()).values();
  out.table.n_classes = y.cols();
  out.source_rows = std::move(copies);
  return out;
}

ApproxExactGap approx_exact_gap(const ScoreMatrix& p, const SoftLabelMatrix& y,
                                const ClassWeights& w, Resolution k) {
  if (p.kind() != ScoreKind::probability) throw ValidationError("expected probabilities");
  require_shapes(p, y);
  require_weights(w, y.cols());
  if (p.rows() == 0) throw ValidationError("approx_exact_gap of an empty matrix");
  const double kk = static_cast<double>(k.k());
  std::vector<double> approx(p.rows()), exact(p.rows()), bound(p.rows());
  for (std::size_t n = 0; n < p.rows(); ++n) {
    double sa = 0.0, se = 0.0, sb = 0.0;
    for (std::size_t c = 0; c < p.cols(); ++c) {
      const double yc = y(n, c);
      const double pc = p(n, c);
      const double q = quantize_count(pc, k.k()) / kk;
      sa += w[c] * (yc * yc - 2.0 * yc * q + q * q);
      se += w[c] * (yc * yc - 2.0 * yc * pc + pc * pc);
      sb += w[c] * (2.0 * yc / kk + 2.0 * pc / kk + 1.0 / (kk * kk));
    }
    approx[n] = sa;
    exact[n] = se;
    bound[n] = sb;
  }
  const double inv_n = 1.0 / static_cast<double>(p.rows());
  return {pairwise_sum(approx) * inv_n, pairwise_sum(exact) * inv_n, pairwise_sum(bound) * inv_n};
}

}  // namespace softboost

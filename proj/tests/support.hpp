#pragma once

// Random inputs and independent reference computations shared by the tests.

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <quadmath.h>

#include "softboost/data.hpp"

namespace testing_support {

using softboost::ClassWeights;
using softboost::Matrix;
using softboost::ScoreMatrix;
using softboost::SoftLabelMatrix;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform() < p; }
  std::mt19937_64& engine() { return rng_; }

  Matrix raw_scores(std::size_t n, std::size_t c, double scale = 2.0) {
    Matrix m(n, c);
    for (double& v : m.data()) v = normal(0.0, scale);
    return m;
  }

  /// Random distributions; `sparsity` is the chance a cell is forced to 0.
  Matrix distributions(std::size_t n, std::size_t c, double sparsity = 0.0) {
    Matrix m(n, c);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        double v = coin(sparsity) ? 0.0 : -std::log(uniform(1e-12, 1.0));
        m(i, j) = v;
        sum += v;
      }
      if (sum == 0.0) {
        m(i, static_cast<std::size_t>(integer(0, static_cast<int>(c) - 1))) = 1.0;
        sum = 1.0;
      }
      for (std::size_t j = 0; j < c; ++j) m(i, j) /= sum;
    }
    return m;
  }

  std::vector<double> positive_weights(std::size_t c) {
    std::vector<double> w(c);
    for (double& v : w) v = uniform(0.2, 3.0);
    return w;
  }

  Matrix features(std::size_t n, std::size_t f, double missing = 0.0) {
    Matrix m(n, f);
    for (double& v : m.data()) v = coin(missing) ? softboost::kMissing : normal();
    return m;
  }

 private:
  std::mt19937_64 rng_;
};

struct Blobs {
  Matrix x;
  Matrix y;
  std::vector<int> label;
};

/// `n` rows around `k` well separated Gaussian centres in `f` dimensions,
/// one-hot labelled by centre.
inline Blobs gaussian_blobs(Gen& g, std::size_t n, std::size_t k, std::size_t f, double spread = 0.5) {
  Matrix centres(k, f);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < f; ++j) centres(c, j) = (j == c % f ? 4.0 : 0.0) * (c < f ? 1.0 : -1.0);
  }
  Blobs b{Matrix(n, f), Matrix(n, k), std::vector<int>(n)};
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c = r % k;
    b.label[r] = static_cast<int>(c);
    b.y(r, c) = 1.0;
    for (std::size_t j = 0; j < f; ++j) b.x(r, j) = centres(c, j) + g.normal(0.0, spread);
  }
  return b;
}

using Quad = __float128;

inline Quad abs_q(Quad v) { return v < 0 ? -v : v; }

/// Probabilities and log-probabilities of one softmax row.
struct Softmax {
  std::vector<Quad> p;
  std::vector<Quad> logp;
};

/// Softmax of a fixed row with one coordinate shifted; the exponentials of
/// the untouched coordinates are computed once.
class SoftmaxRow {
 public:
  explicit SoftmaxRow(std::vector<Quad> raw) : raw_(std::move(raw)), e_(raw_.size()) {
    mx_ = raw_[0];
    for (auto v : raw_) mx_ = v > mx_ ? v : mx_;
    for (std::size_t j = 0; j < raw_.size(); ++j) {
      e_[j] = expq(raw_[j] - mx_);
      z_ += e_[j];
    }
  }

  Softmax shifted(std::size_t k, Quad delta) const {
    const Quad ek = expq(raw_[k] + delta - mx_);
    const Quad z = z_ - e_[k] + ek;
    const Quad lz = logq(z);
    Softmax s{std::vector<Quad>(raw_.size()), std::vector<Quad>(raw_.size())};
    for (std::size_t j = 0; j < raw_.size(); ++j) {
      s.p[j] = (j == k ? ek : e_[j]) / z;
      s.logp[j] = raw_[j] + (j == k ? delta : 0) - mx_ - lz;
    }
    return s;
  }

 private:
  std::vector<Quad> raw_;
  std::vector<Quad> e_;
  Quad mx_ = 0;
  Quad z_ = 0;
};

/// Softmax-Brier loss of one row.
inline Quad row_brier_loss(const Softmax& s, const std::vector<double>& y, const std::vector<double>& w) {
  Quad loss = 0;
  for (std::size_t c = 0; c < s.p.size(); ++c) {
    const Quad d = s.p[c] - y[c];
    loss += w[c] * d * d;
  }
  return loss;
}

/// Soft-target cross-entropy of one row.
inline Quad row_logloss(const Softmax& s, const std::vector<double>& y) {
  Quad loss = 0;
  for (std::size_t c = 0; c < s.logp.size(); ++c) loss -= y[c] * s.logp[c];
  return loss;
}

inline std::vector<Quad> row_quad(const Matrix& m, std::size_t n) {
  std::vector<Quad> r(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) r[c] = m(n, c);
  return r;
}

/// Central finite differences of a row loss: first and second derivative
/// with respect to coordinate k.
template <class Loss>
std::pair<Quad, Quad> central_diff(Loss loss, const SoftmaxRow& row, std::size_t k, Quad h) {
  const Quad fp = loss(row.shifted(k, h));
  const Quad fm = loss(row.shifted(k, -h));
  const Quad f0 = loss(row.shifted(k, 0));
  return {(fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (h * h)};
}

/// |analytic - fd| below 1e-8, or relative error below 1e-5. `worst` tracks
/// the largest relative error over entries with a nonzero reference.
inline bool fd_match(double analytic, Quad fd, double* worst = nullptr) {
  const Quad diff = abs_q(static_cast<Quad>(analytic) - fd);
  const double rel = fd == 0 ? 0.0 : static_cast<double>(diff / abs_q(fd));
  if (worst) *worst = std::max(*worst, rel);
  return diff < static_cast<Quad>(1e-8) || rel < 1e-5;
}

/// Plain double-loop Brier score, summed left to right.
inline double naive_brier(const Matrix& p, const Matrix& y, const std::vector<double>& w) {
  double total = 0.0;
  for (std::size_t n = 0; n < p.rows(); ++n) {
    for (std::size_t c = 0; c < p.cols(); ++c) total += w[c] * (p(n, c) - y(n, c)) * (p(n, c) - y(n, c));
  }
  return total / static_cast<double>(p.rows());
}

inline bool close(double a, double b, double rel, double abs_tol) {
  return std::abs(a - b) <= std::max(abs_tol, rel * std::max(std::abs(a), std::abs(b)));
}

/// A temporary directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string path() const { return path_; }
  std::string file(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

}  // namespace testing_support

#include <cmath>
#include <limits>

#include "doctest.h"
#include "softboost/objectives.hpp"
#include "support.hpp"

using namespace softboost;
using testing_support::Gen;

namespace {

using testing_support::fd_match;
using testing_support::Quad;
using testing_support::row_quad;

std::vector<double> row_d(const Matrix& m, std::size_t n) {
  return {m.row(n).begin(), m.row(n).end()};
}

}  // namespace

TEST_CASE("brier score fixtures") {
  const auto w2 = ClassWeights::uniform(2);
  auto y = SoftLabelMatrix(Matrix::from_rows({{1, 0}}));
  CHECK(brier_score(ScoreMatrix::probability(Matrix::from_rows({{1, 0}})), y, w2) == 0.0);
  CHECK(brier_score(ScoreMatrix::probability(Matrix::from_rows({{0, 1}})), y, w2) == 2.0);
  auto y4 = SoftLabelMatrix(Matrix::from_rows({{0, 0, 1, 0}}));
  CHECK(brier_score(ScoreMatrix::probability(Matrix::from_rows({{0.25, 0.25, 0.25, 0.25}})), y4,
                    ClassWeights::uniform(4)) == doctest::Approx(0.75).epsilon(1e-15));
  auto weighted = brier_score(ScoreMatrix::probability(Matrix::from_rows({{0, 1}})), y, ClassWeights({3.0, 0.5}));
  CHECK(weighted == doctest::Approx(3.5));
}

TEST_CASE("brier score agrees with a plain double loop") {
  Gen g(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 200));
    const std::size_t c = static_cast<std::size_t>(g.integer(2, 10));
    auto p = g.distributions(n, c, 0.2);
    auto y = g.distributions(n, c, 0.5);
    auto w = g.positive_weights(c);
    double got = brier_score(ScoreMatrix::probability(p), SoftLabelMatrix(y), ClassWeights(w));
    CHECK(testing_support::close(got, testing_support::naive_brier(p, y, w), 1e-12, 1e-15));
    CHECK(got >= 0.0);
  }
}

TEST_CASE("brier score rejects mismatched inputs") {
  auto p = ScoreMatrix::probability(Matrix::from_rows({{0.5, 0.5}}));
  auto y3 = SoftLabelMatrix(Matrix::from_rows({{1, 0, 0}}));
  CHECK_THROWS_AS(brier_score(p, y3, ClassWeights::uniform(3)), ValidationError);
  auto y2 = SoftLabelMatrix(Matrix::from_rows({{1, 0}}));
  CHECK_THROWS_AS(brier_score(p, y2, ClassWeights::uniform(3)), ValidationError);
  CHECK_THROWS_AS(brier_score(ScoreMatrix::raw(Matrix::from_rows({{0.5, 0.5}})), y2, ClassWeights::uniform(2)),
                  ValidationError);
}

TEST_CASE("brier loss is brier score of the softmax") {
  Gen g(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 40));
    const std::size_t c = static_cast<std::size_t>(g.integer(2, 20));
    auto raw = ScoreMatrix::raw(g.raw_scores(n, c, 5.0));
    SoftLabelMatrix y(g.distributions(n, c, 0.5));
    ClassWeights w(g.positive_weights(c));
    CHECK(brier_loss(raw, y, w) == brier_score(softmax_rows(raw), y, w));
  }
}

TEST_CASE("softmax is shift invariant and rows sum to one") {
  Gen g(1);
  auto m = g.raw_scores(30, 7, 50.0);
  auto s = softmax_rows(ScoreMatrix::raw(m));
  Matrix shifted = m;
  for (double& v : shifted.data()) v += 123.0;
  auto s2 = softmax_rows(ScoreMatrix::raw(shifted));
  for (std::size_t n = 0; n < 30; ++n) {
    double sum = 0;
    for (std::size_t c = 0; c < 7; ++c) {
      sum += s(n, c);
      CHECK(s(n, c) == doctest::Approx(s2(n, c)).epsilon(1e-12));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("softmax-Brier derivatives match finite differences") {
  Gen g(2024);
  const Quad h = 1e-5;
  GradOptions raw_hess{-std::numeric_limits<double>::infinity(), false};
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 12;
    const std::size_t c = static_cast<std::size_t>(g.integer(2, 12));
    auto raw = g.raw_scores(n, c, 2.0);
    auto y = g.distributions(n, c, 0.4);
    auto w = g.positive_weights(c);
    auto gh = brier_grad_hess(ScoreMatrix::raw(raw), SoftLabelMatrix(y), ClassWeights(w), raw_hess);
    const auto yw = w;
    for (std::size_t r = 0; r < n; ++r) {
      const auto yr = row_d(y, r);
      auto loss = [&](const testing_support::Softmax& x) {
        return testing_support::row_brier_loss(x, yr, yw) / static_cast<Quad>(n);
      };
      const testing_support::SoftmaxRow row(row_quad(raw, r));
      for (std::size_t k = 0; k < c; ++k) {
        auto [fg, fh] = testing_support::central_diff(loss, row, k, h);
        CHECK(fd_match(gh.grad(r, k), fg));
        CHECK(fd_match(gh.hess(r, k), fh));
      }
    }
  }
}

TEST_CASE("per-instance derivatives drop the 1/N factor") {
  Gen g(8);
  auto raw = ScoreMatrix::raw(g.raw_scores(20, 5));
  SoftLabelMatrix y(g.distributions(20, 5));
  ClassWeights w(g.positive_weights(5));
  GradOptions mean{-std::numeric_limits<double>::infinity(), false};
  GradOptions inst{-std::numeric_limits<double>::infinity(), true};
  auto a = brier_grad_hess(raw, y, w, mean);
  auto b = brier_grad_hess(raw, y, w, inst);
  for (std::size_t i = 0; i < a.grad.data().size(); ++i) {
    CHECK(b.grad.data()[i] / 20.0 == doctest::Approx(a.grad.data()[i]).epsilon(1e-14));
    CHECK(b.hess.data()[i] / 20.0 == doctest::Approx(a.hess.data()[i]).epsilon(1e-14));
  }
}

TEST_CASE("gradient rows sum to zero and hessian floor is applied") {
  Gen g(77);
  bool saw_negative = false;
  for (int trial = 0; trial < 30; ++trial) {
    auto raw = ScoreMatrix::raw(g.raw_scores(10, 6, 3.0));
    SoftLabelMatrix y(g.distributions(10, 6, 0.5));
    ClassWeights w(g.positive_weights(6));
    auto unclamped = brier_grad_hess(raw, y, w, {-std::numeric_limits<double>::infinity(), true});
    auto clamped = brier_grad_hess(raw, y, w, {kDefaultHessMin, true});
    for (std::size_t n = 0; n < 10; ++n) {
      double s = 0;
      for (std::size_t k = 0; k < 6; ++k) {
        s += clamped.grad(n, k);
        const double u = unclamped.hess(n, k);
        if (u < 0) saw_negative = true;
        CHECK(clamped.hess(n, k) == std::max(u, kDefaultHessMin));
        CHECK(clamped.hess(n, k) >= kDefaultHessMin);
      }
      CHECK(std::abs(s) < 1e-12);
    }
  }
  CHECK(saw_negative);
}

TEST_CASE("logloss derivatives match finite differences") {
  Gen g(31);
  const Quad h = 1e-5;
  GradOptions no_floor{-std::numeric_limits<double>::infinity(), false};
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t c = static_cast<std::size_t>(g.integer(2, 12));
    auto raw = g.raw_scores(8, c, 2.0);
    auto y = g.distributions(8, c, 0.4);
    auto gh = logloss_grad_hess(ScoreMatrix::raw(raw), SoftLabelMatrix(y), no_floor);
    for (std::size_t r = 0; r < 8; ++r) {
      const auto yr = row_d(y, r);
      auto loss = [&](const testing_support::Softmax& x) { return testing_support::row_logloss(x, yr); };
      const testing_support::SoftmaxRow row(row_quad(raw, r));
      for (std::size_t k = 0; k < c; ++k) {
        auto [fg, fh] = testing_support::central_diff(loss, row, k, h);
        CHECK(fd_match(gh.grad(r, k), fg));
        CHECK(fd_match(gh.hess(r, k), fh));
      }
    }
  }
}

TEST_CASE("gradients reject non-finite scores") {
  Matrix raw = Matrix::from_rows({{1.0, 2.0}});
  raw(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ScoreMatrix::raw(raw), ValidationError);
}

TEST_CASE("resolution counts") {
  std::vector<double> y{0.7, 0.1, 0.2};
  CHECK(resolution_counts(y, Resolution(10), DuplicationMode::floor) == std::vector<int>{7, 1, 2});
  CHECK(resolution_counts(y, Resolution(10), DuplicationMode::largest_remainder) == std::vector<int>{7, 1, 2});
  std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(resolution_counts(thirds, Resolution(10), DuplicationMode::floor) == std::vector<int>{3, 3, 3});
  CHECK(resolution_counts(thirds, Resolution(10), DuplicationMode::largest_remainder) ==
        std::vector<int>{4, 3, 3});
  CHECK_THROWS_AS(Resolution(0), ValidationError);
}

TEST_CASE("resolution count properties") {
  Gen g(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t c = static_cast<std::size_t>(g.integer(2, 8));
    auto y = g.distributions(1, c, 0.3);
    const int k = g.integer(1, 200);
    auto fl = resolution_counts(y.row(0), Resolution(k), DuplicationMode::floor);
    auto lr = resolution_counts(y.row(0), Resolution(k), DuplicationMode::largest_remainder);
    int fsum = 0, lsum = 0;
    for (std::size_t i = 0; i < c; ++i) {
      CHECK(fl[i] >= 0);
      CHECK(fl[i] <= static_cast<int>(std::floor(k * y(0, i) + 1e-9)));
      CHECK(lr[i] >= fl[i]);
      CHECK(lr[i] <= fl[i] + 1);
      fsum += fl[i];
      lsum += lr[i];
    }
    CHECK(fsum <= k);
    CHECK(lsum == k);
  }
}

TEST_CASE("duplication expands rows into hard-labelled copies") {
  FrameTable t;
  t.columns = {"x"};
  t.n_classes = 3;
  t.keys = {{1, 0, 0}, {1, 0, 1}};
  t.features = Matrix::from_rows({{1.5}, {2.5}});
  t.labels = Matrix::from_rows({{0.7, 0.1, 0.2}, {0.05, 0.05, 0.9}});
  auto d = duplicate_for_resolution(t, t.soft_labels(), Resolution(10));
  CHECK(d.table.size() == 19);
  CHECK(d.dropped_rows == 0);
  int c0 = 0;
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    if (d.source_rows[i] == 0 && d.labels[i] == 0) ++c0;
    CHECK(d.table.features(i, 0) == t.features(d.source_rows[i], 0));
    CHECK((*d.table.labels)(i, static_cast<std::size_t>(d.labels[i])) == 1.0);
  }
  CHECK(c0 == 7);

  t.labels = Matrix::from_rows({{0.34, 0.33, 0.33}, {0.05, 0.05, 0.9}});
  auto k1 = duplicate_for_resolution(t, t.soft_labels(), Resolution(1));
  CHECK(k1.dropped_rows == 2);
  CHECK(k1.table.size() == 0);
}

TEST_CASE("approximate and exact losses stay within the quantization bound") {
  Gen g(404);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 50));
    const std::size_t c = static_cast<std::size_t>(g.integer(2, 10));
    auto p = ScoreMatrix::probability(g.distributions(n, c, 0.2));
    SoftLabelMatrix y(g.distributions(n, c, 0.5));
    ClassWeights w(g.positive_weights(c));
    for (int k : {1, 3, 10, 64, 1000}) {
      auto gap = approx_exact_gap(p, y, w, Resolution(k));
      CHECK(std::abs(gap.approx - gap.exact) <= gap.bound + 1e-12);
      CHECK(gap.exact == doctest::Approx(brier_score(p, y, w)).epsilon(1e-12));
    }
  }
}

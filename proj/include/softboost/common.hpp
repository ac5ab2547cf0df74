#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace softboost {

/// Raised when inputs violate a documented precondition (bad shapes,
/// invalid probabilities, malformed files). Maps to CLI exit status 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a computation produces a non-finite value. Maps to CLI exit
/// status 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return v != v; }

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Rows picked by index, in the given order.
  Matrix select_rows(std::span<const std::size_t> idx) const;
  /// Columns picked by index, in the given order.
  Matrix select_cols(std::span<const std::size_t> idx) const;
  /// [this | other], row counts must agree.
  Matrix hconcat(const Matrix& other) const;

  bool operator==(const Matrix& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Fixed-block pairwise summation. The result depends only on the values and
/// their order, never on how the caller scheduled the work that produced them.
double pairwise_sum(std::span<const double> values);

// Worker-count control. 1 means fully serial.
void set_num_threads(int n);
int num_threads();

/// Runs fn(i) for i in [0, n) over at most num_threads() workers with static
/// chunking. fn must only write to state owned by index i. The first
/// exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Writes a warning line to stderr and bumps the process-wide counter.
void warn(const std::string& message);
std::size_t warning_count();

/// Deterministic 64-bit mixing of several integers into one seed
/// (splitmix64 finalizer chained over the inputs).
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

}  // namespace softboost

#include "softboost/common.hpp"

#include <atomic>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>

namespace softboost {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ValidationError("matrix data size " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(rows_) + "x" +
                          std::to_string(cols_));
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw ValidationError("ragged matrix rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  Matrix out(idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto src = row(idx[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> idx) const {
  Matrix out(rows_, idx.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < idx.size(); ++j) out(r, j) = (*this)(r, idx[j]);
  }
  return out;
}

Matrix Matrix::hconcat(const Matrix& other) const {
  if (other.rows_ != rows_) throw ValidationError("hconcat: row counts differ");
  Matrix out(rows_, cols_ + other.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto a = row(r);
    auto b = other.row(r);
    auto dst = out.row(r);
    std::copy(a.begin(), a.end(), dst.begin());
    std::copy(b.begin(), b.end(), dst.begin() + static_cast<std::ptrdiff_t>(cols_));
  }
  return out;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 128;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  // Split on a block boundary so the tree shape is a function of size only.
  std::size_t blocks = (values.size() + kBlock - 1) / kBlock;
  std::size_t half = (blocks / 2) * kBlock;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {
std::atomic<int> g_threads{1};
std::atomic<std::size_t> g_warnings{0};
std::mutex g_warn_mutex;
thread_local bool t_in_worker = false;
}  // namespace

void set_num_threads(int n) { g_threads = n < 1 ? 1 : n; }
int num_threads() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(num_threads()), n);
  // Nested calls from inside a worker run serially.
  if (workers <= 1 || t_in_worker) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        std::size_t begin = n * w / workers;
        std::size_t end = n * (w + 1) / workers;
        t_in_worker = true;
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void warn(const std::string& message) {
  ++g_warnings;
  std::lock_guard lock(g_warn_mutex);
  std::cerr << "warning: " << message << '\n';
}

std::size_t warning_count() { return g_warnings; }

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::uint64_t p : parts) {
    std::uint64_t z = h ^ (p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    h = z ^ (z >> 31);
  }
  return h;
}

}  // namespace softboost

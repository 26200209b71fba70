#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "gazekit/common.hpp"

namespace gazekit {

// Dense row-major tensor, rank 1..3. Everything model-facing is rank 1 or 2;
// rank 3 exists for the container format. Scalar type is a template parameter:
// float for training/checkpoints, double for gradient-check builds.
template <class S>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int64_t> shape, S fill = S(0)) : shape_(std::move(shape)) {
    require(shape_.size() >= 1 && shape_.size() <= 3, "tensor rank must be 1..3, got ", shape_.size());
    int64_t n = 1;
    for (int64_t d : shape_) {
      require(d >= 0, "negative tensor dimension");
      n *= d;
    }
    data_.assign(static_cast<size_t>(n), fill);
  }

  static Tensor matrix(int64_t rows, int64_t cols, S fill = S(0)) {
    return Tensor({rows, cols}, fill);
  }

  static Tensor vector(int64_t n, S fill = S(0)) { return Tensor({n}, fill); }

  static Tensor from_rows(std::initializer_list<std::initializer_list<S>> rows) {
    int64_t r = static_cast<int64_t>(rows.size());
    int64_t c = r > 0 ? static_cast<int64_t>(rows.begin()->size()) : 0;
    Tensor t = matrix(r, c);
    int64_t i = 0;
    for (const auto& row : rows) {
      require(static_cast<int64_t>(row.size()) == c, "ragged initializer");
      int64_t j = 0;
      for (S v : row) t.at(i, j++) = v;
      ++i;
    }
    return t;
  }

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int64_t>& shape() const { return shape_; }
  int64_t dim(int i) const { return shape_.at(static_cast<size_t>(i)); }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  int64_t rows() const {
    require(rank() == 2, "rows(): not a matrix");
    return shape_[0];
  }
  int64_t cols() const {
    require(rank() == 2, "cols(): not a matrix");
    return shape_[1];
  }

  S* data() { return data_.data(); }
  const S* data() const { return data_.data(); }

  S& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  S operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  S& at(int64_t i) { return data_[static_cast<size_t>(i)]; }
  S at(int64_t i) const { return data_[static_cast<size_t>(i)]; }
  S& at(int64_t i, int64_t j) { return data_[static_cast<size_t>(i * shape_[1] + j)]; }
  S at(int64_t i, int64_t j) const { return data_[static_cast<size_t>(i * shape_[1] + j)]; }
  S& at(int64_t i, int64_t j, int64_t k) {
    return data_[static_cast<size_t>((i * shape_[1] + j) * shape_[2] + k)];
  }
  S at(int64_t i, int64_t j, int64_t k) const {
    return data_[static_cast<size_t>((i * shape_[1] + j) * shape_[2] + k)];
  }

  S* row_ptr(int64_t i) { return data_.data() + i * shape_[1]; }
  const S* row_ptr(int64_t i) const { return data_.data() + i * shape_[1]; }

  void fill(S v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (S v : data_) {
      if (!is_finite(v)) return false;
    }
    return true;
  }

  template <class T>
  Tensor<T> cast() const {
    Tensor<T> out(shape_);
    for (int64_t i = 0; i < size(); ++i) out[i] = static_cast<T>(data_[static_cast<size_t>(i)]);
    return out;
  }

 private:
  std::vector<int64_t> shape_;
  std::vector<S> data_;
};

template <class S>
bool bitwise_equal(const Tensor<S>& a, const Tensor<S>& b) {
  if (a.shape() != b.shape()) return false;
  for (int64_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

// ---- matrix kernels (row-major, ikj loops so the inner loop streams) ----

// C += A(m x k) * B(k x n)
template <class S>
void matmul_acc(const Tensor<S>& a, const Tensor<S>& b, Tensor<S>& c) {
  require(a.rank() == 2 && b.rank() == 2 && c.rank() == 2, "matmul: rank-2 operands required");
  const int64_t m = a.rows(), k = a.cols(), n = b.cols();
  require(b.rows() == k && c.rows() == m && c.cols() == n, "matmul: shape mismatch ", m, "x", k,
          " * ", b.rows(), "x", n);
  for (int64_t i = 0; i < m; ++i) {
    const S* arow = a.row_ptr(i);
    S* crow = c.row_ptr(i);
    for (int64_t p = 0; p < k; ++p) {
      const S av = arow[p];
      if (av == S(0)) continue;
      const S* brow = b.row_ptr(p);
      for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <class S>
Tensor<S> matmul(const Tensor<S>& a, const Tensor<S>& b) {
  Tensor<S> c = Tensor<S>::matrix(a.rows(), b.cols());
  matmul_acc(a, b, c);
  return c;
}

// C += A^T(m x k -> k x m) * B(m x n); used for weight gradients.
template <class S>
void matmul_tn_acc(const Tensor<S>& a, const Tensor<S>& b, Tensor<S>& c) {
  const int64_t m = a.rows(), k = a.cols(), n = b.cols();
  require(b.rows() == m && c.rows() == k && c.cols() == n, "matmul_tn: shape mismatch");
  for (int64_t i = 0; i < m; ++i) {
    const S* arow = a.row_ptr(i);
    const S* brow = b.row_ptr(i);
    for (int64_t p = 0; p < k; ++p) {
      const S av = arow[p];
      if (av == S(0)) continue;
      S* crow = c.row_ptr(p);
      for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C += A(m x k) * B^T(n x k -> k x n); used for input gradients.
template <class S>
void matmul_nt_acc(const Tensor<S>& a, const Tensor<S>& b, Tensor<S>& c) {
  const int64_t m = a.rows(), k = a.cols(), n = b.rows();
  require(b.cols() == k && c.rows() == m && c.cols() == n, "matmul_nt: shape mismatch");
  for (int64_t i = 0; i < m; ++i) {
    const S* arow = a.row_ptr(i);
    S* crow = c.row_ptr(i);
    for (int64_t j = 0; j < n; ++j) {
      const S* brow = b.row_ptr(j);
      S acc = S(0);
      for (int64_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] += acc;
    }
  }
}

template <class S>
Tensor<S> matmul_nt(const Tensor<S>& a, const Tensor<S>& b) {
  Tensor<S> c = Tensor<S>::matrix(a.rows(), b.rows());
  matmul_nt_acc(a, b, c);
  return c;
}

template <class S>
void axpy(S alpha, const Tensor<S>& x, Tensor<S>& y) {
  require(x.shape() == y.shape(), "axpy: shape mismatch");
  for (int64_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

template <class S>
S dot(const Tensor<S>& a, const Tensor<S>& b) {
  require(a.shape() == b.shape(), "dot: shape mismatch");
  S acc = S(0);
  for (int64_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace gazekit

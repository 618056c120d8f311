// Dense matrices over an exact field (or any ring for the arithmetic part).
#pragma once

#include "mbp/errors.hpp"

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace mbp {

template <class T>
struct Matrix {
  size_t rows_ = 0, cols_ = 0;
  std::vector<T> a;

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows_(r), cols_(c), a(r * c, T()) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    a.reserve(rows_ * cols_);
    for (auto& row : init) {
      if (row.size() != cols_) throw ShapeMismatch("ragged initializer");
      for (auto& x : row) a.push_back(x);
    }
  }

  static Matrix identity(size_t n) {
    Matrix m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = T::one();
    return m;
  }
  static Matrix zero(size_t r, size_t c) { return Matrix(r, c); }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  T& operator()(size_t i, size_t j) { return a[i * cols_ + j]; }
  const T& operator()(size_t i, size_t j) const { return a[i * cols_ + j]; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a == o.a;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  bool is_zero() const {
    for (auto& x : a)
      if (!x.is_zero()) return false;
    return true;
  }

  Matrix operator+(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeMismatch("matrix add");
    Matrix r = *this;
    for (size_t i = 0; i < a.size(); ++i) r.a[i] += o.a[i];
    return r;
  }
  Matrix operator-(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeMismatch("matrix sub");
    Matrix r = *this;
    for (size_t i = 0; i < a.size(); ++i) r.a[i] -= o.a[i];
    return r;
  }
  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw ShapeMismatch("matrix mul");
    Matrix r(rows_, o.cols_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t k = 0; k < cols_; ++k) {
        const T& x = (*this)(i, k);
        if (x.is_zero()) continue;
        for (size_t j = 0; j < o.cols_; ++j) r(i, j) += x * o(k, j);
      }
    return r;
  }
  Matrix scaled(const T& k) const {
    Matrix r = *this;
    for (auto& x : r.a) x = x * k;
    return r;
  }
  Matrix operator-() const {
    Matrix r = *this;
    for (auto& x : r.a) x = -x;
    return r;
  }

  Matrix transposed() const {
    Matrix r(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  Matrix block(size_t r0, size_t c0, size_t nr, size_t nc) const {
    Matrix r(nr, nc);
    for (size_t i = 0; i < nr; ++i)
      for (size_t j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
    return r;
  }
  void set_block(size_t r0, size_t c0, const Matrix& b) {
    for (size_t i = 0; i < b.rows_; ++i)
      for (size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }
  void add_block(size_t r0, size_t c0, const Matrix& b) {
    for (size_t i = 0; i < b.rows_; ++i)
      for (size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) += b(i, j);
  }

  Matrix pow(size_t e) const {
    if (rows_ != cols_) throw ShapeMismatch("pow of non-square");
    Matrix r = identity(rows_), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  std::string str() const {
    std::string s;
    for (size_t i = 0; i < rows_; ++i) {
      s += "[ ";
      for (size_t j = 0; j < cols_; ++j) s += (*this)(i, j).str() + " ";
      s += "]\n";
    }
    return s;
  }
};

// in-place reduced row echelon form; returns pivot columns
template <class K>
std::vector<size_t> rref(Matrix<K>& m) {
  std::vector<size_t> pivots;
  size_t row = 0;
  for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    size_t p = row;
    while (p < m.rows() && m(p, col).is_zero()) ++p;
    if (p == m.rows()) continue;
    for (size_t j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(p, j));
    K inv = m(row, col).inv();
    for (size_t j = col; j < m.cols(); ++j) m(row, j) = m(row, j) * inv;
    for (size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      K f = m(i, col);
      for (size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class K>
size_t rank(Matrix<K> m) {
  return rref(m).size();
}

// basis of the right null space, one column vector per basis element
template <class K>
std::vector<std::vector<K>> nullspace(Matrix<K> m) {
  auto pivots = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<K>> basis;
  for (size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<K> v(m.cols(), K::zero());
    v[free] = K::one();
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class K>
std::optional<Matrix<K>> try_inverse(const Matrix<K>& m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("inverse of non-square");
  size_t n = m.rows();
  Matrix<K> aug(n, 2 * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = K::one();
  }
  auto pivots = rref(aug);
  if (pivots.size() != n || pivots.back() != n - 1) return std::nullopt;
  return aug.block(0, n, n, n);
}

template <class K>
Matrix<K> inverse(const Matrix<K>& m) {
  auto inv = try_inverse(m);
  if (!inv) throw NotInvertible("singular matrix");
  return *inv;
}

// solve A x = b; empty optional when inconsistent
template <class K>
std::optional<std::vector<K>> solve(const Matrix<K>& A, const std::vector<K>& b) {
  if (A.rows() != b.size()) throw ShapeMismatch("solve");
  Matrix<K> aug(A.rows(), A.cols() + 1);
  for (size_t i = 0; i < A.rows(); ++i) {
    for (size_t j = 0; j < A.cols(); ++j) aug(i, j) = A(i, j);
    aug(i, A.cols()) = b[i];
  }
  auto pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == A.cols()) return std::nullopt;
  std::vector<K> x(A.cols(), K::zero());
  for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, A.cols());
  return x;
}

// characteristic polynomial by the Faddeev-LeVerrier recurrence (exact; the
// field must have characteristic 0 or > n, so use the Hessenberg-free
// expansion below for small prime fields)
template <class K>
std::vector<K> char_poly_coeffs(const Matrix<K>& A);

namespace detail {

// determinant of xI - A by fraction-free expansion over K[x] represented as
// coefficient vectors; fine for the small sizes this library handles
template <class K>
std::vector<std::vector<K>> char_matrix(const Matrix<K>& A) {
  size_t n = A.rows();
  std::vector<std::vector<K>> m(n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      std::vector<K> e;
      e.push_back(-A(i, j));
      if (i == j) e.push_back(K::one());
      m[i * n + j] = std::move(e);
    }
  return m;
}

template <class K>
std::vector<K> poly_mul_vec(const std::vector<K>& a, const std::vector<K>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<K> r(a.size() + b.size() - 1, K::zero());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  while (!r.empty() && r.back().is_zero()) r.pop_back();
  return r;
}

template <class K>
std::vector<K> poly_add_vec(std::vector<K> a, const std::vector<K>& b, bool subtract) {
  if (a.size() < b.size()) a.resize(b.size(), K::zero());
  for (size_t i = 0; i < b.size(); ++i) {
    if (subtract)
      a[i] -= b[i];
    else
      a[i] += b[i];
  }
  while (!a.empty() && a.back().is_zero()) a.pop_back();
  return a;
}

// cofactor expansion with memoization over column subsets (n <= ~12)
template <class K>
std::vector<K> det_poly(const std::vector<std::vector<K>>& m, size_t n) {
  std::vector<std::vector<K>> memo(1u << n);
  std::vector<bool> seen(1u << n, false);
  // F(mask) = det of rows [popcount..] and columns in mask
  auto popcount = [](unsigned x) {
    unsigned c = 0;
    while (x) {
      c += x & 1;
      x >>= 1;
    }
    return c;
  };
  std::vector<unsigned> order;
  for (unsigned mask = 0; mask < (1u << n); ++mask) order.push_back(mask);
  std::sort(order.begin(), order.end(),
            [&](unsigned a, unsigned b) { return popcount(a) < popcount(b); });
  for (unsigned mask : order) {
    unsigned cnt = popcount(mask);
    size_t row = n - cnt;
    std::vector<K> acc;
    if (cnt == 0) {
      acc = {K::one()};
    } else {
      bool neg = false;
      for (size_t j = 0; j < n; ++j) {
        if (!(mask & (1u << j))) continue;
        const auto& entry = m[row * n + j];
        if (!entry.empty()) {
          auto sub = memo[mask & ~(1u << j)];
          auto term = poly_mul_vec(entry, sub);
          acc = poly_add_vec(std::move(acc), term, neg);
        }
        neg = !neg;
      }
    }
    memo[mask] = std::move(acc);
    seen[mask] = true;
  }
  return memo[(1u << n) - 1];
}

} // namespace detail

template <class K>
std::vector<K> char_poly_coeffs(const Matrix<K>& A) {
  if (A.rows() != A.cols()) throw ShapeMismatch("char_poly of non-square");
  size_t n = A.rows();
  if (n == 0) return {K::one()};
  if (n > 16) throw std::domain_error("char_poly: matrix too large for subset expansion");
  auto m = detail::char_matrix(A);
  auto d = detail::det_poly(m, n);
  d.resize(n + 1, K::zero());
  return d;
}

} // namespace mbp

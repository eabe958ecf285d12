#pragma once
// Dense row-major matrices over a scalar field, plus tensor-leg utilities.

#include "glbethe/error.hpp"
#include "glbethe/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace glb {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Field<T>::zero()) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Field<T>::one();
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::invalid_argument, "matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (Field<T>::is_zero(aik)) continue;
        const T* brow = &b.data_[k * b.cols_];
        T* crow = &c.data_[i * c.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) {
          if (Field<T>::is_zero(brow[j])) continue;
          crow[j] += aik * brow[j];
        }
      }
    }
    return c;
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    std::vector<T> out(rows_, Field<T>::zero());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (!Field<T>::is_zero(v[j])) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  T trace() const {
    T s = Field<T>::zero();
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
  }

  double max_norm() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, Field<T>::magnitude(v));
    return m;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& v) { return Field<T>::is_zero(v); });
  }

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorKind::invalid_argument, "matrix shape mismatch");
  }
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using CMatrix = Matrix<cplx>;
using QMatrix = Matrix<GaussianRational>;

template <class T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (Field<T>::is_zero(a(i, j))) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
    }
  return k;
}

inline CMatrix conj_transpose(const CMatrix& m) {
  CMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = std::conj(m(i, j));
  return t;
}

template <class T>
Matrix<cplx> to_complex(const Matrix<T>& m) {
  Matrix<cplx> c(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) = Field<T>::to_complex(m(i, j));
  return c;
}

// Max-norm of AB - BA.
template <class T>
double commutator_max(const Matrix<T>& a, const Matrix<T>& b) {
  return (a * b - b * a).max_norm();
}

// Elementary matrix E_ij of size n.
template <class T>
Matrix<T> elementary(std::size_t n, std::size_t i, std::size_t j) {
  Matrix<T> e(n, n);
  e(i, j) = Field<T>::one();
  return e;
}

// Permutation operator on C^n (x) C^n.
template <class T>
Matrix<T> permutation(std::size_t n) {
  Matrix<T> p(n * n, n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) p(a * n + b, b * n + a) = Field<T>::one();
  return p;
}

struct Leg {
  std::string label;
  std::size_t dim = 0;
};

// Dense operator on a tensor product of legs; the first leg is the most
// significant index.
template <class T>
struct OperatorMatrix {
  Matrix<T> data;
  std::vector<Leg> legs;

  std::size_t dim() const { return data.rows(); }
};

inline std::size_t product_of(const std::vector<std::size_t>& dims) {
  std::size_t p = 1;
  for (auto d : dims) p *= d;
  return p;
}

// Index bookkeeping for an operator that acts on a subset of legs.
class LegSplit {
 public:
  LegSplit(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& active) {
    const std::size_t n = dims.size();
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t k = n; k-- > 1;) stride[k - 1] = stride[k] * dims[k];
    std::vector<bool> is_active(n, false);
    for (auto a : active) is_active.at(a) = true;
    local_dim_ = 1;
    for (auto a : active) local_dim_ *= dims[a];
    total_ = product_of(dims);
    rest_dim_ = total_ / local_dim_;
    index_.assign(total_, 0);
    // full index = sum over legs; enumerate (local, rest) pairs
    std::vector<std::size_t> digit(n, 0);
    for (std::size_t full = 0; full < total_; ++full) {
      std::size_t rem = full;
      for (std::size_t k = 0; k < n; ++k) {
        digit[k] = rem / stride[k];
        rem %= stride[k];
      }
      std::size_t loc = 0;
      for (auto a : active) loc = loc * dims[a] + digit[a];
      std::size_t rest = 0;
      for (std::size_t k = 0; k < n; ++k)
        if (!is_active[k]) rest = rest * dims[k] + digit[k];
      index_[loc * rest_dim_ + rest] = full;
    }
  }
  std::size_t local_dim() const { return local_dim_; }
  std::size_t rest_dim() const { return rest_dim_; }
  std::size_t total() const { return total_; }
  std::size_t full(std::size_t loc, std::size_t rest) const { return index_[loc * rest_dim_ + rest]; }

 private:
  std::size_t local_dim_ = 1;
  std::size_t rest_dim_ = 1;
  std::size_t total_ = 1;
  std::vector<std::size_t> index_;
};

// M <- M * (L acting on the active legs, identity elsewhere).
template <class T>
void right_multiply_local(Matrix<T>& m, const Matrix<T>& local, const LegSplit& split) {
  const std::size_t nl = split.local_dim();
  std::vector<T> x(nl), y(nl);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t rest = 0; rest < split.rest_dim(); ++rest) {
      bool any = false;
      for (std::size_t a = 0; a < nl; ++a) {
        x[a] = m(r, split.full(a, rest));
        any = any || !Field<T>::is_zero(x[a]);
      }
      if (!any) continue;
      for (std::size_t b = 0; b < nl; ++b) y[b] = Field<T>::zero();
      for (std::size_t a = 0; a < nl; ++a) {
        if (Field<T>::is_zero(x[a])) continue;
        for (std::size_t b = 0; b < nl; ++b)
          if (!Field<T>::is_zero(local(a, b))) y[b] += x[a] * local(a, b);
      }
      for (std::size_t b = 0; b < nl; ++b) m(r, split.full(b, rest)) = y[b];
    }
  }
}

// v <- (L on active legs) v.
template <class T>
void apply_local(std::vector<T>& v, const Matrix<T>& local, const LegSplit& split) {
  const std::size_t nl = split.local_dim();
  std::vector<T> x(nl), y(nl);
  for (std::size_t rest = 0; rest < split.rest_dim(); ++rest) {
    bool any = false;
    for (std::size_t a = 0; a < nl; ++a) {
      x[a] = v[split.full(a, rest)];
      any = any || !Field<T>::is_zero(x[a]);
    }
    if (!any) continue;
    for (std::size_t b = 0; b < nl; ++b) {
      y[b] = Field<T>::zero();
      for (std::size_t a = 0; a < nl; ++a)
        if (!Field<T>::is_zero(x[a]) && !Field<T>::is_zero(local(b, a))) y[b] += local(b, a) * x[a];
    }
    for (std::size_t b = 0; b < nl; ++b) v[split.full(b, rest)] = y[b];
  }
}

// Full matrix of L acting on the active legs.
template <class T>
Matrix<T> embed(const Matrix<T>& local, const std::vector<std::size_t>& dims, const std::vector<std::size_t>& active) {
  LegSplit split(dims, active);
  Matrix<T> m = Matrix<T>::identity(split.total());
  right_multiply_local(m, local, split);
  return m;
}

// Partial trace over leg 0 of an operator whose first leg has dimension n.
template <class T>
Matrix<T> trace_first_leg(const Matrix<T>& m, std::size_t n) {
  const std::size_t d = m.rows() / n;
  Matrix<T> out(d, d);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out(i, j) += m(a * d + i, a * d + j);
  return out;
}

// Transposition on leg 0 only (first leg of dimension n).
template <class T>
Matrix<T> transpose_first_leg(const Matrix<T>& m, std::size_t n) {
  const std::size_t d = m.rows() / n;
  Matrix<T> out(m.rows(), m.cols());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out(b * d + i, a * d + j) = m(a * d + i, b * d + j);
  return out;
}

// Block (a,b) of the first leg: the quantum-space operator M_ab.
template <class T>
Matrix<T> aux_block(const Matrix<T>& m, std::size_t n, std::size_t a, std::size_t b) {
  const std::size_t d = m.rows() / n;
  Matrix<T> out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(i, j) = m(a * d + i, b * d + j);
  return out;
}

}  // namespace glb

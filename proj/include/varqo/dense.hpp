#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "varqo/common.hpp"

namespace varqo {

// Row-major dense complex matrix. Deliberately minimal: the library uses it
// for operator decomposition inputs and small verification matrices, not as
// a linear-algebra backend.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cxd> a;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

  cxd& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const cxd& operator()(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  DenseMatrix operator*(const DenseMatrix& o) const {
    if (cols != o.rows)
      throw std::invalid_argument("matrix product dimension mismatch");
    DenseMatrix r(rows, o.cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < cols; ++k) {
        cxd v = (*this)(i, k);
        if (v == cxd{}) continue;
        for (std::size_t j = 0; j < o.cols; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }

  DenseMatrix operator+(const DenseMatrix& o) const {
    if (rows != o.rows || cols != o.cols)
      throw std::invalid_argument("matrix sum dimension mismatch");
    DenseMatrix r = *this;
    for (std::size_t i = 0; i < a.size(); ++i) r.a[i] += o.a[i];
    return r;
  }

  DenseMatrix operator-(const DenseMatrix& o) const {
    if (rows != o.rows || cols != o.cols)
      throw std::invalid_argument("matrix difference dimension mismatch");
    DenseMatrix r = *this;
    for (std::size_t i = 0; i < a.size(); ++i) r.a[i] -= o.a[i];
    return r;
  }

  DenseMatrix operator*(cxd s) const {
    DenseMatrix r = *this;
    for (auto& v : r.a) v *= s;
    return r;
  }

  DenseMatrix adjoint() const {
    DenseMatrix r(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  // Largest absolute entry of (this - o); tolerant comparison primitive.
  double max_abs_diff(const DenseMatrix& o) const {
    if (rows != o.rows || cols != o.cols)
      throw std::invalid_argument("matrix comparison dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      m = std::max(m, std::abs(a[i] - o.a[i]));
    return m;
  }
};

}  // namespace varqo

#include "manpg/dense_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace manpg {

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix shape mismatch");
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dimensions must be >= 1");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

bool DenseMatrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double DenseMatrix::frob_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double DenseMatrix::abs_sum() const {
  double s = 0.0;
  for (double v : data_) s += std::fabs(v);
  return s;
}

double DenseMatrix::max_abs() const {
  double s = 0.0;
  for (double v : data_) s = std::max(s, std::fabs(v));
  return s;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  require_same_shape(*this, other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  require_same_shape(*this, other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

double dot(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b);
  double s = 0.0;
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t k = 0; k < a.size(); ++k) s += pa[k] * pb[k];
  return s;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  const std::size_t m = a.rows(), n = a.cols(), p = b.cols();
  for (std::size_t j = 0; j < p; ++j) {
    double* cj = c.data() + j * m;
    for (std::size_t k = 0; k < n; ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      const double* ak = a.data() + k * m;
      for (std::size_t i = 0; i < m; ++i) cj[i] += ak[i] * bkj;
    }
  }
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("matmul_tn: dimension mismatch");
  DenseMatrix c(a.cols(), b.cols());
  const std::size_t m = a.rows();
  for (std::size_t j = 0; j < b.cols(); ++j) {
    const double* bj = b.data() + j * m;
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double* ai = a.data() + i * m;
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += ai[k] * bj[k];
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt: dimension mismatch");
  DenseMatrix c(a.rows(), b.rows());
  const std::size_t m = a.rows(), n = a.cols();
  for (std::size_t k = 0; k < n; ++k) {
    const double* ak = a.data() + k * m;
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double bjk = b(j, k);
      if (bjk == 0.0) continue;
      double* cj = c.data() + j * m;
      for (std::size_t i = 0; i < m; ++i) cj[i] += ak[i] * bjk;
    }
  }
  return c;
}

}  // namespace manpg

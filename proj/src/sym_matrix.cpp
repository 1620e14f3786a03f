#include "manpg/sym_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace manpg {

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), a_(dim * (dim + 1) / 2, 0.0) {
  if (dim == 0) throw std::invalid_argument("SymMatrix dimension must be >= 1");
}

SymMatrix SymMatrix::identity(std::size_t dim) { return scaled_identity(dim, 1.0); }

SymMatrix SymMatrix::scaled_identity(std::size_t dim, double value) {
  SymMatrix s(dim);
  for (std::size_t i = 0; i < dim; ++i) s.set(i, i, value);
  return s;
}

SymMatrix SymMatrix::sym_part(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("sym_part: matrix must be square");
  SymMatrix s(m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i <= j; ++i) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return s;
}

DenseMatrix SymMatrix::to_dense() const {
  DenseMatrix m(dim_, dim_);
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t i = 0; i < dim_; ++i) m(i, j) = (*this)(i, j);
  return m;
}

double SymMatrix::frob_norm() const {
  double s = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double v = (*this)(i, j);
      s += 2.0 * v * v;
    }
    const double d = (*this)(j, j);
    s += d * d;
  }
  return std::sqrt(s);
}

double SymMatrix::max_abs() const {
  double s = 0.0;
  for (double v : a_) s = std::max(s, std::fabs(v));
  return s;
}

double SymMatrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += (*this)(i, i);
  return s;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  if (dim_ != other.dim_) throw std::invalid_argument("SymMatrix dimension mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  if (dim_ != other.dim_) throw std::invalid_argument("SymMatrix dimension mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= other.a_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

std::vector<double> SymMatrix::to_svec() const {
  static const double kSqrt2 = std::sqrt(2.0);
  std::vector<double> v(a_.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t i = 0; i <= j; ++i, ++k) v[k] = (i == j) ? a_[k] : kSqrt2 * a_[k];
  return v;
}

SymMatrix SymMatrix::from_svec(std::size_t dim, const std::vector<double>& v) {
  static const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
  if (v.size() != dim * (dim + 1) / 2)
    throw std::invalid_argument("from_svec: length does not match dimension");
  SymMatrix s(dim);
  std::size_t k = 0;
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i <= j; ++i, ++k) s.set(i, j, (i == j) ? v[k] : kInvSqrt2 * v[k]);
  return s;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

}  // namespace manpg

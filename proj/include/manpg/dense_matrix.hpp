#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace manpg {

/// Dense real matrix in column-major storage. Columns of the iterates are
/// the loading vectors, so column slices are the hot access pattern.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  /// Zero-initialized rows×cols matrix; both dimensions must be ≥ 1.
  DenseMatrix(std::size_t rows, std::size_t cols);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  DenseMatrix transposed() const;

  bool all_finite() const;
  double frob_norm() const;
  double abs_sum() const;
  double max_abs() const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);

/// Frobenius inner product ⟨A, B⟩ = Σ a_ij b_ij.
double dot(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);     // A·B
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);  // Aᵀ·B
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);  // A·Bᵀ

}  // namespace manpg

#pragma once

#include <cstddef>
#include <vector>

#include "manpg/dense_matrix.hpp"

namespace manpg {

/// Symmetric p×p matrix stored as the packed upper triangle, column-major:
/// entry (i,j) with i ≤ j lives at j(j+1)/2 + i. A skew part cannot be
/// represented, which is the point.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);  // zero

  static SymMatrix identity(std::size_t dim);
  static SymMatrix scaled_identity(std::size_t dim, double value);

  /// Packs (M + Mᵀ)/2 of a square matrix.
  static SymMatrix sym_part(const DenseMatrix& m);

  std::size_t dim() const { return dim_; }

  double operator()(std::size_t i, std::size_t j) const {
    return i <= j ? a_[j * (j + 1) / 2 + i] : a_[i * (i + 1) / 2 + j];
  }
  void set(std::size_t i, std::size_t j, double v) {
    if (i <= j)
      a_[j * (j + 1) / 2 + i] = v;
    else
      a_[i * (i + 1) / 2 + j] = v;
  }

  DenseMatrix to_dense() const;
  double frob_norm() const;
  double max_abs() const;
  double trace() const;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double s);

  /// Symmetric vectorization with √2-scaled off-diagonals, so that
  /// ⟨svec(S), svec(T)⟩ equals the matrix inner product ⟨S, T⟩_F.
  /// Length dim(dim+1)/2, ordered like the packed storage.
  std::vector<double> to_svec() const;
  static SymMatrix from_svec(std::size_t dim, const std::vector<double>& v);

 private:
  std::size_t dim_ = 0;
  std::vector<double> a_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

}  // namespace manpg

#pragma once

#include <cstdint>
#include <memory>

#include "manpg/dense_matrix.hpp"

namespace manpg {

/// A point on St(p,n) = {X ∈ ℝ^{n×p} | XᵀX = I_p}. Orthonormality is
/// validated on construction (‖XᵀX − I‖_F ≤ 1e-10); copies share storage.
class StiefelPoint {
 public:
  explicit StiefelPoint(DenseMatrix x);

  const DenseMatrix& mat() const { return *m_; }
  std::shared_ptr<const DenseMatrix> shared_mat() const { return m_; }
  std::size_t n() const { return m_->rows(); }
  std::size_t p() const { return m_->cols(); }

  static double orthonormality_residual(const DenseMatrix& x);

 private:
  std::shared_ptr<const DenseMatrix> m_;
};

/// A tangent vector at a base point: Xᵀη + ηᵀX = 0, validated on
/// construction within 1e-8·max(1, ‖η‖_F). The tolerance is looser than
/// construction accuracy to absorb accumulation across iterations.
class TangentVector {
 public:
  TangentVector(const StiefelPoint& base, DenseMatrix v);

  const DenseMatrix& mat() const { return v_; }
  const DenseMatrix& base() const { return *base_; }
  double norm() const { return v_.frob_norm(); }

  TangentVector scaled(double s) const;
  bool based_at(const StiefelPoint& x) const;

  static double tangency_residual(const DenseMatrix& x, const DenseMatrix& v);

 private:
  TangentVector(std::shared_ptr<const DenseMatrix> base, DenseMatrix v, bool checked);
  std::shared_ptr<const DenseMatrix> base_;
  DenseMatrix v_;
};

/// Orthogonal projection onto the tangent space: ξ − X·sym(Xᵀξ).
TangentVector project_tangent(const StiefelPoint& x, const DenseMatrix& xi);

/// SVD-based retraction, computed as [Q,R] = qr(X+η), [U,Σ,V] = svd(R),
/// result Q·UVᵀ; equals the polar factor (X+η)(I+ηᵀη)^{-1/2}.
StiefelPoint retract(const StiefelPoint& x, const TangentVector& eta);

/// Inverse of the retraction: the tangent η with retract(X, η) = Y, obtained
/// from η = YS − X where S solves (XᵀY)S + S(YᵀX) = 2I. Raises NumericalError
/// when Y is outside the diffeomorphism neighborhood of X.
TangentVector inverse_retract(const StiefelPoint& x, const StiefelPoint& y);

/// Q factor of a seeded standard-normal n×p matrix; deterministic per seed.
StiefelPoint random_point(std::size_t n, std::size_t p, std::uint64_t seed);

/// Accepts a matrix that is on the manifold to construction tolerance;
/// otherwise re-orthonormalizes through the QR+SVD polar factor.
StiefelPoint ensure_on_manifold(DenseMatrix x);

}  // namespace manpg

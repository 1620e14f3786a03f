#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "manpg/dense_matrix.hpp"
#include "manpg/stiefel.hpp"

namespace manpg {

/// Entrywise positive diagonal weight on ℝ^{n×p}, floored at tau > 0.
class DiagonalWeight {
 public:
  DiagonalWeight(DenseMatrix entries, double tau);
  static DiagonalWeight identity(std::size_t n, std::size_t p);

  double operator()(std::size_t i, std::size_t j) const { return w_(i, j); }
  const DenseMatrix& entries() const { return w_; }
  double tau() const { return tau_; }

  /// ⟨η, Wη⟩ = Σ_ij w_ij η_ij²
  double wnorm_sq(const DenseMatrix& eta) const;

 private:
  DenseMatrix w_;
  double tau_;
};

/// One ℓ1-penalized sparse-PCA instance: min −‖AX‖_F² + λ‖X‖₁ over St(p,n),
/// with A an m×n data matrix (samples × variables). Construction caches
/// diag(AᵀA), the spectral bound ‖A‖₂², and the eigendecomposition of the
/// smaller Gram matrix, which feeds initialization and the variance metric.
/// Instances are immutable and cheap to copy.
class SpcaProblem {
 public:
  SpcaProblem(DenseMatrix a, double lambda);

  /// Same data (shared caches), different penalty.
  SpcaProblem with_lambda(double lambda) const;

  std::size_t m() const;
  std::size_t n() const;
  double lambda() const { return lambda_; }
  const DenseMatrix& data() const;
  const std::vector<double>& diag_ata() const;
  double spec_sq() const;

  /// Σ of the top-p squared singular values of A.
  double top_singular_sq_sum(std::size_t p) const;
  /// Top-p right singular vectors, n×p, descending singular values.
  DenseMatrix right_singular_vectors(std::size_t p) const;

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
  double lambda_;
};

/// Smooth term −‖AX‖_F².
double eval_f(const SpcaProblem& prob, const StiefelPoint& x);
/// Nonsmooth term λ·Σ|X_ij| at an arbitrary matrix (used off-manifold too).
double eval_g(const SpcaProblem& prob, const DenseMatrix& x);
/// Full objective F = f + g.
double eval_objective(const SpcaProblem& prob, const StiefelPoint& x);

/// Riemannian gradient of f: the tangent projection of −2AᵀAX.
TangentVector riem_grad_f(const SpcaProblem& prob, const StiefelPoint& x);
/// Same, reusing an already-computed score matrix AX.
TangentVector riem_grad_f(const SpcaProblem& prob, const StiefelPoint& x,
                          const DenseMatrix& scores);

/// Lipschitz constant bound for ∇f: L = 2‖A‖₂².
double lipschitz_bound(const SpcaProblem& prob);

/// Diagonal curvature surrogate: entry (i,j) is
/// max(−2·(diag(AᵀA)_i − (XᵀAᵀAX)_jj), tau), the floored diagonal of the
/// vectorized Hessian representation.
DiagonalWeight diag_weight(const SpcaProblem& prob, const StiefelPoint& x, double tau);
/// Same, reusing an already-computed score matrix AX.
DiagonalWeight diag_weight(const SpcaProblem& prob, const StiefelPoint& x, double tau,
                           const DenseMatrix& scores);

/// Fraction of entries with |X_ij| < thresh.
double sparsity(const DenseMatrix& x, double thresh = 1e-5);

/// Variance captured by the (possibly correlated) loadings, via the QR of
/// AX, normalized by the best rank-p variance; clamped to [0,1].
double adjusted_variance(const SpcaProblem& prob, const StiefelPoint& x);

/// Seeded i.i.d. N(0,1) matrix with columns standardized to mean 0, std 1.
DenseMatrix gen_random_data(std::size_t m, std::size_t n, std::uint64_t seed);

/// Five sparse base components (contiguous supports of length ⌊n/20⌋ at
/// offsets k·⌊n/10⌋, value 1) stacked m/5 times; no noise, no normalization.
DenseMatrix synthetic_base_matrix(std::size_t m, std::size_t n);

/// synthetic_base_matrix plus N(0, 0.25) noise, columns scaled to unit std
/// without centering (the sparse structure must keep its means).
DenseMatrix gen_synthetic_data(std::size_t m, std::size_t n, std::uint64_t seed);

/// Optionally subtract column means, then divide by the population (divisor
/// m) standard deviation. Zero-variance columns raise NumericalError.
DenseMatrix normalize_columns(const DenseMatrix& m, bool center);

}  // namespace manpg

#pragma once

#include <vector>

#include "manpg/dense_matrix.hpp"
#include "manpg/sym_matrix.hpp"

namespace manpg {

struct QrResult {
  DenseMatrix q;  // n×p, orthonormal columns
  DenseMatrix r;  // p×p upper-triangular, diag(R) ≥ 0
};

/// Compact Householder QR of an n×p matrix, n ≥ p. With check_rank, a
/// diagonal entry |R_jj| < 1e-12·‖M‖_F raises NumericalError.
QrResult thin_qr(const DenseMatrix& m, bool check_rank = true);

struct SvdResult {
  DenseMatrix u;              // rows×cols
  std::vector<double> sigma;  // descending, ≥ 0
  DenseMatrix v;              // cols×cols
};

/// One-sided Jacobi SVD for small matrices (rows ≥ cols, cols ≤ 32).
SvdResult small_svd(const DenseMatrix& m);

struct EigResult {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // orthonormal columns, values[k] ↔ column k
};

/// Symmetric eigendecomposition: Householder tridiagonalization followed by
/// implicit QL with Wilkinson shifts. Each eigenvector is sign-normalized so
/// its largest-magnitude entry is positive.
EigResult sym_eig(const SymMatrix& m);

/// Solves B·S + S·Bᵀ = C for symmetric S. Uses the eigendecomposition of B
/// when B is symmetric, otherwise the vectorized p²×p² linear system; p is
/// small here so robustness beats asymptotics. Raises NumericalError when an
/// eigenvalue pair of the pencil sums to ~0 or the residual check fails.
SymMatrix solve_lyapunov(const DenseMatrix& b, const SymMatrix& c);

/// ‖A‖₂² via power iteration on the smaller of AᵀA and AAᵀ: all-ones start,
/// 1000-iteration cap, convergence when the Rayleigh quotient changes by
/// < 1e-10 relative, one seeded random restart if stagnating. Zero matrix
/// returns 0.
double spectral_norm_sq(const DenseMatrix& a);

/// Largest eigenvalue of a symmetric PSD matrix by the same power-iteration
/// policy as spectral_norm_sq.
double psd_lambda_max(const DenseMatrix& gram);

/// Dense linear solve with partially pivoted LU; for the small systems in
/// this project (p²×p² at most). Raises NumericalError on a ~0 pivot.
std::vector<double> solve_dense(DenseMatrix a, std::vector<double> b);

}  // namespace manpg

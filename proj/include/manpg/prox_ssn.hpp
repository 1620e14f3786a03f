#pragma once

#include <vector>

#include "manpg/dense_matrix.hpp"
#include "manpg/spca.hpp"
#include "manpg/stiefel.hpp"
#include "manpg/sym_matrix.hpp"

namespace manpg {

/// One weighted proximal subproblem on the tangent space at X:
///   min_{η ∈ T_X}  ⟨gradf, η⟩ + (1/2μ)‖η‖_W² + λ‖X + η‖₁.
struct SubproblemSpec {
  SubproblemSpec(StiefelPoint x_in, TangentVector gradf_in, DiagonalWeight w_in, double mu_in,
                 double lambda_in);

  StiefelPoint x;
  TangentVector gradf;
  DiagonalWeight w;
  double mu;
  double lambda;
};

struct SsnOptions {
  double eps_abs = 1e-10;   // absolute residual target, scaled by √(p(p+1)/2)
  double eps_rel = 1e-8;    // relative to the residual at the zero dual
  int max_newton_iters = 40;
};

struct SubproblemSolution {
  TangentVector eta;
  SymMatrix dual;                        // KKT multiplier, symmetric p×p
  double residual = 0.0;                 // ‖Ψ(dual)‖_F at exit
  int newton_iters = 0;
  bool converged = false;
  std::vector<double> residual_history;  // accepted iterates, nonincreasing
};

/// Entrywise scaled soft-threshold:
/// argmin_V (1/2)‖V−Z‖_W² + mulambda·‖V‖₁, i.e.
/// sign(Z_ij)·max(|Z_ij| − mulambda/w_ij, 0).
DenseMatrix scaled_prox(const DenseMatrix& z, const DiagonalWeight& w, double mulambda);

/// Generalized-derivative selection for scaled_prox: 1 where
/// |Z_ij| > mulambda/w_ij, else 0. At the kink the selection is 0.
DenseMatrix prox_clarke_mask(const DenseMatrix& z, const DiagonalWeight& w, double mulambda);

/// A(η) = Xᵀη + ηᵀX; zero exactly on tangent vectors.
SymMatrix cal_A(const DenseMatrix& x, const DenseMatrix& eta);

/// Adjoint of cal_A on symmetric Λ: A*(Λ) = 2XΛ.
DenseMatrix cal_A_star(const DenseMatrix& x, const SymMatrix& lam);

/// Dual residual Ψ(Λ) = A(Prox(X − μW⁻¹(gradf − A*Λ)) − X); a root gives the
/// subproblem solution through the same prox expression.
SymMatrix psi(const SubproblemSpec& spec, const SymMatrix& lam);

/// Generalized Jacobian action J_Ψ[d] = A(mask ∘ (μW⁻¹·A*(d))); linear in d
/// for a fixed mask, symmetric positive semidefinite in svec coordinates.
SymMatrix jpsi_apply(const SubproblemSpec& spec, const DenseMatrix& mask, const SymMatrix& d);

/// The same operator assembled as a dense p(p+1)/2 matrix in svec
/// coordinates, exploiting that each basis image 2X·E touches at most two
/// columns. Column k equals svec(jpsi_apply(spec, mask, basis_k)).
DenseMatrix jpsi_matrix(const SubproblemSpec& spec, const DenseMatrix& mask);

/// Semi-smooth Newton on Ψ(Λ) = 0: assembles the p(p+1)/2-dimensional
/// Jacobian, solves with a small Tikhonov shift, backtracks for a strict
/// residual decrease, and falls back to a damped fixed-point step when the
/// Newton direction stalls. The returned η is the prox expression at the
/// final dual, projected to the tangent space. On iteration-cap exhaustion
/// the best iterate is returned with converged = false.
SubproblemSolution solve_subproblem(const SubproblemSpec& spec, const SymMatrix* warm = nullptr,
                                    const SsnOptions& opts = {});

}  // namespace manpg

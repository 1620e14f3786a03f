#include "manpg/prox_ssn.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "manpg/errors.hpp"
#include "manpg/linalg.hpp"

namespace manpg {

SubproblemSpec::SubproblemSpec(StiefelPoint x_in, TangentVector gradf_in, DiagonalWeight w_in,
                               double mu_in, double lambda_in)
    : x(std::move(x_in)),
      gradf(std::move(gradf_in)),
      w(std::move(w_in)),
      mu(mu_in),
      lambda(lambda_in) {
  if (mu <= 0.0) throw std::invalid_argument("SubproblemSpec: mu must be positive");
  if (lambda < 0.0) throw std::invalid_argument("SubproblemSpec: lambda must be >= 0");
  if (!gradf.based_at(x))
    throw std::invalid_argument("SubproblemSpec: gradient is based at a different point");
  if (w.entries().rows() != x.n() || w.entries().cols() != x.p())
    throw std::invalid_argument("SubproblemSpec: weight shape mismatch");
}

DenseMatrix scaled_prox(const DenseMatrix& z, const DiagonalWeight& w, double mulambda) {
  if (mulambda < 0.0) throw std::invalid_argument("scaled_prox: negative threshold");
  DenseMatrix out(z.rows(), z.cols());
  const double* zp = z.data();
  const double* wp = w.entries().data();
  double* op = out.data();
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double thr = mulambda / wp[k];
    const double v = zp[k];
    op[k] = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
  }
  return out;
}

DenseMatrix prox_clarke_mask(const DenseMatrix& z, const DiagonalWeight& w, double mulambda) {
  DenseMatrix out(z.rows(), z.cols());
  const double* zp = z.data();
  const double* wp = w.entries().data();
  double* op = out.data();
  for (std::size_t k = 0; k < z.size(); ++k)
    op[k] = std::fabs(zp[k]) > mulambda / wp[k] ? 1.0 : 0.0;
  return out;
}

SymMatrix cal_A(const DenseMatrix& x, const DenseMatrix& eta) {
  if (x.rows() != eta.rows() || x.cols() != eta.cols())
    throw std::invalid_argument("cal_A: shape mismatch");
  DenseMatrix g = matmul_tn(x, eta);
  SymMatrix s(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j)
    for (std::size_t i = 0; i <= j; ++i) s.set(i, j, g(i, j) + g(j, i));
  return s;
}

DenseMatrix cal_A_star(const DenseMatrix& x, const SymMatrix& lam) {
  if (lam.dim() != x.cols()) throw std::invalid_argument("cal_A_star: shape mismatch");
  DenseMatrix out = matmul(x, lam.to_dense());
  out *= 2.0;
  return out;
}

namespace {

// Shared evaluator for Ψ and its Jacobian pieces; keeps the standalone psi()
// and the Newton loop on the exact same arithmetic.
struct PsiEval {
  explicit PsiEval(const SubproblemSpec& spec_in)
      : spec(spec_in), base(spec_in.x.mat()), mulambda(spec_in.mu * spec_in.lambda) {
    const double* gp = spec.gradf.mat().data();
    const double* wp = spec.w.entries().data();
    double* bp = base.data();
    for (std::size_t k = 0; k < base.size(); ++k) bp[k] -= spec.mu * gp[k] / wp[k];
  }

  // Z(Λ) = X − μW⁻¹(gradf − A*Λ) = base + μW⁻¹·(2XΛ)
  DenseMatrix z_at(const SymMatrix& lam) const {
    DenseMatrix z = base;
    DenseMatrix astar = cal_A_star(spec.x.mat(), lam);
    const double* wp = spec.w.entries().data();
    const double* ap = astar.data();
    double* zp = z.data();
    for (std::size_t k = 0; k < z.size(); ++k) zp[k] += spec.mu * ap[k] / wp[k];
    return z;
  }

  struct State {
    DenseMatrix z;
    DenseMatrix v;       // prox output
    SymMatrix psi_val;   // A(v − x)
    double resid;
    double theta;        // dual objective L(η(Λ), Λ); concave in Λ
  };

  State eval(const SymMatrix& lam) const {
    State st;
    st.z = z_at(lam);
    st.v = scaled_prox(st.z, spec.w, mulambda);
    DenseMatrix eta = st.v - spec.x.mat();
    st.psi_val = cal_A(spec.x.mat(), eta);
    st.resid = st.psi_val.frob_norm();
    st.theta = dot(spec.gradf.mat(), eta) + spec.w.wnorm_sq(eta) / (2.0 * spec.mu) +
               spec.lambda * st.v.abs_sum() -
               dot(lam.to_dense(), st.psi_val.to_dense());
    return st;
  }

  const SubproblemSpec& spec;
  DenseMatrix base;
  double mulambda;
};

}  // namespace

SymMatrix psi(const SubproblemSpec& spec, const SymMatrix& lam) {
  return PsiEval(spec).eval(lam).psi_val;
}

SymMatrix jpsi_apply(const SubproblemSpec& spec, const DenseMatrix& mask, const SymMatrix& d) {
  DenseMatrix astar = cal_A_star(spec.x.mat(), d);
  const double* wp = spec.w.entries().data();
  const double* mp = mask.data();
  double* ap = astar.data();
  for (std::size_t k = 0; k < astar.size(); ++k) ap[k] *= spec.mu * mp[k] / wp[k];
  return cal_A(spec.x.mat(), astar);
}

DenseMatrix jpsi_matrix(const SubproblemSpec& spec, const DenseMatrix& mask) {
  const DenseMatrix& x = spec.x.mat();
  const std::size_t n = x.rows(), p = x.cols();
  const std::size_t dim = p * (p + 1) / 2;
  const double sqrt2 = std::sqrt(2.0);

  DenseMatrix jac(dim, dim);
  std::vector<double> ta(n), tb(n);
  DenseMatrix g(p, 2);
  std::size_t k = 0;
  for (std::size_t b = 0; b < p; ++b) {
    for (std::size_t a = 0; a <= b; ++a, ++k) {
      // image of svec basis (a,b): nonzero only in columns a and b
      const double scale = a == b ? 2.0 : sqrt2;
      for (std::size_t i = 0; i < n; ++i) {
        const double fa = spec.mu * mask(i, a) / spec.w(i, a);
        ta[i] = fa * scale * x(i, a == b ? a : b);
        if (a != b) {
          const double fb = spec.mu * mask(i, b) / spec.w(i, b);
          tb[i] = fb * scale * x(i, a);
        }
      }
      // G = XᵀT restricted to the touched columns
      for (std::size_t c = 0; c < p; ++c) {
        double sa = 0.0, sb = 0.0;
        const double* xc = x.data() + c * n;
        for (std::size_t i = 0; i < n; ++i) sa += xc[i] * ta[i];
        if (a != b)
          for (std::size_t i = 0; i < n; ++i) sb += xc[i] * tb[i];
        g(c, 0) = sa;
        g(c, 1) = sb;
      }
      // svec of G + Gᵀ where G has nonzero columns {a, b} only
      std::size_t r = 0;
      for (std::size_t d2 = 0; d2 < p; ++d2) {
        for (std::size_t c2 = 0; c2 <= d2; ++c2, ++r) {
          double val = 0.0;
          if (d2 == a) val += g(c2, 0);
          if (c2 == a) val += g(d2, 0);
          if (a != b) {
            if (d2 == b) val += g(c2, 1);
            if (c2 == b) val += g(d2, 1);
          }
          jac(r, k) = c2 == d2 ? val : sqrt2 * val;
        }
      }
    }
  }
  return jac;
}

namespace {

SubproblemSolution solve_from(const SubproblemSpec& spec, const PsiEval& eval,
                              SymMatrix lam, double tol, const SsnOptions& opts) {
  const std::size_t p = spec.x.p();
  const std::size_t dim = p * (p + 1) / 2;

  PsiEval::State cur = eval.eval(lam);
  SymMatrix lam_best = lam;
  double resid_best = cur.resid;
  DenseMatrix v_best = cur.v;

  std::vector<double> history;
  history.push_back(cur.resid);

  // Levenberg-Marquardt parameter, relative to the Jacobian's trace scale.
  // Grows when steps are rejected; a nonzero floor keeps the system solvable
  // when the generalized Jacobian loses rank near very sparse solutions.
  double lm = 1e-12;

  int iter = 0;
  for (; iter < opts.max_newton_iters && cur.resid > tol; ++iter) {
    DenseMatrix mask = prox_clarke_mask(cur.z, spec.w, eval.mulambda);
    DenseMatrix jac = jpsi_matrix(spec, mask);
    double trace = 0.0;
    for (std::size_t k = 0; k < dim; ++k) trace += jac(k, k);
    const double trace_scale = std::max(1.0, trace / static_cast<double>(dim));
    std::vector<double> neg_psi = cur.psi_val.to_svec();
    for (double& v : neg_psi) v = -v;

    bool accepted = false;
    PsiEval::State next;
    SymMatrix lam_next(p);
    for (int attempt = 0; attempt < 20 && !accepted; ++attempt) {
      DenseMatrix shifted = jac;
      for (std::size_t k = 0; k < dim; ++k) shifted(k, k) += lm * trace_scale;
      SymMatrix dlam(p);
      try {
        dlam = SymMatrix::from_svec(p, solve_dense(std::move(shifted), neg_psi));
      } catch (const NumericalError&) {
        lm *= 10.0;
        continue;
      }
      // ⟨−Ψ, d⟩ = Ψᵀ(J+shift)⁻¹Ψ > 0: always a dual ascent direction
      const double ascent = -dot(cur.psi_val.to_dense(), dlam.to_dense());
      double alpha = 1.0;
      for (int halving = 0; halving < 60; ++halving, alpha *= 0.5) {
        lam_next = lam + alpha * dlam;
        next = eval.eval(lam_next);
        // primary acceptance: the residual shrinks
        if (next.resid < cur.resid * (1.0 - 1e-4 * alpha)) {
          accepted = true;
          break;
        }
        // plateau escape: the prox dead zone makes Ψ locally constant in Λ,
        // so no step can shrink the residual; the concave dual objective
        // still measures progress there
        if (next.theta >= cur.theta + 1e-4 * alpha * ascent &&
            next.theta > cur.theta) {
          accepted = true;
          break;
        }
      }
      if (accepted)
        lm = std::max(lm / 5.0, 1e-12);
      else if ((lm *= 10.0) > 1e8)
        break;
    }
    if (!accepted) {
      // gradient-ascent fallback on the dual, scanning both short and long
      // steps; long ones re-activate entries across the flat prox region
      for (double beta : {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 2.0, 4.0, 8.0, 16.0, 32.0,
                          64.0, 128.0, 256.0}) {
        lam_next = lam - beta * cur.psi_val;
        next = eval.eval(lam_next);
        if (next.resid < cur.resid ||
            (next.theta > cur.theta + 1e-4 * beta * cur.resid * cur.resid)) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) break;  // stalled; report the best iterate

    lam = std::move(lam_next);
    cur = std::move(next);
    history.push_back(cur.resid);
    if (cur.resid < resid_best) {
      resid_best = cur.resid;
      lam_best = lam;
      v_best = cur.v;
    }
  }

  return SubproblemSolution{project_tangent(spec.x, v_best - spec.x.mat()),
                            std::move(lam_best),
                            resid_best,
                            iter,
                            resid_best <= tol,
                            std::move(history)};
}

}  // namespace

SubproblemSolution solve_subproblem(const SubproblemSpec& spec, const SymMatrix* warm,
                                    const SsnOptions& opts) {
  const std::size_t p = spec.x.p();
  const std::size_t dim = p * (p + 1) / 2;
  if (warm && warm->dim() != p)
    throw std::invalid_argument("solve_subproblem: warm-start dimension mismatch");
  PsiEval eval(spec);

  const double resid_at_zero = eval.eval(SymMatrix(p)).resid;
  const double tol = std::max(opts.eps_abs * std::sqrt(static_cast<double>(dim)),
                              opts.eps_rel * resid_at_zero);

  SubproblemSolution sol =
      solve_from(spec, eval, warm ? *warm : SymMatrix(p), tol, opts);
  if (!sol.converged && warm) {
    // a stale dual can park the iteration in a degenerate neighborhood that
    // a cold start walks around; keep whichever run did better
    SubproblemSolution cold = solve_from(spec, eval, SymMatrix(p), tol, opts);
    if (cold.converged || cold.residual < sol.residual) return cold;
  }
  return sol;
}

}  // namespace manpg

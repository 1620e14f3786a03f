#include "manpg/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "manpg/errors.hpp"

namespace manpg {

namespace {

class Timer {
 public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

void validate_config(const SolverConfig& cfg) {
  if (!(cfg.sigma > 0.0 && cfg.sigma < 1.0))
    throw std::invalid_argument("SolverConfig: sigma must lie in (0,1)");
  if (!(cfg.nu > 0.0 && cfg.nu < 1.0))
    throw std::invalid_argument("SolverConfig: nu must lie in (0,1)");
  if (cfg.safeguard_period < 1)
    throw std::invalid_argument("SolverConfig: safeguard period must be >= 1");
  if (cfg.max_iters < 0) throw std::invalid_argument("SolverConfig: negative iteration cap");
  if (cfg.mu < 0.0) throw std::invalid_argument("SolverConfig: mu must be >= 0");
  if (cfg.tau <= 0.0) throw std::invalid_argument("SolverConfig: tau must be positive");
}

double resolve_mu(const SolverConfig& cfg, const SpcaProblem& prob) {
  if (cfg.mu > 0.0) return cfg.mu;
  return cfg.use_diag_weight ? 1.0 : 1.0 / lipschitz_bound(prob);
}

double stop_threshold(const SolverConfig& cfg, const SpcaProblem& prob, double mu,
                      std::size_t p) {
  return mu * static_cast<double>(prob.n()) * static_cast<double>(p) * cfg.tol_factor;
}

// Objective and score matrix AX of one point; the scores feed the gradient
// and the diagonal weight, so each point pays for one A-product only.
struct PointData {
  double f = 0.0;
  DenseMatrix scores;
};

PointData eval_point(const SpcaProblem& prob, const StiefelPoint& x) {
  PointData pd;
  pd.scores = matmul(prob.data(), x.mat());
  pd.f = -dot(pd.scores, pd.scores) + eval_g(prob, x.mat());
  return pd;
}

void finalize_metrics(RunReport& rep, const SpcaProblem& prob, const StiefelPoint& best,
                      double f_best) {
  rep.f = f_best;
  rep.x_final = best.mat();
  rep.sparsity = sparsity(best.mat());
  rep.adjusted_variance = adjusted_variance(prob, best);
}

}  // namespace

double fista_t_update(double t) { return (std::sqrt(4.0 * t * t + 1.0) + 1.0) / 2.0; }

StiefelPoint momentum_point(const StiefelPoint& x_next, const StiefelPoint& x_prev, double t_k,
                            double t_next) {
  const double coeff = (1.0 - t_k) / t_next;
  if (coeff == 0.0) return x_next;
  TangentVector back = inverse_retract(x_next, x_prev);
  return retract(x_next, back.scaled(coeff));
}

StiefelPoint initial_point(const SpcaProblem& prob, std::size_t p) {
  return ensure_on_manifold(prob.right_singular_vectors(p));
}

SolverState::SolverState(const StiefelPoint& x0, const SpcaProblem& prob)
    : x(x0), y(x0), z(x0) {
  f_x = eval_objective(prob, x0);
  f_z = f_x;
}

SafeguardOutcome safeguard_step(SolverState& st, const SolverConfig& cfg,
                                const SpcaProblem& prob) {
  SafeguardOutcome out;
  if (st.mu <= 0.0) st.mu = resolve_mu(cfg, prob);

  DenseMatrix scores_z = matmul(prob.data(), st.z.mat());
  DiagonalWeight w = cfg.use_diag_weight
                         ? diag_weight(prob, st.z, cfg.tau, scores_z)
                         : DiagonalWeight::identity(st.z.n(), st.z.p());
  SubproblemSpec spec(st.z, riem_grad_f(prob, st.z, scores_z), w, st.mu, prob.lambda());
  SubproblemSolution sol =
      solve_subproblem(spec, st.warm_z ? &*st.warm_z : nullptr, cfg.ssn);
  st.warm_z = sol.dual;
  if (!sol.converged) {
    out.subproblem_ok = false;
    return out;
  }

  out.eta_fnorm_sq = dot(sol.eta.mat(), sol.eta.mat());
  out.eta_pnorm_sq = cfg.use_diag_weight ? w.wnorm_sq(sol.eta.mat()) : out.eta_fnorm_sq;
  if (out.eta_pnorm_sq < stop_threshold(cfg, prob, st.mu, st.z.p())) {
    out.stationary = true;
    return out;
  }

  // backtracking on the F-norm sufficient-decrease condition
  double alpha = 1.0;
  StiefelPoint cand = retract(st.z, sol.eta);
  double f_cand = eval_point(prob, cand).f;
  while (f_cand > st.f_z - cfg.sigma * alpha * out.eta_fnorm_sq) {
    if (++out.backtracks > 60) {
      out.line_search_ok = false;
      return out;
    }
    alpha *= cfg.nu;
    cand = retract(st.z, sol.eta.scaled(alpha));
    f_cand = eval_point(prob, cand).f;
  }
  out.alpha = alpha;

  if (f_cand < st.f_x) {  // safeguard takes effect: restart the momentum
    st.x = cand;
    st.y = cand;
    st.t = 1.0;
    st.f_x = f_cand;
    out.took_effect = true;
  }
  st.z = st.x;
  st.f_z = st.f_x;
  return out;
}

RunReport run_amanpg(const SpcaProblem& prob, const StiefelPoint& x0, const SolverConfig& cfg) {
  validate_config(cfg);
  Timer timer;
  RunReport rep;

  SolverState st(x0, prob);
  st.mu = resolve_mu(cfg, prob);

  double prev_checkpoint_fz = std::numeric_limits<double>::infinity();
  bool have_checkpoint = false;
  SolveStatus status = SolveStatus::MaxIters;
  long k = 0;
  for (; k < cfg.max_iters; ++k) {
    st.k = k;
    int sg_flag = -1;
    if (k % cfg.safeguard_period == 0) {
      const double fz_incoming = st.f_z;
      SafeguardOutcome out = safeguard_step(st, cfg, prob);
      ++rep.safeguard_invocations;
      if (!out.subproblem_ok) {
        status = SolveStatus::SubproblemFailure;
        break;
      }
      rep.eta_norm = std::sqrt(out.eta_pnorm_sq);
      if (out.stationary) {
        status = SolveStatus::Converged;
        break;
      }
      if (!out.line_search_ok) {
        status = SolveStatus::LineSearchFailure;
        break;
      }
      if (out.took_effect) ++rep.safeguard_effect_count;
      if (have_checkpoint && !(fz_incoming < prev_checkpoint_fz))
        ++rep.safeguard_decrease_violations;
      prev_checkpoint_fz = fz_incoming;
      have_checkpoint = true;
      sg_flag = out.took_effect ? 1 : 0;
    }

    DenseMatrix scores_y = matmul(prob.data(), st.y.mat());
    DiagonalWeight w = cfg.use_diag_weight
                           ? diag_weight(prob, st.y, cfg.tau, scores_y)
                           : DiagonalWeight::identity(st.y.n(), st.y.p());
    SubproblemSpec spec(st.y, riem_grad_f(prob, st.y, scores_y), w, st.mu, prob.lambda());
    SubproblemSolution sol =
        solve_subproblem(spec, st.warm_y ? &*st.warm_y : nullptr, cfg.ssn);
    st.warm_y = sol.dual;
    if (!sol.converged) {
      status = SolveStatus::SubproblemFailure;
      break;
    }

    StiefelPoint x_next = retract(st.y, sol.eta);
    const double t_next = fista_t_update(st.t);
    if (std::fabs(t_next * t_next - t_next - st.t * st.t) >
        1e-14 * std::max(1.0, t_next * t_next))
      ++rep.t_identity_violations;

    StiefelPoint x_prev = st.x;
    st.x = x_next;
    st.f_x = eval_point(prob, st.x).f;
    try {
      st.y = momentum_point(st.x, x_prev, st.t, t_next);
      st.t = t_next;
    } catch (const NumericalError&) {
      st.y = st.x;  // iterates too far apart; restart the momentum sequence
      st.t = 1.0;
    }

    if (cfg.capture_history) {
      const double pn = cfg.use_diag_weight ? std::sqrt(w.wnorm_sq(sol.eta.mat()))
                                            : std::sqrt(dot(sol.eta.mat(), sol.eta.mat()));
      rep.history.push_back({k, st.f_x, pn, timer.seconds(), sg_flag});
    }
  }

  rep.status = status;
  rep.iters = k;
  rep.mu_final = st.mu;
  // the accelerated sequence can sit above the safeguard sequence at exit
  if (st.f_z < st.f_x)
    finalize_metrics(rep, prob, st.z, st.f_z);
  else
    finalize_metrics(rep, prob, st.x, st.f_x);
  rep.seconds = timer.seconds();
  return rep;
}

namespace {

RunReport manpg_like(const SpcaProblem& prob, const StiefelPoint& x0, const SolverConfig& cfg,
                     bool adapt) {
  validate_config(cfg);
  Timer timer;
  RunReport rep;
  const std::size_t p = x0.p();

  const double mu0 = resolve_mu(cfg, prob);
  double mu = mu0;
  StiefelPoint x = x0;
  PointData at_x = eval_point(prob, x);
  double f_x = at_x.f;
  std::optional<SymMatrix> warm;
  const DiagonalWeight unit_weight = DiagonalWeight::identity(x0.n(), p);

  SolveStatus status = SolveStatus::MaxIters;
  long k = 0;
  for (; k < cfg.max_iters; ++k) {
    DiagonalWeight w = cfg.use_diag_weight ? diag_weight(prob, x, cfg.tau, at_x.scores)
                                           : unit_weight;
    SubproblemSpec spec(x, riem_grad_f(prob, x, at_x.scores), w, mu, prob.lambda());
    SubproblemSolution sol = solve_subproblem(spec, warm ? &*warm : nullptr, cfg.ssn);
    warm = sol.dual;
    if (!sol.converged) {
      status = SolveStatus::SubproblemFailure;
      break;
    }

    const double fnorm_sq = dot(sol.eta.mat(), sol.eta.mat());
    const double pnorm_sq = cfg.use_diag_weight ? w.wnorm_sq(sol.eta.mat()) : fnorm_sq;
    rep.eta_norm = std::sqrt(pnorm_sq);
    if (pnorm_sq < stop_threshold(cfg, prob, mu, p)) {
      status = SolveStatus::Converged;
      break;
    }

    double alpha = 1.0;
    int backtracks = 0;
    StiefelPoint cand = retract(x, sol.eta);
    PointData at_cand = eval_point(prob, cand);
    bool ls_failed = false;
    while (at_cand.f > f_x - cfg.sigma * alpha * fnorm_sq) {
      if (++backtracks > 60) {
        ls_failed = true;
        break;
      }
      alpha *= cfg.nu;
      cand = retract(x, sol.eta.scaled(alpha));
      at_cand = eval_point(prob, cand);
    }
    if (ls_failed) {
      status = SolveStatus::LineSearchFailure;
      break;
    }

    if (at_cand.f > f_x) ++rep.monotonicity_violations;
    x = cand;
    at_x = std::move(at_cand);
    f_x = at_x.f;

    if (adapt) {
      mu = backtracks == 0 ? std::min(mu * cfg.ada_grow, cfg.ada_max_factor * mu0)
                           : std::max(mu * cfg.ada_shrink, cfg.ada_min_factor * mu0);
    }

    if (cfg.capture_history)
      rep.history.push_back({k, f_x, std::sqrt(pnorm_sq), timer.seconds(), -1});
  }

  rep.status = status;
  rep.iters = k;
  rep.mu_final = mu;
  finalize_metrics(rep, prob, x, f_x);
  rep.seconds = timer.seconds();
  return rep;
}

}  // namespace

RunReport run_manpg(const SpcaProblem& prob, const StiefelPoint& x0, const SolverConfig& cfg) {
  return manpg_like(prob, x0, cfg, /*adapt=*/false);
}

RunReport run_manpg_ada(const SpcaProblem& prob, const StiefelPoint& x0, const SolverConfig& cfg) {
  return manpg_like(prob, x0, cfg, /*adapt=*/true);
}

RunReport solve(const SpcaProblem& prob, const StiefelPoint& x0, const SolverConfig& cfg) {
  switch (cfg.variant) {
    case Variant::ManPG:
      return run_manpg(prob, x0, cfg);
    case Variant::ManPGAda:
      return run_manpg_ada(prob, x0, cfg);
    case Variant::AManPG:
      return run_amanpg(prob, x0, cfg);
  }
  throw std::invalid_argument("solve: unknown variant");
}

}  // namespace manpg

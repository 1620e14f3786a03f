#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "manpg/prox_ssn.hpp"
#include "manpg/spca.hpp"
#include "manpg/stiefel.hpp"

namespace manpg {

enum class Variant { ManPG, ManPGAda, AManPG };

struct SolverConfig {
  Variant variant = Variant::AManPG;
  bool use_diag_weight = false;
  double mu = 0.0;            // 0 → 1/(2‖A‖₂²) unweighted, 1.0 with the weight
  double sigma = 1e-4;        // line-search sufficient decrease
  double nu = 0.5;            // line-search shrink factor
  int safeguard_period = 5;   // safeguard every N iterations
  double tau = 0.1;           // diagonal-weight floor
  long max_iters = 10000;
  double tol_factor = 1e-10;  // stop when ‖η‖_P² < μ·n·p·tol_factor
  SsnOptions ssn;
  bool capture_history = true;
  // μ adaptation (ManPG-Ada): grow on unit steps, shrink on backtracks,
  // clamped to [ada_min_factor, ada_max_factor]·μ₀.
  double ada_grow = 1.1;
  double ada_shrink = 0.5;
  double ada_max_factor = 100.0;
  double ada_min_factor = 1e-4;
};

struct HistoryEntry {
  long k;
  double f;         // F(x_{k+1})
  double eta_norm;  // ‖η‖_P of this iteration's subproblem
  double seconds;   // elapsed wall time
  int safeguard;    // -1 plain iteration, 0 safeguard ran, 1 safeguard took effect
};

enum class SolveStatus { Converged, MaxIters, SubproblemFailure, LineSearchFailure };

struct RunReport {
  SolveStatus status = SolveStatus::MaxIters;
  long iters = 0;
  double seconds = 0.0;
  double f = 0.0;
  double eta_norm = 0.0;  // ‖η‖_P of the last stopping-rule subproblem
  double sparsity = 0.0;
  double adjusted_variance = 0.0;
  int safeguard_invocations = 0;
  int safeguard_effect_count = 0;
  double mu_final = 0.0;
  DenseMatrix x_final;
  std::vector<HistoryEntry> history;
  // assertion counters; all remain zero on healthy runs
  long monotonicity_violations = 0;
  long safeguard_decrease_violations = 0;
  long t_identity_violations = 0;
};

/// Extrapolation-weight recurrence t' = (√(4t²+1)+1)/2, so t'² − t' = t².
double fista_t_update(double t);

/// Momentum combination on the manifold:
/// retract(x_next, ((1−t_k)/t_next)·inverse_retract(x_next, x_prev)).
/// Raises NumericalError when x_prev is outside the inverse-retraction range;
/// callers fall back to a momentum reset.
StiefelPoint momentum_point(const StiefelPoint& x_next, const StiefelPoint& x_prev, double t_k,
                            double t_next);

/// Leading right singular vectors of the data matrix.
StiefelPoint initial_point(const SpcaProblem& prob, std::size_t p);

/// Mutable state shared by the accelerated loop and its safeguard.
struct SolverState {
  SolverState(const StiefelPoint& x0, const SpcaProblem& prob);

  StiefelPoint x, y, z;
  double t = 1.0;
  double f_x = 0.0;
  double f_z = 0.0;
  double mu = 0.0;  // resolved on first use when 0
  long k = 0;
  std::optional<SymMatrix> warm_y;
  std::optional<SymMatrix> warm_z;
};

struct SafeguardOutcome {
  bool stationary = false;   // stopping rule met at z
  bool took_effect = false;  // accelerated iterate replaced
  bool subproblem_ok = true;
  bool line_search_ok = true;
  double eta_pnorm_sq = 0.0;
  double eta_fnorm_sq = 0.0;
  double alpha = 1.0;
  int backtracks = 0;
};

/// One safeguard invocation: solve the subproblem at z, line-search along
/// η_z, replace (x, y, t ← 1) when the searched point beats F(x), and reset
/// z to the (possibly new) x.
SafeguardOutcome safeguard_step(SolverState& st, const SolverConfig& cfg,
                                const SpcaProblem& prob);

RunReport run_manpg(const SpcaProblem& prob, const StiefelPoint& x0, const SolverConfig& cfg);
RunReport run_manpg_ada(const SpcaProblem& prob, const StiefelPoint& x0, const SolverConfig& cfg);
RunReport run_amanpg(const SpcaProblem& prob, const StiefelPoint& x0, const SolverConfig& cfg);

/// Dispatch on cfg.variant.
RunReport solve(const SpcaProblem& prob, const StiefelPoint& x0, const SolverConfig& cfg);

}  // namespace manpg

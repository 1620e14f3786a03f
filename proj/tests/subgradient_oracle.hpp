#pragma once

// Projected-subgradient oracle for the tangent-space proximal subproblem
//   min_{eta in T_X}  <g, eta> + (1/(2 mu)) ||eta||_F^2 + lambda ||X + eta||_1
// (identity weight). Deliberately reimplements the tangent projection and the
// objective so it shares nothing with the semi-smooth Newton path it checks.
// Steps follow the strongly-convex schedule alpha_t = 2 mu / (t + 1); the
// best-objective iterate is returned.

#include <cmath>
#include <cstddef>

#include "manpg/dense_matrix.hpp"

namespace oracle {

inline manpg::DenseMatrix project_tangent_naive(const manpg::DenseMatrix& x,
                                                const manpg::DenseMatrix& v) {
  using manpg::DenseMatrix;
  const std::size_t n = x.rows(), p = x.cols();
  DenseMatrix s(p, p);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += x(k, a) * v(k, b);
      s(a, b) = acc;
    }
  DenseMatrix out = v;
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < p; ++k) acc += x(i, k) * 0.5 * (s(k, j) + s(j, k));
      out(i, j) -= acc;
    }
  return out;
}

inline double subproblem_objective(const manpg::DenseMatrix& x, const manpg::DenseMatrix& g,
                                   double mu, double lambda, const manpg::DenseMatrix& eta) {
  double val = 0.0;
  for (std::size_t k = 0; k < eta.size(); ++k) {
    val += g.data()[k] * eta.data()[k];
    val += eta.data()[k] * eta.data()[k] / (2.0 * mu);
    val += lambda * std::fabs(x.data()[k] + eta.data()[k]);
  }
  return val;
}

inline manpg::DenseMatrix solve_by_subgradient(const manpg::DenseMatrix& x,
                                               const manpg::DenseMatrix& g, double mu,
                                               double lambda, long iterations) {
  using manpg::DenseMatrix;
  DenseMatrix eta(x.rows(), x.cols());
  DenseMatrix best = eta;
  double best_val = subproblem_objective(x, g, mu, lambda, eta);
  for (long t = 1; t <= iterations; ++t) {
    DenseMatrix sub = g;
    for (std::size_t k = 0; k < sub.size(); ++k) {
      sub.data()[k] += eta.data()[k] / mu;
      const double v = x.data()[k] + eta.data()[k];
      if (v > 0.0)
        sub.data()[k] += lambda;
      else if (v < 0.0)
        sub.data()[k] -= lambda;
    }
    sub = project_tangent_naive(x, sub);
    const double alpha = 2.0 * mu / static_cast<double>(t + 1);
    for (std::size_t k = 0; k < eta.size(); ++k) eta.data()[k] -= alpha * sub.data()[k];
    eta = project_tangent_naive(x, eta);
    const double val = subproblem_objective(x, g, mu, lambda, eta);
    if (val < best_val) {
      best_val = val;
      best = eta;
    }
  }
  return best;
}

}  // namespace oracle

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "manpg/errors.hpp"
#include "manpg/linalg.hpp"
#include "manpg/rng.hpp"
#include "manpg/spca.hpp"
#include "manpg/stiefel.hpp"

using namespace manpg;

namespace {

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  return rng.normal_matrix(rows, cols);
}

// Deflation oracle for the adjusted variance: strip each score column of its
// correlation with the previous ones by modified Gram-Schmidt and accumulate
// the residual variances. Independent of the Householder QR route.
double adjusted_variance_oracle(const SpcaProblem& prob, const StiefelPoint& x) {
  DenseMatrix ax = matmul(prob.data(), x.mat());
  const std::size_t m = ax.rows(), p = ax.cols();
  double total = 0.0;
  std::vector<std::vector<double>> basis;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = ax(i, j);
    for (const auto& b : basis) {
      double d = 0.0;
      for (std::size_t i = 0; i < m; ++i) d += b[i] * v[i];
      for (std::size_t i = 0; i < m; ++i) v[i] -= d * b[i];
    }
    double nrm_sq = 0.0;
    for (double t : v) nrm_sq += t * t;
    total += nrm_sq;
    if (nrm_sq > 0.0) {
      const double inv = 1.0 / std::sqrt(nrm_sq);
      for (double& t : v) t *= inv;
      basis.push_back(std::move(v));
    }
  }
  return total / prob.top_singular_sq_sum(p);
}

}  // namespace

TEST_CASE("eval_f: identity data gives -p on the whole manifold") {
  SpcaProblem prob(DenseMatrix::identity(6), 0.5);
  for (std::uint64_t seed = 1; seed < 4; ++seed) {
    StiefelPoint x = random_point(6, 3, seed);
    CHECK(eval_f(prob, x) == doctest::Approx(-3.0).epsilon(1e-13));
  }
}

TEST_CASE("eval_f: zero data gives zero") {
  SpcaProblem prob(DenseMatrix(4, 5), 1.0);
  StiefelPoint x = random_point(5, 2, 2);
  CHECK(eval_f(prob, x) == 0.0);
}

TEST_CASE("eval_f: matches the naive double-loop oracle") {
  DenseMatrix a = random_matrix(10, 6, 3);
  SpcaProblem prob(a, 0.0);
  StiefelPoint x = random_point(6, 2, 4);
  double acc = 0.0;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 6; ++k) s += a(i, k) * x.mat()(k, j);
      acc += s * s;
    }
  CHECK(eval_f(prob, x) == doctest::Approx(-acc).epsilon(1e-12));
}

TEST_CASE("eval_g: scaled entrywise l1 norm") {
  SpcaProblem prob(DenseMatrix::identity(4), 2.0);
  DenseMatrix x(4, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 1.0;
  CHECK(eval_g(prob, x) == doctest::Approx(4.0));
  CHECK(eval_g(prob.with_lambda(0.0), x) == 0.0);

  DenseMatrix y = random_matrix(4, 2, 9);
  double naive = 0.0;
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 4; ++i) naive += std::fabs(y(i, j));
  CHECK(eval_g(prob, y) == doctest::Approx(2.0 * naive).epsilon(1e-14));
}

TEST_CASE("riem_grad_f: vanishes for identity and zero data") {
  StiefelPoint x = random_point(5, 2, 11);
  SpcaProblem ident(DenseMatrix::identity(5), 1.0);
  CHECK(riem_grad_f(ident, x).norm() < 1e-12);
  SpcaProblem zero(DenseMatrix(3, 5), 1.0);
  CHECK(riem_grad_f(zero, x).norm() == 0.0);
}

TEST_CASE("riem_grad_f: finite-difference oracle with first-order decay") {
  DenseMatrix a = random_matrix(8, 6, 21);
  SpcaProblem prob(a, 0.0);
  StiefelPoint x = random_point(6, 2, 22);
  TangentVector grad = riem_grad_f(prob, x);
  const double f0 = eval_f(prob, x);
  for (std::uint64_t seed = 30; seed < 35; ++seed) {
    Rng rng(seed);
    TangentVector eta = project_tangent(x, rng.normal_matrix(6, 2));
    eta = eta.scaled(1.0 / eta.norm());
    const double dderiv = dot(grad.mat(), eta.mat());
    double prev_err = -1.0;
    for (double t : {1e-2, 5e-3, 2.5e-3}) {
      const double fd = (eval_f(prob, retract(x, eta.scaled(t))) - f0) / t;
      const double err = std::fabs(fd - dderiv);
      if (prev_err >= 0.0) CHECK(err <= 0.62 * prev_err);
      prev_err = err;
    }
  }
}

TEST_CASE("lipschitz_bound: fixed cases and SVD oracle") {
  CHECK(lipschitz_bound(SpcaProblem(DenseMatrix::identity(5), 0.0)) ==
        doctest::Approx(2.0).epsilon(1e-10));

  DenseMatrix d(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  CHECK(lipschitz_bound(SpcaProblem(d, 0.0)) == doctest::Approx(18.0).epsilon(1e-10));

  DenseMatrix a = random_matrix(12, 7, 41);
  auto svd = small_svd(a);
  CHECK(lipschitz_bound(SpcaProblem(a, 0.0)) ==
        doctest::Approx(2.0 * svd.sigma[0] * svd.sigma[0]).epsilon(1e-8));
}

TEST_CASE("diag_weight: flat cases fall to the floor tau") {
  StiefelPoint x = random_point(5, 2, 51);
  SpcaProblem ident(DenseMatrix::identity(5), 1.0);
  DiagonalWeight w = diag_weight(ident, x, 0.1);
  CHECK(w.entries().max_abs() == doctest::Approx(0.1));

  SpcaProblem zero(DenseMatrix(4, 5), 1.0);
  DiagonalWeight wz = diag_weight(zero, x, 0.25);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 5; ++i) CHECK(wz(i, j) == 0.25);
}

TEST_CASE("diag_weight: equals the diagonal of the assembled Kronecker matrix") {
  const std::size_t n = 5, p = 2;
  DenseMatrix a = random_matrix(7, n, 52);
  SpcaProblem prob(a, 1.0);
  StiefelPoint x = random_point(n, p, 53);
  const double tau = 0.05;
  DiagonalWeight w = diag_weight(prob, x, tau);

  // J = -2 I_p ⊗ (AᵀA) + 2 (XᵀAᵀAX) ⊗ I_n, vec by columns
  DenseMatrix ata = matmul_tn(a, a);
  DenseMatrix ax = matmul(a, x.mat());
  DenseMatrix xaax = matmul_tn(ax, ax);
  DenseMatrix j_mat(n * p, n * p);
  for (std::size_t bj = 0; bj < p; ++bj)
    for (std::size_t bi = 0; bi < p; ++bi)
      for (std::size_t cj = 0; cj < n; ++cj)
        for (std::size_t ci = 0; ci < n; ++ci) {
          double v = 0.0;
          if (bi == bj) v += -2.0 * ata(ci, cj);
          if (ci == cj) v += 2.0 * xaax(bi, bj);
          j_mat(bi * n + ci, bj * n + cj) = v;
        }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double expected = std::max(j_mat(j * n + i, j * n + i), tau);
      CHECK(w(i, j) == expected);
    }
}

TEST_CASE("diag_weight: operational eigenvalue bounds") {
  DenseMatrix a = random_matrix(9, 8, 54);
  SpcaProblem prob(a, 1.0);
  StiefelPoint x = random_point(8, 3, 55);
  const double tau = 0.1;
  DiagonalWeight w = diag_weight(prob, x, tau);
  double max_diag = 0.0;
  for (double v : prob.diag_ata()) max_diag = std::max(max_diag, v);
  const double upper = 2.0 * (max_diag + prob.spec_sq());
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(w(i, j) >= tau);
      CHECK(w(i, j) <= upper);
    }
}

TEST_CASE("sparsity: fixed and constructed patterns") {
  CHECK(sparsity(DenseMatrix(3, 4), 1e-5) == 1.0);
  CHECK(sparsity(DenseMatrix::identity(2), 1e-5) == 0.5);

  DenseMatrix x(10, 3);
  Rng rng(61);
  std::size_t zeros = 0;
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 10; ++i) {
      if (rng.next_uniform() < 0.4) {
        x(i, j) = 0.0;
        ++zeros;
      } else {
        x(i, j) = (rng.next_uniform() < 0.5 ? -1.0 : 1.0) * (0.5 + rng.next_uniform());
      }
    }
  CHECK(sparsity(x, 1e-5) == doctest::Approx(static_cast<double>(zeros) / 30.0));
}

TEST_CASE("adjusted_variance: equals one at the leading singular subspace") {
  DenseMatrix a = random_matrix(12, 9, 71);
  SpcaProblem prob(a, 0.0);
  StiefelPoint x{prob.right_singular_vectors(3)};
  CHECK(adjusted_variance(prob, x) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("adjusted_variance: single column reduces to a Rayleigh ratio") {
  DenseMatrix a = random_matrix(10, 6, 72);
  SpcaProblem prob(a, 0.0);
  StiefelPoint x = random_point(6, 1, 73);
  DenseMatrix ax = matmul(a, x.mat());
  auto svd = small_svd(a);
  const double expected = dot(ax, ax) / (svd.sigma[0] * svd.sigma[0]);
  CHECK(adjusted_variance(prob, x) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("adjusted_variance: matches the deflation oracle and stays in [0,1]") {
  for (std::uint64_t seed = 80; seed < 85; ++seed) {
    DenseMatrix a = random_matrix(9, 7, seed);
    SpcaProblem prob(a, 0.0);
    StiefelPoint x = random_point(7, 3, seed + 1);
    const double got = adjusted_variance(prob, x);
    CHECK(got == doctest::Approx(adjusted_variance_oracle(prob, x)).epsilon(1e-10));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("eval_f lower bound over the manifold") {
  DenseMatrix a = random_matrix(6, 8, 86);
  SpcaProblem prob(a, 0.0);
  for (std::uint64_t seed = 90; seed < 95; ++seed) {
    StiefelPoint x = random_point(8, 3, seed);
    CHECK(eval_f(prob, x) >= -prob.spec_sq() * 3.0 - 1e-9);
  }
}

TEST_CASE("gen_random_data: deterministic, standardized columns") {
  DenseMatrix a1 = gen_random_data(12, 5, 7);
  DenseMatrix a2 = gen_random_data(12, 5, 7);
  CHECK((a1 - a2).frob_norm() == 0.0);

  for (std::size_t j = 0; j < 5; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 12; ++i) mean += a1(i, j);
    mean /= 12.0;
    CHECK(std::fabs(mean) < 1e-12);
    // two-pass and naive variance formulas agree
    double two_pass = 0.0, naive = 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
      two_pass += (a1(i, j) - mean) * (a1(i, j) - mean);
      naive += a1(i, j) * a1(i, j);
    }
    two_pass /= 12.0;
    naive = naive / 12.0 - mean * mean;
    CHECK(std::sqrt(two_pass) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(two_pass == doctest::Approx(naive).epsilon(1e-10));
  }
}

TEST_CASE("synthetic data: base structure has rank at most five") {
  DenseMatrix base = synthetic_base_matrix(10, 30);
  auto svd = small_svd(base.transposed());  // 30x10
  REQUIRE(svd.sigma.size() == 10);
  CHECK(svd.sigma[4] > 1e-8);
  CHECK(svd.sigma[5] < 1e-10);
}

TEST_CASE("gen_synthetic_data: deterministic, unit-std columns, not centered") {
  CHECK_THROWS_AS(gen_synthetic_data(11, 40, 1), std::invalid_argument);

  DenseMatrix a1 = gen_synthetic_data(20, 40, 5);
  DenseMatrix a2 = gen_synthetic_data(20, 40, 5);
  CHECK((a1 - a2).frob_norm() == 0.0);

  bool some_nonzero_mean = false;
  for (std::size_t j = 0; j < 40; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 20; ++i) mean += a1(i, j);
    mean /= 20.0;
    double var = 0.0;
    for (std::size_t i = 0; i < 20; ++i) var += (a1(i, j) - mean) * (a1(i, j) - mean);
    var /= 20.0;
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-12));
    if (std::fabs(mean) > 0.1) some_nonzero_mean = true;
  }
  CHECK(some_nonzero_mean);  // support columns keep their mean
}

TEST_CASE("normalize_columns: fixed case, idempotence, recomputed stats") {
  DenseMatrix m(2, 1);
  m(0, 0) = 1.0;
  m(1, 0) = 3.0;
  DenseMatrix out = normalize_columns(m, true);
  CHECK(out(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(out(1, 0) == doctest::Approx(1.0).epsilon(1e-14));

  DenseMatrix r = normalize_columns(random_matrix(15, 4, 91), true);
  DenseMatrix r2 = normalize_columns(r, true);
  CHECK((r2 - r).frob_norm() < 1e-12);

  DenseMatrix constant(5, 2);
  for (std::size_t i = 0; i < 5; ++i) constant(i, 0) = 2.0, constant(i, 1) = i;
  CHECK_THROWS_AS(normalize_columns(constant, true), NumericalError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "manpg/errors.hpp"
#include "manpg/linalg.hpp"
#include "manpg/rng.hpp"

using namespace manpg;

namespace {

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  return rng.normal_matrix(rows, cols);
}

SymMatrix random_sym(std::size_t dim, std::uint64_t seed) {
  return SymMatrix::sym_part(random_matrix(dim, dim, seed));
}

double ortho_residual(const DenseMatrix& q) {
  DenseMatrix g = matmul_tn(q, q);
  g -= DenseMatrix::identity(q.cols());
  return g.frob_norm();
}

// Test-side oracle: naive Gauss-Jordan elimination with full pivoting,
// independent of the library's LU path.
std::vector<double> gauss_jordan(DenseMatrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> colperm(n);
  for (std::size_t i = 0; i < n; ++i) colperm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pi = k, pj = k;
    double best = 0.0;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (std::fabs(a(i, j)) > best) best = std::fabs(a(i, j)), pi = i, pj = j;
    REQUIRE(best > 0.0);
    for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pi, j));
    std::swap(b[k], b[pi]);
    for (std::size_t i = 0; i < n; ++i) std::swap(a(i, k), a(i, pj));
    std::swap(colperm[k], colperm[pj]);
    const double piv = a(k, k);
    for (std::size_t j = 0; j < n; ++j) a(k, j) /= piv;
    b[k] /= piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = a(i, k);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[colperm[i]] = b[i];
  return x;
}

}  // namespace

TEST_CASE("thin_qr: identity columns are reproduced") {
  DenseMatrix m(3, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  auto [q, r] = thin_qr(m);
  CHECK((q - m).frob_norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK((r - DenseMatrix::identity(2)).frob_norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("thin_qr: 3-4-5 column normalizes") {
  DenseMatrix m(2, 1);
  m(0, 0) = 3.0;
  m(1, 0) = 4.0;
  auto [q, r] = thin_qr(m);
  CHECK(q(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(q(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(r(0, 0) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("thin_qr: residual oracle on random inputs") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const std::size_t n = 20 + 5 * seed;
    const std::size_t p = 1 + seed % 6;
    DenseMatrix m = random_matrix(n, p, seed);
    auto [q, r] = thin_qr(m);
    CHECK(ortho_residual(q) < 1e-12);
    CHECK((matmul(q, r) - m).frob_norm() < 1e-12 * m.frob_norm());
    for (std::size_t j = 0; j < p; ++j) {
      CHECK(r(j, j) >= 0.0);
      for (std::size_t i = j + 1; i < p; ++i) CHECK(r(i, j) == 0.0);
    }
  }
  // a taller instance
  DenseMatrix m = random_matrix(50, 4, 99);
  auto [q, r] = thin_qr(m);
  CHECK(ortho_residual(q) < 1e-12);
  CHECK((matmul(q, r) - m).frob_norm() < 1e-12 * m.frob_norm());
}

TEST_CASE("thin_qr: rank deficiency is rejected") {
  DenseMatrix m = random_matrix(12, 3, 5);
  for (std::size_t i = 0; i < 12; ++i) m(i, 2) = 2.0 * m(i, 0);  // duplicate direction
  CHECK_THROWS_AS(thin_qr(m), NumericalError);
  CHECK_NOTHROW(thin_qr(m, /*check_rank=*/false));
}

TEST_CASE("small_svd: diagonal matrix") {
  DenseMatrix m(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  auto svd = small_svd(m);
  CHECK(svd.sigma[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(svd.sigma[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((svd.u - DenseMatrix::identity(2)).frob_norm() < 1e-14);
  CHECK((svd.v - DenseMatrix::identity(2)).frob_norm() < 1e-14);
}

TEST_CASE("small_svd: permutation has unit singular values") {
  DenseMatrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  auto svd = small_svd(m);
  CHECK(svd.sigma[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(svd.sigma[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("small_svd: singular values match the sym_eig oracle") {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const std::size_t p = 2 + seed % 5;
    DenseMatrix m = random_matrix(p, p, seed);
    auto svd = small_svd(m);
    auto eig = sym_eig(SymMatrix::sym_part(matmul_tn(m, m)));
    REQUIRE(svd.sigma.size() == p);
    for (std::size_t k = 0; k < p; ++k) {
      const double from_eig = std::sqrt(std::max(0.0, eig.values[p - 1 - k]));
      CHECK(svd.sigma[k] == doctest::Approx(from_eig).epsilon(1e-10));
    }
  }
}

TEST_CASE("small_svd: reconstruction and orthogonality") {
  for (std::uint64_t seed = 21; seed < 27; ++seed) {
    const std::size_t rows = 4 + seed % 9;
    const std::size_t cols = 2 + seed % 4;
    DenseMatrix m = random_matrix(rows, cols, seed);
    auto svd = small_svd(m);
    DenseMatrix us = svd.u;
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t i = 0; i < rows; ++i) us(i, j) *= svd.sigma[j];
    CHECK((matmul_nt(us, svd.v) - m).frob_norm() < 1e-12 * m.frob_norm());
    CHECK(ortho_residual(svd.u) < 1e-12);
    CHECK(ortho_residual(svd.v) < 1e-12);
    for (std::size_t k = 0; k + 1 < cols; ++k) CHECK(svd.sigma[k] >= svd.sigma[k + 1]);
  }
}

TEST_CASE("small_svd: exactly singular input") {
  DenseMatrix m(3, 3);
  m(0, 0) = 1.0;
  m(1, 0) = 2.0;  // rank one
  auto svd = small_svd(m);
  CHECK(svd.sigma[0] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK(svd.sigma[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ortho_residual(svd.u) < 1e-12);
  CHECK(ortho_residual(svd.v) < 1e-12);
}

TEST_CASE("sym_eig: diagonal input") {
  SymMatrix m(3);
  m.set(0, 0, 1.0);
  m.set(1, 1, 2.0);
  m.set(2, 2, 3.0);
  auto eig = sym_eig(m);
  CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eig.values[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(eig.values[2] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK((eig.vectors - DenseMatrix::identity(3)).frob_norm() < 1e-14);
}

TEST_CASE("sym_eig: hand-computable 2x2") {
  SymMatrix m(2);
  m.set(0, 0, 2.0);
  m.set(1, 1, 2.0);
  m.set(0, 1, 1.0);
  auto eig = sym_eig(m);
  CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("sym_eig: reconstruction residual on random symmetric input") {
  for (std::uint64_t seed = 31; seed < 39; ++seed) {
    const std::size_t p = 2 + seed % 7;
    SymMatrix m = random_sym(p, seed);
    auto eig = sym_eig(m);
    DenseMatrix vl = eig.vectors;
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < p; ++i) vl(i, j) *= eig.values[j];
    CHECK((matmul_nt(vl, eig.vectors) - m.to_dense()).frob_norm() < 1e-12 * m.frob_norm());
    CHECK(ortho_residual(eig.vectors) < 1e-12);
    for (std::size_t k = 0; k + 1 < p; ++k) CHECK(eig.values[k] <= eig.values[k + 1]);
  }
  // also one 5×5 instance as in the contract
  SymMatrix m = random_sym(5, 77);
  auto eig = sym_eig(m);
  DenseMatrix vl = eig.vectors;
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t i = 0; i < 5; ++i) vl(i, j) *= eig.values[j];
  CHECK((matmul_nt(vl, eig.vectors) - m.to_dense()).frob_norm() < 1e-12 * m.frob_norm());
}

TEST_CASE("solve_lyapunov: identity case S+S=2I") {
  const std::size_t p = 3;
  SymMatrix s = solve_lyapunov(DenseMatrix::identity(p), SymMatrix::scaled_identity(p, 2.0));
  CHECK((s.to_dense() - DenseMatrix::identity(p)).frob_norm() < 1e-12);
}

TEST_CASE("solve_lyapunov: decoupled diagonal case") {
  DenseMatrix b(3, 3);
  b(0, 0) = 1.0;
  b(1, 1) = 2.0;
  b(2, 2) = 4.0;
  SymMatrix s = solve_lyapunov(b, SymMatrix::scaled_identity(3, 2.0));
  CHECK(s(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(s(1, 1) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(s(2, 2) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(std::fabs(s(0, 1)) < 1e-13);
}

TEST_CASE("solve_lyapunov: random B with PD symmetric part vs vectorized oracle") {
  for (std::uint64_t seed = 41; seed < 49; ++seed) {
    const std::size_t p = 1 + seed % 8;
    DenseMatrix b = random_matrix(p, p, seed);
    b *= 0.3;
    for (std::size_t i = 0; i < p; ++i) b(i, i) += 2.0;  // make sym part PD
    SymMatrix c = random_sym(p, seed + 1000);
    SymMatrix s = solve_lyapunov(b, c);

    DenseMatrix sd = s.to_dense();
    DenseMatrix resid = matmul(b, sd) + matmul_nt(sd, b) - c.to_dense();
    CHECK(resid.frob_norm() <= 1e-10 * c.frob_norm());

    // oracle: solve (I⊗B + B⊗I with the transpose layout) vec(S) = vec(C)
    DenseMatrix k(p * p, p * p);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < p; ++i) {
        const std::size_t row = j * p + i;
        for (std::size_t l = 0; l < p; ++l) k(row, j * p + l) += b(i, l);  // (BS)_ij
        for (std::size_t l = 0; l < p; ++l) k(row, l * p + i) += b(j, l);  // (SBᵀ)_ij
      }
    std::vector<double> rhs(p * p);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < p; ++i) rhs[j * p + i] = c(i, j);
    std::vector<double> x = gauss_jordan(k, rhs);
    double diff = 0.0;
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < p; ++i) {
        const double d = x[j * p + i] - sd(i, j);
        diff += d * d;
      }
    CHECK(std::sqrt(diff) < 1e-10 * (1.0 + c.frob_norm()));
  }
}

TEST_CASE("solve_lyapunov: singular pencil is reported") {
  DenseMatrix b(2, 2);
  b(0, 0) = 1.0;
  b(1, 1) = -1.0;  // eigenvalue pair sums to zero
  CHECK_THROWS_AS(solve_lyapunov(b, SymMatrix::identity(2)), NumericalError);
}

TEST_CASE("spectral_norm_sq: fixed cases") {
  DenseMatrix d(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  CHECK(spectral_norm_sq(d) == doctest::Approx(9.0).epsilon(1e-10));

  DenseMatrix two_i = DenseMatrix::identity(5);
  two_i *= 2.0;
  CHECK(spectral_norm_sq(two_i) == doctest::Approx(4.0).epsilon(1e-10));

  DenseMatrix zero(4, 7);
  CHECK(spectral_norm_sq(zero) == 0.0);
}

TEST_CASE("spectral_norm_sq: SVD oracle on rectangular input") {
  DenseMatrix a = random_matrix(40, 30, 7);
  auto svd = small_svd(a);
  const double expected = svd.sigma[0] * svd.sigma[0];
  CHECK(spectral_norm_sq(a) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("spectral_norm_sq: 200x200 relative accuracy vs eig oracle") {
  DenseMatrix a = random_matrix(200, 200, 11);
  auto eig = sym_eig(SymMatrix::sym_part(matmul_tn(a, a)));
  const double expected = eig.values.back();
  CHECK(spectral_norm_sq(a) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("solve_dense: residual on random systems") {
  for (std::uint64_t seed = 61; seed < 65; ++seed) {
    const std::size_t n = 3 + 3 * (seed % 4);
    DenseMatrix a = random_matrix(n, n, seed);
    std::vector<double> b(n);
    Rng rng(seed + 5);
    for (auto& v : b) v = rng.next_normal();
    std::vector<double> x = solve_dense(a, b);
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = -b[i];
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * x[j];
      r += s * s;
    }
    CHECK(std::sqrt(r) < 1e-10);
  }
}

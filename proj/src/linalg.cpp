#include "manpg/linalg.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "manpg/errors.hpp"
#include "manpg/rng.hpp"

namespace manpg {

namespace {

double sign_or_one(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

QrResult thin_qr(const DenseMatrix& m, bool check_rank) {
  const std::size_t n = m.rows(), p = m.cols();
  if (n < p) throw std::invalid_argument("thin_qr: need rows >= cols");

  const double mnorm = m.frob_norm();
  DenseMatrix a = m;
  // Householder vectors, stored column k below (and on) the diagonal.
  DenseMatrix v(n, p);

  for (std::size_t k = 0; k < p; ++k) {
    double normx = 0.0;
    for (std::size_t i = k; i < n; ++i) normx += a(i, k) * a(i, k);
    normx = std::sqrt(normx);
    if (normx == 0.0) continue;  // zero column, reflector skipped, R_kk = 0

    const double alpha = -sign_or_one(a(k, k)) * normx;
    double vnorm_sq = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      double vi = a(i, k);
      if (i == k) vi -= alpha;
      v(i, k) = vi;
      vnorm_sq += vi * vi;
    }
    if (vnorm_sq == 0.0) continue;
    const double beta = 2.0 / vnorm_sq;

    // apply (I - beta v vᵀ) to the trailing columns
    for (std::size_t j = k; j < p; ++j) {
      double dotv = 0.0;
      for (std::size_t i = k; i < n; ++i) dotv += v(i, k) * a(i, j);
      dotv *= beta;
      for (std::size_t i = k; i < n; ++i) a(i, j) -= dotv * v(i, k);
    }
    a(k, k) = alpha;
    for (std::size_t i = k + 1; i < n; ++i) a(i, k) = 0.0;
  }

  DenseMatrix r(p, p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i <= j; ++i) r(i, j) = a(i, j);

  // back-accumulate Q from the reflectors
  DenseMatrix q(n, p);
  for (std::size_t j = 0; j < p; ++j) q(j, j) = 1.0;
  for (std::size_t k = p; k-- > 0;) {
    double vnorm_sq = 0.0;
    for (std::size_t i = k; i < n; ++i) vnorm_sq += v(i, k) * v(i, k);
    if (vnorm_sq == 0.0) continue;
    const double beta = 2.0 / vnorm_sq;
    for (std::size_t j = 0; j < p; ++j) {
      double dotv = 0.0;
      for (std::size_t i = k; i < n; ++i) dotv += v(i, k) * q(i, j);
      dotv *= beta;
      for (std::size_t i = k; i < n; ++i) q(i, j) -= dotv * v(i, k);
    }
  }

  // sign convention: diag(R) >= 0
  for (std::size_t j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) {
      for (std::size_t l = j; l < p; ++l) r(j, l) = -r(j, l);
      for (std::size_t i = 0; i < n; ++i) q(i, j) = -q(i, j);
    }
  }

  if (check_rank) {
    for (std::size_t j = 0; j < p; ++j)
      if (std::fabs(r(j, j)) < 1e-12 * mnorm)
        throw NumericalError("thin_qr: numerically rank-deficient input");
  }
  return {std::move(q), std::move(r)};
}

SvdResult small_svd(const DenseMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  if (rows < cols) throw std::invalid_argument("small_svd: need rows >= cols");
  if (cols > 32) throw std::invalid_argument("small_svd: sized for small matrices (cols <= 32)");

  DenseMatrix b = m;
  DenseMatrix v = DenseMatrix::identity(cols);

  // One-sided Jacobi: rotate column pairs until all are mutually orthogonal.
  const int max_sweeps = 60;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      for (std::size_t j = i + 1; j < cols; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < rows; ++k) {
          alpha += b(k, i) * b(k, i);
          beta += b(k, j) * b(k, j);
          gamma += b(k, i) * b(k, j);
        }
        if (std::fabs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        const double tau = (beta - alpha) / (2.0 * gamma);
        const double t = -sign_or_one(tau) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < rows; ++k) {
          const double bi = b(k, i), bj = b(k, j);
          b(k, i) = c * bi + s * bj;
          b(k, j) = -s * bi + c * bj;
        }
        for (std::size_t k = 0; k < cols; ++k) {
          const double vi = v(k, i), vj = v(k, j);
          v(k, i) = c * vi + s * vj;
          v(k, j) = -s * vi + c * vj;
        }
        rotated = true;
      }
    }
    if (!rotated) break;
  }
  if (sweep == max_sweeps) throw NumericalError("small_svd: Jacobi sweeps did not converge");

  std::vector<double> sigma(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < rows; ++k) s += b(k, j) * b(k, j);
    sigma[j] = std::sqrt(s);
  }

  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t c) { return sigma[a] > sigma[c]; });

  SvdResult out;
  out.sigma.resize(cols);
  out.u = DenseMatrix(rows, cols);
  out.v = DenseMatrix(cols, cols);
  const double smax = sigma[order[0]];
  for (std::size_t j = 0; j < cols; ++j) {
    const std::size_t src = order[j];
    out.sigma[j] = sigma[src];
    for (std::size_t k = 0; k < cols; ++k) out.v(k, j) = v(k, src);
    if (sigma[src] > DBL_EPSILON * rows * smax && sigma[src] > 0.0) {
      for (std::size_t k = 0; k < rows; ++k) out.u(k, j) = b(k, src) / sigma[src];
    }
  }
  // complete the basis for (numerically) zero singular values
  for (std::size_t j = 0; j < cols; ++j) {
    double cn = 0.0;
    for (std::size_t k = 0; k < rows; ++k) cn += out.u(k, j) * out.u(k, j);
    if (cn > 0.5) continue;
    double best_norm = -1.0;
    std::vector<double> best;
    for (std::size_t cand = 0; cand < rows; ++cand) {
      std::vector<double> w(rows, 0.0);
      w[cand] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t l = 0; l < cols; ++l) {
          if (l == j) continue;
          double d = 0.0;
          for (std::size_t k = 0; k < rows; ++k) d += out.u(k, l) * w[k];
          for (std::size_t k = 0; k < rows; ++k) w[k] -= d * out.u(k, l);
        }
      double wn = 0.0;
      for (double x : w) wn += x * x;
      if (wn > best_norm) best_norm = wn, best = std::move(w);
      if (best_norm > 0.5) break;
    }
    const double wn = std::sqrt(best_norm);
    for (std::size_t k = 0; k < rows; ++k) out.u(k, j) = best[k] / wn;
  }
  return out;
}

EigResult sym_eig(const SymMatrix& m) {
  const std::size_t n = m.dim();
  DenseMatrix a = m.to_dense();
  DenseMatrix q = DenseMatrix::identity(n);
  std::vector<double> d(n), e(n, 0.0);

  // Householder reduction to tridiagonal form, transformations accumulated in q.
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double sigma = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) sigma += a(i, k) * a(i, k);
    sigma = std::sqrt(sigma);
    if (sigma == 0.0) continue;
    const double alpha = -sign_or_one(a(k + 1, k)) * sigma;

    std::vector<double> v(n, 0.0);
    double vnorm_sq = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      double vi = a(i, k);
      if (i == k + 1) vi -= alpha;
      v[i] = vi;
      vnorm_sq += vi * vi;
    }
    if (vnorm_sq == 0.0) continue;
    const double beta = 2.0 / vnorm_sq;

    // two-sided update of the trailing block: A <- A - v wᵀ - w vᵀ
    std::vector<double> w(n, 0.0);
    double vw = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t l = k + 1; l < n; ++l) s += a(i, l) * v[l];
      w[i] = beta * s;
      vw += v[i] * w[i];
    }
    const double gamma = 0.5 * beta * vw;
    for (std::size_t i = k + 1; i < n; ++i) w[i] -= gamma * v[i];
    for (std::size_t j = k + 1; j < n; ++j)
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= v[i] * w[j] + w[i] * v[j];
    a(k + 1, k) = alpha;
    a(k, k + 1) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = a(k, i) = 0.0;

    // q <- q (I - beta v vᵀ)
    for (std::size_t row = 0; row < n; ++row) {
      double s = 0.0;
      for (std::size_t l = k + 1; l < n; ++l) s += q(row, l) * v[l];
      s *= beta;
      for (std::size_t l = k + 1; l < n; ++l) q(row, l) -= s * v[l];
    }
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = a(i + 1, i);

  // Implicit QL with Wilkinson shifts on the tridiagonal (d, e).
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    while (true) {
      std::size_t mm = l;
      while (mm + 1 < n) {
        const double dd = std::fabs(d[mm]) + std::fabs(d[mm + 1]);
        if (std::fabs(e[mm]) <= DBL_EPSILON * dd) break;
        ++mm;
      }
      if (mm == l) break;
      if (++iter > 50) throw NumericalError("sym_eig: QL iteration cap exceeded");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t ii = mm; ii-- > l;) {
        double f = s * e[ii];
        const double b = c * e[ii];
        r = std::hypot(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          d[ii + 1] -= p;
          e[mm] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[ii + 1] - p;
        r = (d[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        d[ii + 1] = g + p;
        g = c * r - b;
        for (std::size_t krow = 0; krow < n; ++krow) {
          f = q(krow, ii + 1);
          q(krow, ii + 1) = s * q(krow, ii) + c * f;
          q(krow, ii) = c * q(krow, ii) - s * f;
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[mm] = 0.0;
    }
  }

  // sort ascending and fix eigenvector signs (largest-magnitude entry positive)
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  EigResult out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.values[j] = d[src];
    std::size_t imax = 0;
    double vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(q(i, src)) > vmax) {
        vmax = std::fabs(q(i, src));
        imax = i;
      }
    }
    const double flip = q(imax, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = flip * q(i, src);
  }
  return out;
}

SymMatrix solve_lyapunov(const DenseMatrix& b, const SymMatrix& c) {
  const std::size_t p = b.rows();
  if (b.cols() != p) throw std::invalid_argument("solve_lyapunov: B must be square");
  if (c.dim() != p) throw std::invalid_argument("solve_lyapunov: dimension mismatch");

  const double bscale = b.frob_norm();
  double skew = 0.0;
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i) {
      const double d = b(i, j) - b(j, i);
      skew += d * d;
    }
  skew = std::sqrt(skew);

  SymMatrix s(p);
  if (skew <= 1e-12 * std::max(1.0, bscale)) {
    // symmetric B: diagonalize and divide by eigenvalue-pair sums
    EigResult eig = sym_eig(SymMatrix::sym_part(b));
    double dmax = 0.0;
    for (double lam : eig.values) dmax = std::max(dmax, std::fabs(lam));
    DenseMatrix ct = matmul_tn(eig.vectors, matmul(c.to_dense(), eig.vectors));
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < p; ++i) {
        const double denom = eig.values[i] + eig.values[j];
        if (std::fabs(denom) <= 1e-13 * std::max(1.0, 2.0 * dmax))
          throw NumericalError("solve_lyapunov: eigenvalue pair sums to ~0 (singular pencil)");
        ct(i, j) /= denom;
      }
    s = SymMatrix::sym_part(matmul_nt(matmul(eig.vectors, ct), eig.vectors));
  } else {
    // general B: vectorized p²×p² system, vec by columns
    DenseMatrix k(p * p, p * p);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < p; ++i) {
        const std::size_t row = j * p + i;
        for (std::size_t l = 0; l < p; ++l) {
          k(row, j * p + l) += b(i, l);  // (B S)_ij
          k(row, l * p + i) += b(j, l);  // (S Bᵀ)_ij
        }
      }
    std::vector<double> rhs(p * p);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < p; ++i) rhs[j * p + i] = c(i, j);
    std::vector<double> x;
    try {
      x = solve_dense(std::move(k), std::move(rhs));
    } catch (const NumericalError&) {
      throw NumericalError("solve_lyapunov: singular pencil");
    }
    DenseMatrix sd(p, p);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < p; ++i) sd(i, j) = x[j * p + i];
    s = SymMatrix::sym_part(sd);
  }

  DenseMatrix sd = s.to_dense();
  DenseMatrix resid = matmul(b, sd) + matmul_nt(sd, b) - c.to_dense();
  if (resid.frob_norm() > 1e-10 * std::max(DBL_MIN, c.frob_norm()))
    throw NumericalError("solve_lyapunov: residual check failed (ill-conditioned pencil)");
  return s;
}

double psd_lambda_max(const DenseMatrix& gram) {
  const std::size_t q = gram.rows();
  if (gram.cols() != q) throw std::invalid_argument("psd_lambda_max: matrix must be square");
  if (gram.max_abs() == 0.0) return 0.0;

  DenseMatrix v(q, 1);
  const double inv = 1.0 / std::sqrt(static_cast<double>(q));
  for (std::size_t i = 0; i < q; ++i) v(i, 0) = inv;

  double best = 0.0;
  for (int restart = 0; restart < 2; ++restart) {
    double lam_prev = 0.0;
    bool converged = false;
    for (int it = 0; it < 1000; ++it) {
      DenseMatrix w = matmul(gram, v);
      const double lam = dot(v, w);
      best = std::max(best, lam);
      const double nw = w.frob_norm();
      if (nw == 0.0) break;  // start vector in the kernel, try a restart
      w *= 1.0 / nw;
      v = std::move(w);
      if (it > 0 && std::fabs(lam - lam_prev) <= 1e-10 * std::max(std::fabs(lam), DBL_MIN)) {
        converged = true;
        break;
      }
      lam_prev = lam;
    }
    if (converged) break;
    Rng rng(0x5eedbeefULL);  // deterministic restart direction
    double nv = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      v(i, 0) = rng.next_normal();
      nv += v(i, 0) * v(i, 0);
    }
    v *= 1.0 / std::sqrt(nv);
  }
  return best;
}

double spectral_norm_sq(const DenseMatrix& a) {
  if (a.max_abs() == 0.0) return 0.0;
  DenseMatrix gram = a.rows() <= a.cols() ? matmul_nt(a, a) : matmul_tn(a, a);
  return psd_lambda_max(gram);
}

std::vector<double> solve_dense(DenseMatrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n)
    throw std::invalid_argument("solve_dense: dimension mismatch");
  const double scale = a.max_abs();

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double pval = std::fabs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(a(i, k)) > pval) pval = std::fabs(a(i, k)), piv = i;
    if (pval <= 1e-14 * std::max(1.0, scale))
      throw NumericalError("solve_dense: matrix is numerically singular");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    const double inv_piv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) * inv_piv;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * b[j];
    b[i] = s / a(i, i);
  }
  return b;
}

}  // namespace manpg

#include "manpg/spca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "manpg/errors.hpp"
#include "manpg/linalg.hpp"
#include "manpg/rng.hpp"
#include "manpg/sym_matrix.hpp"

namespace manpg {

DiagonalWeight::DiagonalWeight(DenseMatrix entries, double tau)
    : w_(std::move(entries)), tau_(tau) {
  if (tau <= 0.0) throw std::invalid_argument("DiagonalWeight: tau must be positive");
  if (!w_.all_finite()) throw NumericalError("DiagonalWeight: non-finite entries");
  for (std::size_t k = 0; k < w_.size(); ++k)
    if (w_.data()[k] < tau) throw NumericalError("DiagonalWeight: entry below the floor tau");
}

DiagonalWeight DiagonalWeight::identity(std::size_t n, std::size_t p) {
  DenseMatrix w(n, p);
  for (std::size_t k = 0; k < w.size(); ++k) w.data()[k] = 1.0;
  return DiagonalWeight(std::move(w), 1.0);
}

double DiagonalWeight::wnorm_sq(const DenseMatrix& eta) const {
  if (eta.rows() != w_.rows() || eta.cols() != w_.cols())
    throw std::invalid_argument("DiagonalWeight: shape mismatch");
  double s = 0.0;
  const double* w = w_.data();
  const double* e = eta.data();
  for (std::size_t k = 0; k < w_.size(); ++k) s += w[k] * e[k] * e[k];
  return s;
}

struct SpcaProblem::Data {
  DenseMatrix a;
  std::vector<double> diag_ata;
  double spec_sq = 0.0;
  EigResult gram_eig;   // of the smaller Gram matrix
  bool gram_is_rows = false;  // true: AAᵀ (m×m), false: AᵀA (n×n)
};

SpcaProblem::SpcaProblem(DenseMatrix a, double lambda) : lambda_(lambda) {
  if (lambda < 0.0) throw std::invalid_argument("SpcaProblem: lambda must be >= 0");
  if (!a.all_finite()) throw NumericalError("SpcaProblem: non-finite data");

  auto d = std::make_shared<Data>();
  const std::size_t m = a.rows(), n = a.cols();
  d->diag_ata.resize(n);
  double max_diag = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += a(i, j) * a(i, j);
    d->diag_ata[j] = s;
    max_diag = std::max(max_diag, s);
  }

  d->gram_is_rows = m <= n;
  DenseMatrix gram = d->gram_is_rows ? matmul_nt(a, a) : matmul_tn(a, a);
  // clamp against power-iteration truncation: ‖A‖₂² >= max_i ‖a_i‖²
  d->spec_sq = std::max(psd_lambda_max(gram), max_diag);
  d->gram_eig = sym_eig(SymMatrix::sym_part(gram));
  d->a = std::move(a);
  d_ = std::move(d);
}

SpcaProblem SpcaProblem::with_lambda(double lambda) const {
  SpcaProblem copy = *this;
  if (lambda < 0.0) throw std::invalid_argument("SpcaProblem: lambda must be >= 0");
  copy.lambda_ = lambda;
  return copy;
}

std::size_t SpcaProblem::m() const { return d_->a.rows(); }
std::size_t SpcaProblem::n() const { return d_->a.cols(); }
const DenseMatrix& SpcaProblem::data() const { return d_->a; }
const std::vector<double>& SpcaProblem::diag_ata() const { return d_->diag_ata; }
double SpcaProblem::spec_sq() const { return d_->spec_sq; }

double SpcaProblem::top_singular_sq_sum(std::size_t p) const {
  const auto& vals = d_->gram_eig.values;
  if (p > vals.size())
    throw std::invalid_argument("top_singular_sq_sum: p exceeds min(m, n)");
  double s = 0.0;
  for (std::size_t k = 0; k < p; ++k) s += std::max(0.0, vals[vals.size() - 1 - k]);
  return s;
}

DenseMatrix SpcaProblem::right_singular_vectors(std::size_t p) const {
  const auto& eig = d_->gram_eig;
  const std::size_t q = eig.values.size();
  if (p > q) throw std::invalid_argument("right_singular_vectors: p exceeds min(m, n)");

  DenseMatrix v(n(), p);
  if (d_->gram_is_rows) {
    // columns of eig are left singular vectors; map through Aᵀ u / σ
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t src = q - 1 - j;
      const double lam = eig.values[src];
      if (lam <= 1e-14 * std::max(1.0, eig.values.back()))
        throw NumericalError("right_singular_vectors: rank below p");
      const double inv_sigma = 1.0 / std::sqrt(lam);
      for (std::size_t col = 0; col < n(); ++col) {
        double s = 0.0;
        for (std::size_t row = 0; row < m(); ++row) s += d_->a(row, col) * eig.vectors(row, src);
        v(col, j) = s * inv_sigma;
      }
    }
  } else {
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t src = q - 1 - j;
      for (std::size_t i = 0; i < n(); ++i) v(i, j) = eig.vectors(i, src);
    }
  }
  return v;
}

double eval_f(const SpcaProblem& prob, const StiefelPoint& x) {
  if (x.n() != prob.n()) throw std::invalid_argument("eval_f: shape mismatch");
  DenseMatrix ax = matmul(prob.data(), x.mat());
  return -dot(ax, ax);
}

double eval_g(const SpcaProblem& prob, const DenseMatrix& x) {
  return prob.lambda() * x.abs_sum();
}

double eval_objective(const SpcaProblem& prob, const StiefelPoint& x) {
  return eval_f(prob, x) + eval_g(prob, x.mat());
}

TangentVector riem_grad_f(const SpcaProblem& prob, const StiefelPoint& x) {
  if (x.n() != prob.n()) throw std::invalid_argument("riem_grad_f: shape mismatch");
  return riem_grad_f(prob, x, matmul(prob.data(), x.mat()));
}

TangentVector riem_grad_f(const SpcaProblem& prob, const StiefelPoint& x,
                          const DenseMatrix& scores) {
  if (scores.rows() != prob.m() || scores.cols() != x.p())
    throw std::invalid_argument("riem_grad_f: score matrix shape mismatch");
  DenseMatrix g = matmul_tn(prob.data(), scores);
  g *= -2.0;
  return project_tangent(x, g);
}

double lipschitz_bound(const SpcaProblem& prob) { return 2.0 * prob.spec_sq(); }

DiagonalWeight diag_weight(const SpcaProblem& prob, const StiefelPoint& x, double tau) {
  return diag_weight(prob, x, tau, matmul(prob.data(), x.mat()));
}

DiagonalWeight diag_weight(const SpcaProblem& prob, const StiefelPoint& x, double tau,
                           const DenseMatrix& scores) {
  if (tau <= 0.0) throw std::invalid_argument("diag_weight: tau must be positive");
  if (scores.rows() != prob.m() || scores.cols() != x.p())
    throw std::invalid_argument("diag_weight: score matrix shape mismatch");
  const std::size_t n = x.n(), p = x.p();
  std::vector<double> col_sq(p);
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < scores.rows(); ++i) s += scores(i, j) * scores(i, j);
    col_sq[j] = s;
  }
  DenseMatrix w(n, p);
  const auto& diag = prob.diag_ata();
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i)
      w(i, j) = std::max(-2.0 * (diag[i] - col_sq[j]), tau);
  return DiagonalWeight(std::move(w), tau);
}

double sparsity(const DenseMatrix& x, double thresh) {
  if (thresh <= 0.0) throw std::invalid_argument("sparsity: threshold must be positive");
  std::size_t count = 0;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (std::fabs(x.data()[k]) < thresh) ++count;
  return static_cast<double>(count) / static_cast<double>(x.size());
}

double adjusted_variance(const SpcaProblem& prob, const StiefelPoint& x) {
  DenseMatrix ax = matmul(prob.data(), x.mat());
  if (ax.rows() < ax.cols())
    throw std::invalid_argument("adjusted_variance: need at least p samples");
  // rank-deficient score columns contribute R_jj ~ 0 on their own
  QrResult qr = thin_qr(ax, /*check_rank=*/false);
  double num = 0.0;
  for (std::size_t j = 0; j < qr.r.cols(); ++j) num += qr.r(j, j) * qr.r(j, j);
  const double den = prob.top_singular_sq_sum(x.p());
  if (den <= 0.0) return 0.0;
  return std::clamp(num / den, 0.0, 1.0);
}

DenseMatrix gen_random_data(std::size_t m, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return normalize_columns(rng.normal_matrix(m, n), /*center=*/true);
}

DenseMatrix synthetic_base_matrix(std::size_t m, std::size_t n) {
  if (m % 5 != 0 || m == 0) throw std::invalid_argument("synthetic data: m must be a multiple of 5");
  if (n < 20) throw std::invalid_argument("synthetic data: need n >= 20");
  const std::size_t support = n / 20;
  const std::size_t stride = n / 10;
  DenseMatrix base(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t comp = i % 5;
    for (std::size_t j = comp * stride; j < comp * stride + support; ++j) base(i, j) = 1.0;
  }
  return base;
}

DenseMatrix gen_synthetic_data(std::size_t m, std::size_t n, std::uint64_t seed) {
  DenseMatrix a = synthetic_base_matrix(m, n);
  Rng rng(seed);
  a += rng.normal_matrix(m, n, /*sigma=*/0.5);
  return normalize_columns(a, /*center=*/false);
}

DenseMatrix normalize_columns(const DenseMatrix& m, bool center) {
  DenseMatrix out = m;
  const std::size_t rows = m.rows();
  const double inv_rows = 1.0 / static_cast<double>(rows);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < rows; ++i) mean += out(i, j);
    mean *= inv_rows;
    double var = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double d = out(i, j) - mean;
      var += d * d;
    }
    var *= inv_rows;
    if (var <= 0.0)
      throw NumericalError("normalize_columns: zero-variance column " + std::to_string(j));
    const double inv_std = 1.0 / std::sqrt(var);
    if (center) {
      for (std::size_t i = 0; i < rows; ++i) out(i, j) = (out(i, j) - mean) * inv_std;
    } else {
      for (std::size_t i = 0; i < rows; ++i) out(i, j) *= inv_std;
    }
  }
  return out;
}

}  // namespace manpg

#include "manpg/stiefel.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "manpg/errors.hpp"
#include "manpg/linalg.hpp"
#include "manpg/rng.hpp"
#include "manpg/sym_matrix.hpp"

namespace manpg {

namespace {

constexpr double kPointTol = 1e-10;
constexpr double kTangentTol = 1e-8;

DenseMatrix polar_factor(const DenseMatrix& z) {
  QrResult qr = thin_qr(z);
  SvdResult svd = small_svd(qr.r);
  return matmul(qr.q, matmul_nt(svd.u, svd.v));
}

}  // namespace

StiefelPoint::StiefelPoint(DenseMatrix x) {
  if (x.rows() < x.cols() || x.cols() < 1)
    throw std::invalid_argument("StiefelPoint: need n >= p >= 1");
  if (!x.all_finite()) throw NumericalError("StiefelPoint: non-finite entries");
  if (orthonormality_residual(x) > kPointTol)
    throw NumericalError("StiefelPoint: columns are not orthonormal");
  m_ = std::make_shared<const DenseMatrix>(std::move(x));
}

double StiefelPoint::orthonormality_residual(const DenseMatrix& x) {
  DenseMatrix g = matmul_tn(x, x);
  g -= DenseMatrix::identity(x.cols());
  return g.frob_norm();
}

TangentVector::TangentVector(const StiefelPoint& base, DenseMatrix v)
    : base_(base.shared_mat()), v_(std::move(v)) {
  if (v_.rows() != base.n() || v_.cols() != base.p())
    throw std::invalid_argument("TangentVector: shape mismatch with base point");
  if (!v_.all_finite()) throw NumericalError("TangentVector: non-finite entries");
  const double res = tangency_residual(*base_, v_);
  if (res > kTangentTol * std::max(1.0, v_.frob_norm()))
    throw NumericalError("TangentVector: tangency residual too large");
}

TangentVector::TangentVector(std::shared_ptr<const DenseMatrix> base, DenseMatrix v, bool)
    : base_(std::move(base)), v_(std::move(v)) {}

double TangentVector::tangency_residual(const DenseMatrix& x, const DenseMatrix& v) {
  DenseMatrix g = matmul_tn(x, v);
  return (g + g.transposed()).frob_norm();
}

TangentVector TangentVector::scaled(double s) const {
  DenseMatrix v = v_;
  v *= s;
  return TangentVector(base_, std::move(v), true);
}

bool TangentVector::based_at(const StiefelPoint& x) const {
  if (base_ == x.shared_mat()) return true;
  if (base_->rows() != x.n() || base_->cols() != x.p()) return false;
  return (*base_ - x.mat()).frob_norm() <= 1e-12 * std::sqrt(static_cast<double>(x.p()));
}

TangentVector project_tangent(const StiefelPoint& x, const DenseMatrix& xi) {
  if (xi.rows() != x.n() || xi.cols() != x.p())
    throw std::invalid_argument("project_tangent: shape mismatch");
  SymMatrix s = SymMatrix::sym_part(matmul_tn(x.mat(), xi));
  return TangentVector(x, xi - matmul(x.mat(), s.to_dense()));
}

StiefelPoint retract(const StiefelPoint& x, const TangentVector& eta) {
  if (!eta.based_at(x)) throw std::invalid_argument("retract: tangent vector has a different base");
  return StiefelPoint(polar_factor(x.mat() + eta.mat()));
}

TangentVector inverse_retract(const StiefelPoint& x, const StiefelPoint& y) {
  if (x.n() != y.n() || x.p() != y.p())
    throw std::invalid_argument("inverse_retract: shape mismatch");
  const std::size_t p = x.p();
  DenseMatrix b = matmul_tn(x.mat(), y.mat());

  EigResult sym_spec = sym_eig(SymMatrix::sym_part(b));
  if (sym_spec.values.front() <= 1e-12 * std::max(1.0, sym_spec.values.back()))
    throw NumericalError("inverse_retract: XᵀY has no positive-definite symmetric part");

  SymMatrix s = solve_lyapunov(b, SymMatrix::scaled_identity(p, 2.0));
  EigResult s_spec = sym_eig(s);
  if (s_spec.values.front() <= 0.0)
    throw NumericalError("inverse_retract: scaling factor is not positive definite");

  return TangentVector(x, matmul(y.mat(), s.to_dense()) - x.mat());
}

StiefelPoint random_point(std::size_t n, std::size_t p, std::uint64_t seed) {
  if (n < p || p < 1) throw std::invalid_argument("random_point: need n >= p >= 1");
  Rng rng(seed);
  return StiefelPoint(thin_qr(rng.normal_matrix(n, p)).q);
}

StiefelPoint ensure_on_manifold(DenseMatrix x) {
  if (StiefelPoint::orthonormality_residual(x) <= kPointTol) return StiefelPoint(std::move(x));
  return StiefelPoint(polar_factor(x));
}

}  // namespace manpg

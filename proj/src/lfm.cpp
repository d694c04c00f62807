#include "ballop/lfm.hpp"

#include <cmath>
#include <limits>

#include "ballop/error.hpp"

namespace ballop {

LinearFractionalMap::LinearFractionalMap(CMatrix A, CVector B, CVector C, Complex d)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), d_(d) {
  const auto n = B_.size();
  require(n >= 1, ErrorKind::InvalidArgument, "map dimension must be >= 1");
  require(A_.rows() == n && A_.cols() == n && C_.size() == n, ErrorKind::ShapeMismatch,
          "A, B, C dimensions disagree");
  require(C_.norm() < std::abs(d_), ErrorKind::OutOfDomain,
          "denominator may vanish on the closed ball (need ||C|| < |d|)");
  const Complex scale = 1.0 / d_;
  A_ *= scale;
  B_ *= scale;
  C_ *= std::conj(scale);  // the C^H row scales by `scale`
  d_ = 1.0;
}

LinearFractionalMap LinearFractionalMap::from_associated(const CMatrix& m) {
  require(m.rows() == m.cols() && m.rows() >= 2, ErrorKind::ShapeMismatch,
          "associated matrix must be square of size n+1 >= 2");
  const auto n = m.rows() - 1;
  return LinearFractionalMap(m.topLeftCorner(n, n), m.topRightCorner(n, 1),
                             m.bottomLeftCorner(1, n).adjoint(), m(n, n));
}

LinearFractionalMap LinearFractionalMap::identity(int n) {
  return LinearFractionalMap(CMatrix::Identity(n, n), CVector::Zero(n), CVector::Zero(n), 1.0);
}

CMatrix LinearFractionalMap::associated_matrix() const {
  const auto n = B_.size();
  CMatrix m(n + 1, n + 1);
  m.topLeftCorner(n, n) = A_;
  m.topRightCorner(n, 1) = B_;
  m.bottomLeftCorner(1, n) = C_.adjoint();
  m(n, n) = d_;
  return m;
}

bool LinearFractionalMap::is_linear(double tol) const {
  return B_.cwiseAbs().maxCoeff() <= tol && C_.cwiseAbs().maxCoeff() <= tol;
}

LinearFractionalMap mobius(const CVector& a) {
  const auto n = a.size();
  require(n >= 1, ErrorKind::InvalidArgument, "mobius: empty parameter");
  const double norm_sq = a.squaredNorm();
  require(norm_sq < 1.0, ErrorKind::OutOfDomain, "mobius: parameter must satisfy |a| < 1");
  if (norm_sq == 0.0) {
    return LinearFractionalMap(-CMatrix::Identity(n, n), CVector::Zero(n), CVector::Zero(n), 1.0);
  }
  const double s_a = std::sqrt(1.0 - norm_sq);
  const CMatrix P = a * a.adjoint() / norm_sq;
  const CMatrix Q = CMatrix::Identity(n, n) - P;
  return LinearFractionalMap(-(P + s_a * Q), a, -a, 1.0);
}

CVector mobius_apply_expanded(const CVector& a, const CVector& z) {
  require(a.size() == z.size(), ErrorKind::ShapeMismatch, "mobius: point dimension mismatch");
  const double norm_sq = a.squaredNorm();
  require(norm_sq < 1.0, ErrorKind::OutOfDomain, "mobius: parameter must satisfy |a| < 1");
  if (norm_sq == 0.0) return -z;
  const double s_a = std::sqrt(1.0 - norm_sq);
  const Complex za = hermitian_pairing(z, a);
  const Complex t = za / norm_sq;
  const Complex denom = 1.0 - za;
  require(denom != Complex(0.0), ErrorKind::SingularPoint, "mobius: vanishing denominator");
  CVector out(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    out[j] = ((1.0 - t + s_a * t) * a[j] - s_a * z[j]) / denom;
  }
  return out;
}

LinearFractionalMap linear_map(const CMatrix& V) {
  require(V.rows() == V.cols() && V.rows() >= 1, ErrorKind::ShapeMismatch, "V must be square");
  require(spectral_norm(V) <= 1.0 + 1e-12, ErrorKind::NotASelfMap, "linear symbol needs ||V|| <= 1");
  const auto n = V.rows();
  return LinearFractionalMap(V, CVector::Zero(n), CVector::Zero(n), 1.0);
}

CVector apply(const LinearFractionalMap& psi, const CVector& z) {
  require(z.size() == psi.dim(), ErrorKind::ShapeMismatch, "apply: point dimension mismatch");
  const Complex denom = hermitian_pairing(z, psi.C()) + psi.d();
  require(denom != Complex(0.0), ErrorKind::SingularPoint, "apply: vanishing denominator");
  return (psi.A() * z + psi.B()) / denom;
}

LinearFractionalMap compose(const LinearFractionalMap& psi, const LinearFractionalMap& chi) {
  require(psi.dim() == chi.dim(), ErrorKind::ShapeMismatch, "compose: dimension mismatch");
  return LinearFractionalMap::from_associated(psi.associated_matrix() * chi.associated_matrix());
}

double involution_defect(const LinearFractionalMap& psi) {
  const CMatrix m = psi.associated_matrix();
  const CMatrix sq = m * m;
  const Complex lambda = sq.trace() / static_cast<double>(sq.rows());
  if (std::abs(lambda) <= std::numeric_limits<double>::min()) return std::numeric_limits<double>::infinity();
  return (sq / lambda - CMatrix::Identity(sq.rows(), sq.cols())).cwiseAbs().maxCoeff();
}

bool is_involution(const LinearFractionalMap& psi, double tol) { return involution_defect(psi) <= tol; }

TruncatedSeries component_series(const LinearFractionalMap& psi, int j, int D) {
  const int n = psi.dim();
  require(j >= 0 && j < n, ErrorKind::OutOfRange, "component index out of range");
  require(psi.C().norm() < std::abs(psi.d()), ErrorKind::OutOfDomain, "denominator condition violated");
  TruncatedSeries numerator = TruncatedSeries::constant(n, D, psi.B()[j]);
  if (D >= 1) {
    CVector c = numerator.coeffs();
    for (int k = 0; k < n; ++k) c[1 + k] = psi.A()(j, k);
    numerator = TruncatedSeries(numerator.basis_ptr(), std::move(c));
  }
  return series_mul(numerator, reciprocal_affine(psi.d(), psi.C(), D));
}

}  // namespace ballop

#include "ballop/symmetry.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "ballop/error.hpp"

namespace ballop {

namespace {

double identity_defect(const CMatrix& m) {
  return spectral_norm(m - CMatrix::Identity(m.rows(), m.cols()));
}

bool is_real(const CVector& v) { return v.size() == 0 || v.imag().cwiseAbs().maxCoeff() == 0.0; }

CMatrix phase_diagonal(const SpaceSpec& space, const RVector& theta) {
  require(theta.size() == space.dim(), ErrorKind::ShapeMismatch, "Theta dimension mismatch");
  const Basis& basis = space.basis();
  CVector diag(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double phase = 0.0;
    for (int j = 0; j < space.dim(); ++j) phase += theta[j] * basis[i][j];
    diag[static_cast<Eigen::Index>(i)] = std::polar(1.0, phase);
  }
  return diag.asDiagonal();
}

}  // namespace

std::string_view to_string(Exactness e) {
  return e == Exactness::ExactAtD ? "exact" : "convergent";
}

int default_probe_degree(int D) { return std::max(1, D / 4); }

AntilinearOperator conjugation_J(const SpaceSpec& space) {
  const auto N = static_cast<Eigen::Index>(space.size());
  return {space, CMatrix::Identity(N, N)};
}

OperatorMatrix unitary_part_Wa(const SpaceSpec& space, const CVector& a) {
  return polar_unitary(composition_matrix(space, mobius(a)), -1.0);
}

AntilinearOperator conjugation_Ja_real(const SpaceSpec& space, const CVector& a) {
  require(is_real(a), ErrorKind::WrongVariant, "conjugation_Ja_real needs a real parameter; use conjugation_Ja");
  const OperatorMatrix W = unitary_part_Wa(space, a);
  return {space, W.M.conjugate()};
}

OperatorMatrix u_theta(const SpaceSpec& space, const RVector& theta) {
  return {space, phase_diagonal(space, theta)};
}

Realignment realign_theta(const CVector& a) {
  require(a.squaredNorm() < 1.0, ErrorKind::OutOfDomain, "realign_theta: parameter must satisfy |a| < 1");
  Realignment r{RVector::Zero(a.size()), RVector::Zero(a.size())};
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a[j] != Complex(0.0)) r.theta[j] = -std::arg(a[j]);
    r.a_tilde[j] = std::abs(a[j]);
  }
  return r;
}

AntilinearOperator conjugation_Ja(const SpaceSpec& space, const CVector& a, const RVector& theta) {
  require(theta.size() == a.size(), ErrorKind::ShapeMismatch, "Theta dimension mismatch");
  CVector rotated(a.size());
  for (Eigen::Index j = 0; j < a.size(); ++j) rotated[j] = std::polar(1.0, theta[j]) * a[j];
  require(rotated.imag().cwiseAbs().maxCoeff() <= 1e-14, ErrorKind::InvalidArgument,
          "Theta does not rotate a onto a real vector");
  const CVector a_tilde = rotated.real().cast<Complex>();
  const AntilinearOperator inner = conjugation_Ja_real(space, a_tilde);
  const CMatrix U = phase_diagonal(space, theta);
  return {space, U * inner.M * U.transpose()};
}

AntilinearOperator conjugation_Ja(const SpaceSpec& space, const CVector& a) {
  if (is_real(a)) return conjugation_Ja_real(space, a);
  return conjugation_Ja(space, a, realign_theta(a).theta);
}

CMatrix takagi(const CMatrix& K, double tol) {
  require(K.rows() == K.cols() && K.rows() >= 1, ErrorKind::InvalidArgument, "takagi: K must be square");
  require(identity_defect(K.adjoint() * K) <= tol, ErrorKind::InvalidArgument, "takagi: K is not unitary");
  require(spectral_norm(K - K.transpose()) <= tol, ErrorKind::InvalidArgument, "takagi: K is not symmetric");

  const auto n = K.rows();
  const RMatrix X = K.real();
  const RMatrix Y = K.imag();
  // Re(e^{-it} K) has eigenvalues cos(phi_j - t); a few angles avoid the
  // accidental collisions at t = (phi_j + phi_k) / 2.
  constexpr std::array<double, 5> angles{0.31, 1.23, 2.07, 2.89, 4.41};
  RMatrix best_q;
  double best_off = std::numeric_limits<double>::infinity();
  for (double t : angles) {
    const RMatrix S = std::cos(t) * X + std::sin(t) * Y;
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(0.5 * (S + S.transpose()));
    const RMatrix& Q = eig.eigenvectors();
    CMatrix d = Q.transpose().cast<Complex>() * K * Q.cast<Complex>();
    d.diagonal().setZero();
    const double off = d.cwiseAbs().maxCoeff();
    if (off < best_off) {
      best_off = off;
      best_q = Q;
    }
    if (off <= tol) break;
  }
  const CMatrix Qc = best_q.cast<Complex>();
  const CMatrix d = Qc.transpose() * K * Qc;
  CVector half(n);
  for (Eigen::Index j = 0; j < n; ++j) half[j] = std::polar(1.0, 0.5 * std::arg(d(j, j)));
  CMatrix U = Qc * half.asDiagonal();
  require(spectral_norm(K - U * U.transpose()) < 10.0 * std::max(tol, 1e-13), ErrorKind::InvalidArgument,
          "takagi: joint diagonalization failed");
  return U;
}

CMatrix find_conjugation_2x2(const CMatrix& V) {
  require(V.rows() == 2 && V.cols() == 2, ErrorKind::InvalidArgument, "find_conjugation_2x2 needs a 2x2 matrix");
  const Complex half_trace = 0.5 * V.trace();
  const CMatrix B = V - half_trace * CMatrix::Identity(2, 2);
  // B = x sigma_x + y sigma_y + z sigma_z with complex (x, y, z) = p + i q.
  const Complex x = 0.5 * (B(0, 1) + B(1, 0));
  const Complex y = (B(1, 0) - B(0, 1)) / Complex(0.0, 2.0);
  const Complex z = B(0, 0);
  const Eigen::Vector3d p(x.real(), y.real(), z.real());
  const Eigen::Vector3d q(x.imag(), y.imag(), z.imag());

  // Unitary conjugation rotates (x, y, z) by some R in SO(3); the sigma_y
  // component of U^H B U vanishes when R e_y is orthogonal to p and q.
  Eigen::Vector3d m = p.cross(q);
  if (m.norm() <= 1e-14 * std::max(1.0, p.norm() * q.norm())) {
    const Eigen::Vector3d v = p.norm() >= q.norm() ? p : q;
    if (v.norm() <= 1e-300) return CMatrix::Identity(2, 2);
    m = v.unitOrthogonal();
  }
  m.normalize();

  // U maps the eigenbasis of sigma_y onto that of m.sigma, so U^H (m.sigma) U = sigma_y.
  CMatrix m_sigma(2, 2);
  m_sigma << Complex(m.z(), 0.0), Complex(m.x(), -m.y()), Complex(m.x(), m.y()), Complex(-m.z(), 0.0);
  CMatrix sigma_y(2, 2);
  sigma_y << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> em(m_sigma);
  Eigen::SelfAdjointEigenSolver<CMatrix> ey(sigma_y);
  const CMatrix U = em.eigenvectors() * ey.eigenvectors().adjoint();

  const CMatrix S = U.adjoint() * V * U;
  require(spectral_norm(S - S.transpose()) <= 1e-10 * std::max(1.0, spectral_norm(V)),
          ErrorKind::InvalidArgument, "find_conjugation_2x2: symmetrization failed");
  return U * U.transpose();
}

bool ConjugationCertificate::passed() const {
  for (const auto& r : residuals) {
    if (!r.pass()) return false;
  }
  return true;
}

const Residual& ConjugationCertificate::residual(std::string_view name) const {
  for (const auto& r : residuals) {
    if (r.name == name) return r;
  }
  throw Error(ErrorKind::InvalidArgument, "certificate has no residual named " + std::string(name));
}

ConjugationCertificate jv_pipeline(const SpaceSpec& space, const CMatrix& V, const CMatrix& K,
                                   const PipelineOptions& opts) {
  const auto n = space.dim();
  require(V.rows() == n && V.cols() == n && K.rows() == n && K.cols() == n, ErrorKind::ShapeMismatch,
          "jv_pipeline: V and K must be n x n");
  const OperatorMatrix CV = composition_matrix(space, linear_map(V));

  require(identity_defect(K.adjoint() * K) <= opts.precondition_tol, ErrorKind::InvalidArgument,
          "jv_pipeline: K is not unitary");
  require(spectral_norm(K - K.transpose()) <= opts.precondition_tol, ErrorKind::InvalidArgument,
          "jv_pipeline: K is not symmetric");
  const double conj_defect = spectral_norm(K * V.transpose() * K.conjugate() - V);
  require(conj_defect <= opts.precondition_tol * std::max(1.0, spectral_norm(V)), ErrorKind::InvalidArgument,
          "jv_pipeline: K is not a conjugation for V (K V^T conj(K) != V, defect " + std::to_string(conj_defect) +
              ")");

  const CMatrix U = takagi(K, opts.precondition_tol);
  const CMatrix S = U.adjoint() * V * U;

  const CMatrix CU = composition_matrix(space, linear_map(U)).M;
  const CMatrix CUh = composition_matrix(space, linear_map(U.adjoint())).M;
  AntilinearOperator JV{space, CUh * CU.conjugate()};

  ConjugationCertificate cert{
      .symbol_kind = "linear", .space = space, .a = CVector(), .V = V, .candidate = JV};
  cert.probe_degree = space.cutoff();
  const auto E = Exactness::ExactAtD;
  cert.residuals = {
      {"factorization", spectral_norm(K - U * U.transpose()), E, 10.0 * opts.precondition_tol},
      {"symmetrization", spectral_norm(S - S.transpose()), E, opts.symmetrize_tol},
      {"isometry", identity_defect(JV.M.adjoint() * JV.M), E, opts.residual_tol},
      {"involution", identity_defect(JV.M * JV.M.conjugate()), E, opts.residual_tol},
      {"symmetry", csym_residual(CV, JV), E, opts.residual_tol},
  };
  cert.diagnostics["conjugation_defect"] = conj_defect;
  cert.diagnostics["normality"] = normality_residual(CV);
  return cert;
}

ConjugationCertificate certify(const SpaceSpec& space, const CVector& a, const CertifyOptions& opts) {
  require(a.size() == space.dim(), ErrorKind::ShapeMismatch, "certify: parameter dimension mismatch");
  require(a.squaredNorm() < 1.0, ErrorKind::OutOfDomain, "certify: parameter must satisfy |a| < 1");
  const int probe = opts.probe_degree < 0 ? default_probe_degree(space.cutoff()) : opts.probe_degree;

  const OperatorMatrix T = composition_matrix(space, mobius(a));
  // No invertibility guard: at large D the smallest singular value underflows
  // to zero while the SVD unitary factor stays well defined; sigma_min is reported.
  const PolarDecomposition polar = polar_decomposition(T.M, -1.0);
  const AntilinearOperator Ja = conjugation_Ja(space, a);
  const CMatrix& W = polar.unitary;
  const CMatrix& M = Ja.M;
  const double t_norm = polar.sigma_max;

  auto probe_norm = [&](const CMatrix& X) { return spectral_norm(leading_block(space, X, probe)); };
  const auto N = static_cast<Eigen::Index>(space.size());
  const CMatrix I = CMatrix::Identity(N, N);

  ConjugationCertificate cert{
      .symbol_kind = "mobius", .space = space, .a = a, .V = CMatrix(), .candidate = Ja};
  cert.probe_degree = probe;
  cert.residuals = {
      {"isometry", identity_defect(M.adjoint() * M), Exactness::ExactAtD, opts.isometry_tol},
      {"involution", probe_norm(M * M.conjugate() - I), Exactness::Convergent, opts.involution_tol},
      {"symmetry", csym_residual(T, Ja), Exactness::ExactAtD, opts.symmetry_tol},
  };

  auto& diag = cert.diagnostics;
  diag["sigma_min"] = polar.sigma_min;
  diag["op_norm"] = t_norm;
  diag["involution_full"] = identity_defect(M * M.conjugate());
  diag["w_involution_probe"] = probe_norm(W * W - I);
  diag["w_selfadjoint_probe"] = probe_norm(W - W.adjoint());
  diag["abs_inverse_probe"] = probe_norm(polar.positive * polar.positive_adjoint - I);
  diag["chase_probe"] = probe_norm(T.M.adjoint() * M - M * T.M.conjugate()) / t_norm;
  diag["normality"] = normality_residual(T);
  if (!is_real(a)) {
    // Realigned counterpart and the direct candidate J o W_a.
    const Realignment r = realign_theta(a);
    const CVector a_tilde = r.a_tilde.cast<Complex>();
    const double realigned = csym_residual(composition_matrix(space, mobius(a_tilde)),
                                           conjugation_Ja_real(space, a_tilde));
    diag["realigned_symmetry"] = realigned;
    diag["direct_candidate_gap"] = spectral_norm(M - W.conjugate());
    diag["direct_candidate_symmetry"] = csym_residual(T, AntilinearOperator{space, W.conjugate()});
  }
  return cert;
}

}  // namespace ballop

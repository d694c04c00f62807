#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ballop/opmatrix.hpp"

namespace ballop {

/// (Jf)(z) = conj(f(conj z)). In the orthonormal monomial basis J simply
/// conjugates coefficients, so its antilinear matrix is the identity.
AntilinearOperator conjugation_J(const SpaceSpec& space);

/// Unitary factor of the polar decomposition of the truncated C_{phi_a}.
///
/// Truncations of C_{phi_a} lose rank geometrically in D (the smallest
/// singular value reaches rounding level near D = 32 for |a| = 0.6), so no
/// invertibility guard is applied here; the singular directions sit in the
/// top-degree corner and the low-degree block of W is unaffected. The
/// smallest singular value is reported by certify().
OperatorMatrix unitary_part_Wa(const SpaceSpec& space, const CVector& a);

/// J o W_a for real a. The truncated C_{phi_a} is real, so M = conj(W_a) = W_a.
/// Throws WrongVariant when a has a nonzero imaginary part.
AntilinearOperator conjugation_Ja_real(const SpaceSpec& space, const CVector& a);

/// (U_Theta f)(z) = f(e^{i theta_1} z_1, ..., e^{i theta_n} z_n): diagonal
/// with entry e^{i Theta.alpha}.
OperatorMatrix u_theta(const SpaceSpec& space, const RVector& theta);

struct Realignment {
  RVector theta;
  RVector a_tilde;
};

/// theta_j = -arg(a_j) (0 when a_j = 0), so that a~_j = e^{i theta_j} a_j = |a_j|.
Realignment realign_theta(const CVector& a);

/// U_Theta J_{a~} U_Theta^*, with antilinear matrix U_Theta M_{a~} U_Theta^T.
AntilinearOperator conjugation_Ja(const SpaceSpec& space, const CVector& a);

/// Same construction with a caller-chosen Theta; e^{i theta_j} a_j must be real.
AntilinearOperator conjugation_Ja(const SpaceSpec& space, const CVector& a, const RVector& theta);

/// Factor a unitary symmetric K as U U^T with U unitary. Works by jointly
/// diagonalizing the commuting real symmetric matrices Re K and Im K with a
/// real orthogonal Q, so Q^T K Q = diag(e^{i phi}) and U = Q diag(e^{i phi/2}).
/// Throws InvalidArgument when K is not unitary and symmetric within tol.
CMatrix takagi(const CMatrix& K, double tol = 1e-12);

/// For 2x2 V, a unitary symmetric K with K V^T conj(K) = V. Every 2x2 matrix
/// is complex symmetric; the construction rotates the Pauli coefficients of
/// the traceless part of V so the antisymmetric sigma_y component vanishes.
CMatrix find_conjugation_2x2(const CMatrix& V);

enum class Exactness { ExactAtD, Convergent };

std::string_view to_string(Exactness e);

struct Residual {
  std::string name;
  double value = 0.0;
  Exactness exactness = Exactness::ExactAtD;
  double threshold = 0.0;
  bool pass() const { return value <= threshold; }
};

struct CertifyOptions {
  double isometry_tol = 1e-11;
  double involution_tol = 1e-8;
  double symmetry_tol = 1e-11;
  /// Convergent residuals are measured on the block of degree <= probe_degree;
  /// -1 selects max(1, D/4).
  int probe_degree = -1;
};

struct ConjugationCertificate {
  std::string symbol_kind;  // "mobius" or "linear"
  SpaceSpec space;
  CVector a;                // mobius parameter (empty for linear symbols)
  CMatrix V;                // linear symbol (empty for mobius)
  AntilinearOperator candidate;
  std::vector<Residual> residuals;  // isometry, involution, symmetry
  std::map<std::string, double> diagnostics;
  int probe_degree = 0;
  std::string norm = "spectral";
  std::string calibration_reference;

  bool passed() const;
  const Residual& residual(std::string_view name) const;
};

struct PipelineOptions {
  double precondition_tol = 1e-10;
  double symmetrize_tol = 1e-10;
  double residual_tol = 1e-9;
};

/// C_V is J_V-symmetric with J_V = C_{U^*} J C_U, where K = U U^T is a
/// conjugation for V (K V^T conj(K) = V). Every residual is exact at D
/// because linear symbols preserve degree.
ConjugationCertificate jv_pipeline(const SpaceSpec& space, const CMatrix& V, const CMatrix& K,
                                   const PipelineOptions& opts = {});

/// Assembles C_{phi_a}, J_a and the isometry, involution and symmetry
/// residuals. The involution residual is measured on the probe block and is
/// convergent in D; the other two hold at every D.
ConjugationCertificate certify(const SpaceSpec& space, const CVector& a, const CertifyOptions& opts = {});

int default_probe_degree(int D);

}  // namespace ballop

#pragma once

#include "ballop/mindex_series.hpp"
#include "ballop/types.hpp"

namespace ballop {

/// psi(z) = (A z + B) / (<z, C> + d), with <z, C> = sum_j z_j conj(C_j).
///
/// The data is only defined up to a common scalar; construction rescales so
/// that d = 1. The denominator is required to be nonvanishing on the closed
/// ball through the sufficient condition ||C|| < |d|.
class LinearFractionalMap {
 public:
  LinearFractionalMap(CMatrix A, CVector B, CVector C, Complex d);

  /// Rebuilds a map from its (n+1)x(n+1) associated matrix [[A, B], [C^H, d]].
  static LinearFractionalMap from_associated(const CMatrix& m);

  static LinearFractionalMap identity(int n);

  int dim() const { return static_cast<int>(B_.size()); }
  const CMatrix& A() const { return A_; }
  const CVector& B() const { return B_; }
  const CVector& C() const { return C_; }
  Complex d() const { return d_; }

  CMatrix associated_matrix() const;

  /// True when B = 0 and C = 0, i.e. psi(z) = A z.
  bool is_linear(double tol = 0.0) const;

 private:
  CMatrix A_;
  CVector B_;
  CVector C_;
  Complex d_;
};

/// The involutive automorphism of the ball exchanging 0 and a:
///   phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>),
/// with P_a the projection onto span{a}, Q_a = I - P_a, s_a = sqrt(1 - |a|^2).
/// phi_0 is z -> -z.
LinearFractionalMap mobius(const CVector& a);

/// phi_a(z) evaluated through the expanded component formula
///   [phi_a]_j = ((1 - t + s_a t) a_j - s_a z_j) / (1 - <z, a>),  t = <z,a>/<a,a>.
/// Independent of the (A, B, C, d) route; used to cross-check mobius().
CVector mobius_apply_expanded(const CVector& a, const CVector& z);

/// phi_V(z) = V z. Requires ||V|| <= 1 so the map is a self-map of the ball.
LinearFractionalMap linear_map(const CMatrix& V);

CVector apply(const LinearFractionalMap& psi, const CVector& z);

/// psi o chi, via the product of associated matrices.
LinearFractionalMap compose(const LinearFractionalMap& psi, const LinearFractionalMap& chi);

/// m_psi^2 = lambda I for some lambda != 0, checked entrywise after dividing
/// by lambda = trace(m_psi^2) / (n+1).
bool is_involution(const LinearFractionalMap& psi, double tol);

/// Max-entry distance of m_psi^2 / lambda from the identity (infinity when
/// lambda vanishes).
double involution_defect(const LinearFractionalMap& psi);

/// Taylor series of the j-th component (0-based) of psi, truncated at degree D.
TruncatedSeries component_series(const LinearFractionalMap& psi, int j, int D);

}  // namespace ballop

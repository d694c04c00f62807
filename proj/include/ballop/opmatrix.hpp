#pragma once

#include "ballop/hardy_space.hpp"
#include "ballop/lfm.hpp"
#include "ballop/types.hpp"

namespace ballop {

/// A linear operator on the degree <= D truncation of a space, as a matrix
/// in the orthonormal monomial basis e_alpha = z^alpha / ||z^alpha||.
struct OperatorMatrix {
  SpaceSpec space;
  CMatrix M;
};

/// An antilinear operator v -> M conj(v) in the same basis. It is isometric
/// iff M is unitary and a conjugation iff additionally M conj(M) = I.
struct AntilinearOperator {
  SpaceSpec space;
  CMatrix M;
};

/// P_D C_psi P_D: column gamma holds the Taylor coefficients of psi^gamma up
/// to degree D, rescaled by ||z^alpha|| / ||z^gamma||. Exact on polynomials
/// of degree <= D for linear symbols; an approximation otherwise.
OperatorMatrix composition_matrix(const SpaceSpec& space, const LinearFractionalMap& psi);

OperatorMatrix identity_operator(const SpaceSpec& space);

OperatorMatrix adjoint(const OperatorMatrix& T);

/// Right polar decomposition M = W |M| computed from M = U S V^H as
/// W = U V^H, |M| = V S V^H.
struct PolarDecomposition {
  CMatrix unitary;
  CMatrix positive;
  CMatrix positive_adjoint;  // |M^H| = U S U^H
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// Throws NotInvertible when sigma_min <= sigma_min_tol; a negative tolerance
/// disables the check. Real input yields a real factorization.
PolarDecomposition polar_decomposition(const CMatrix& M, double sigma_min_tol);

/// Default guard 1e-10 * ||M||.
OperatorMatrix polar_unitary(const OperatorMatrix& T);
OperatorMatrix polar_unitary(const OperatorMatrix& T, double sigma_min_tol);

/// ||M M^H - M^H M|| / ||M||^2 in the spectral norm.
double normality_residual(const OperatorMatrix& T);

double op_norm(const OperatorMatrix& T);

/// v -> M_P conj(M_Q conj(v)): a linear operator with matrix M_P conj(M_Q).
OperatorMatrix antilinear_compose(const AntilinearOperator& P, const AntilinearOperator& Q);

/// ||M_T - M_J M_T^T conj(M_J)|| / ||M_T||, the matrix form of T = J T^* J.
double csym_residual(const OperatorMatrix& T, const AntilinearOperator& J);

/// Leading principal block spanned by monomials of degree <= k.
CMatrix leading_block(const SpaceSpec& space, const CMatrix& M, int k);

/// Maximum modulus over entries whose row and column degrees differ.
double off_block_mass(const OperatorMatrix& T);

}  // namespace ballop

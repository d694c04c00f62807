#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ballop {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Hermitian pairing <z, c> = sum_j z_j * conj(c_j). The second argument is
/// the conjugated one throughout the library.
inline Complex hermitian_pairing(const CVector& z, const CVector& c) {
  return c.dot(z);  // Eigen's dot conjugates its receiver
}

/// Largest singular value.
double spectral_norm(const CMatrix& m);

/// Smallest singular value (0 for an empty matrix).
double min_singular_value(const CMatrix& m);

}  // namespace ballop

#include "ballop/opmatrix.hpp"

#include <cstdio>
#include <vector>

#include <Eigen/SVD>

#include "ballop/error.hpp"

namespace ballop {

namespace {

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

namespace {

void require_same_space(const SpaceSpec& a, const SpaceSpec& b, const char* op) {
  require(a.dim() == b.dim() && a.cutoff() == b.cutoff() && a.s() == b.s() && a.betas() == b.betas(),
          ErrorKind::ShapeMismatch, std::string(op) + ": operators live on different spaces");
}

template <typename Matrix>
PolarDecomposition polar_from_svd(const Matrix& M, double sigma_min_tol) {
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  PolarDecomposition out;
  out.sigma_max = s.size() ? s(0) : 0.0;
  out.sigma_min = s.size() ? s(s.size() - 1) : 0.0;
  require(out.sigma_min > sigma_min_tol, ErrorKind::NotInvertible,
          "smallest singular value " + format_g(out.sigma_min) + " is not above the invertibility guard " +
              format_g(sigma_min_tol));
  const Matrix& U = svd.matrixU();
  const Matrix& V = svd.matrixV();
  out.unitary = (U * V.adjoint()).template cast<Complex>();
  out.positive = (V * s.asDiagonal() * V.adjoint()).template cast<Complex>();
  out.positive_adjoint = (U * s.asDiagonal() * U.adjoint()).template cast<Complex>();
  return out;
}

}  // namespace

OperatorMatrix composition_matrix(const SpaceSpec& space, const LinearFractionalMap& psi) {
  const int n = space.dim();
  const int D = space.cutoff();
  require(psi.dim() == n, ErrorKind::ShapeMismatch, "composition_matrix: symbol dimension mismatch");
  const Basis& basis = space.basis();

  std::vector<TruncatedSeries> components;
  components.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) components.push_back(component_series(psi, j, D));

  const auto N = static_cast<Eigen::Index>(basis.size());
  CMatrix M(N, N);
  std::vector<TruncatedSeries> powers;
  powers.reserve(basis.size());
  powers.push_back(TruncatedSeries::constant(n, D, 1.0));
  for (std::size_t g = 1; g < basis.size(); ++g) {
    const MultiIndex& gamma = basis[g];
    int j = 0;
    while (gamma[j] == 0) ++j;
    std::vector<int> parent(gamma.exponents().begin(), gamma.exponents().end());
    --parent[static_cast<std::size_t>(j)];
    const std::size_t p = basis.index_of(parent, gamma.degree() - 1);
    powers.push_back(series_mul(powers[p], components[static_cast<std::size_t>(j)]));
  }

  const RVector scale = orthonormal_scaling(space);
  for (Eigen::Index g = 0; g < N; ++g) {
    M.col(g) = powers[static_cast<std::size_t>(g)].coeffs().cwiseProduct(scale.cast<Complex>()) / scale[g];
  }
  return {space, std::move(M)};
}

OperatorMatrix identity_operator(const SpaceSpec& space) {
  const auto N = static_cast<Eigen::Index>(space.size());
  return {space, CMatrix::Identity(N, N)};
}

OperatorMatrix adjoint(const OperatorMatrix& T) { return {T.space, T.M.adjoint()}; }

PolarDecomposition polar_decomposition(const CMatrix& M, double sigma_min_tol) {
  require(M.rows() == M.cols(), ErrorKind::ShapeMismatch, "polar decomposition needs a square matrix");
  if (M.imag().cwiseAbs().maxCoeff() == 0.0) {
    const RMatrix R = M.real();
    return polar_from_svd(R, sigma_min_tol);
  }
  return polar_from_svd(M, sigma_min_tol);
}

OperatorMatrix polar_unitary(const OperatorMatrix& T, double sigma_min_tol) {
  return {T.space, polar_decomposition(T.M, sigma_min_tol).unitary};
}

OperatorMatrix polar_unitary(const OperatorMatrix& T) {
  return polar_unitary(T, 1e-10 * spectral_norm(T.M));
}

double normality_residual(const OperatorMatrix& T) {
  const double norm = spectral_norm(T.M);
  if (norm == 0.0) return 0.0;
  const CMatrix comm = T.M * T.M.adjoint() - T.M.adjoint() * T.M;
  return spectral_norm(comm) / (norm * norm);
}

double op_norm(const OperatorMatrix& T) { return spectral_norm(T.M); }

OperatorMatrix antilinear_compose(const AntilinearOperator& P, const AntilinearOperator& Q) {
  require_same_space(P.space, Q.space, "antilinear_compose");
  return {P.space, P.M * Q.M.conjugate()};
}

double csym_residual(const OperatorMatrix& T, const AntilinearOperator& J) {
  require_same_space(T.space, J.space, "csym_residual");
  const double norm = spectral_norm(T.M);
  if (norm == 0.0) return 0.0;
  const CMatrix mirrored = J.M * T.M.transpose() * J.M.conjugate();
  return spectral_norm(T.M - mirrored) / norm;
}

CMatrix leading_block(const SpaceSpec& space, const CMatrix& M, int k) {
  require(k >= 0 && k <= space.cutoff(), ErrorKind::OutOfRange, "probe degree exceeds truncation");
  const auto m = static_cast<Eigen::Index>(space.basis().prefix_size(k));
  return M.topLeftCorner(m, m);
}

double off_block_mass(const OperatorMatrix& T) {
  const Basis& basis = T.space.basis();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < T.M.cols(); ++c) {
    for (Eigen::Index r = 0; r < T.M.rows(); ++r) {
      if (basis[static_cast<std::size_t>(r)].degree() != basis[static_cast<std::size_t>(c)].degree()) {
        worst = std::max(worst, std::abs(T.M(r, c)));
      }
    }
  }
  return worst;
}

}  // namespace ballop

#include <doctest.h>

#include <numbers>
#include <random>

#include "ballop/error.hpp"
#include "ballop/symmetry.hpp"
#include "oracles.hpp"

using namespace ballop;

namespace {

CVector vec(std::initializer_list<Complex> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (Complex x : xs) v[i++] = x;
  return v;
}

CVector apply_antilinear(const AntilinearOperator& J, const CVector& v) { return J.M * v.conjugate(); }

CMatrix sign_diagonal(const SpaceSpec& space) {
  CMatrix d = CMatrix::Zero(static_cast<Eigen::Index>(space.size()), static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) {
    d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = space.basis()[i].degree() % 2 ? -1.0 : 1.0;
  }
  return d;
}

}  // namespace

TEST_CASE("the standard conjugation J") {
  const auto space = SpaceSpec::hardy_s(2, 2.0, 4);
  const auto J = conjugation_J(space);
  const auto iz1 = TruncatedSeries::variable(2, 4, 0).scaled(Complex(0.0, 1.0));
  const CVector image = apply_antilinear(J, to_orthonormal(space, iz1.coeffs()));
  const CVector want = to_orthonormal(space, iz1.scaled(-1.0).coeffs());
  CHECK((image - want).norm() == 0.0);
  CHECK(oracle::max_abs(antilinear_compose(J, J).M - CMatrix::Identity(15, 15)) == 0.0);

  std::mt19937_64 rng(41);
  for (int k = 0; k < 5; ++k) {
    const CVector f = oracle::random_complex(15, 1, rng);
    const CVector g = oracle::random_complex(15, 1, rng);
    const Complex lhs = apply_antilinear(J, g).dot(apply_antilinear(J, f));  // <Jf, Jg>
    CHECK(std::abs(lhs - std::conj(g.dot(f))) < 1e-13 * f.norm() * g.norm());
  }
}

TEST_CASE("unitary part of C_phi_a") {
  const auto space = SpaceSpec::hardy_s(2, 2.0, 6);
  const auto W0 = unitary_part_Wa(space, CVector::Zero(2));
  CHECK(oracle::max_abs(W0.M - sign_diagonal(space)) < 1e-14);

  std::mt19937_64 rng(42);
  for (int k = 0; k < 5; ++k) {
    const auto W = unitary_part_Wa(space, oracle::random_in_ball(2, 0.5, rng));
    CHECK(spectral_norm(W.M.adjoint() * W.M - CMatrix::Identity(28, 28)) < 1e-11);
  }

  const CVector a = vec({0.4});
  std::vector<double> residuals;
  for (int D : {8, 16, 32}) {
    const auto s = SpaceSpec::hardy_s(1, 2.0, D);
    const auto W = unitary_part_Wa(s, a);
    residuals.push_back(spectral_norm(leading_block(s, W.M * W.M - CMatrix::Identity(D + 1, D + 1), 4)));
  }
  CHECK(residuals[1] < residuals[0]);
  CHECK(residuals[2] < residuals[1]);
}

TEST_CASE("J_a for real a") {
  const auto space = SpaceSpec::hardy_s(1, 3.0, 10);
  CHECK(oracle::max_abs(conjugation_Ja_real(space, vec({0.0})).M - sign_diagonal(space)) < 1e-14);
  for (int D : {4, 8, 16, 32}) {
    const auto s = SpaceSpec::hardy_s(1, 2.0, D);
    const auto T = composition_matrix(s, mobius(vec({0.4})));
    CHECK(oracle::max_abs(T.M.imag()) < 1e-12);
    const auto W = unitary_part_Wa(s, vec({0.4}));
    // J W J has matrix conj(W).
    CHECK(spectral_norm(W.M.conjugate() - W.M) < 1e-11);
  }
  CHECK_THROWS_AS(conjugation_Ja_real(space, vec({Complex(0.1, 0.1)})), Error);

  for (double s : {1.0, 2.0, 3.0}) {
    const auto sp = SpaceSpec::hardy_s(1, s, 32);
    const auto T = composition_matrix(sp, mobius(vec({0.4})));
    CHECK(csym_residual(T, conjugation_Ja_real(sp, vec({0.4}))) < 1e-12);
  }
}

TEST_CASE("diagonal rotations") {
  const auto space = SpaceSpec::hardy_s(2, 2.0, 5);
  CHECK(oracle::max_abs(u_theta(space, RVector::Zero(2)).M - CMatrix::Identity(21, 21)) == 0.0);
  RVector theta(2);
  theta << 0.3, -1.2;
  const auto U = u_theta(space, theta);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& alpha = space.basis()[i];
    const Complex want = std::polar(1.0, 0.3 * alpha[0] - 1.2 * alpha[1]);
    CHECK(std::abs(U.M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) - want) < 1e-15);
  }
  CHECK(oracle::max_abs(adjoint(U).M - u_theta(space, -theta).M) < 1e-15);
}

TEST_CASE("realignment") {
  const auto r1 = realign_theta(vec({0.3, 0.2}));
  CHECK(r1.theta.norm() == 0.0);
  CHECK(r1.a_tilde[0] == 0.3);

  const auto r2 = realign_theta(vec({Complex(0.0, 0.5), 0.0}));
  CHECK(r2.theta[0] == doctest::Approx(-std::numbers::pi / 2));
  CHECK(r2.theta[1] == 0.0);
  CHECK(r2.a_tilde[0] == doctest::Approx(0.5));

  const auto r3 = realign_theta(vec({-0.3}));
  CHECK(std::abs(std::abs(r3.theta[0]) - std::numbers::pi) < 1e-15);
  CHECK(r3.a_tilde[0] == doctest::Approx(0.3));
}

TEST_CASE("J_a for complex a") {
  const auto space = SpaceSpec::hardy_s(2, 2.0, 8);
  const CVector real_a = vec({0.3, 0.2});
  CHECK(oracle::max_abs(conjugation_Ja(space, real_a).M - conjugation_Ja_real(space, real_a).M) == 0.0);

  std::mt19937_64 rng(43);
  for (int k = 0; k < 10; ++k) {
    const int n = 1 + k % 2;
    const auto sp = SpaceSpec::hardy_s(n, 1.0 + k % 3, 8);
    const CVector a = oracle::random_in_ball(n, 0.6, rng);
    const auto r = realign_theta(a);
    const CVector at = r.a_tilde.cast<Complex>();
    const auto U = u_theta(sp, r.theta);
    const auto T = composition_matrix(sp, mobius(a));
    const auto Tt = composition_matrix(sp, mobius(at));
    CHECK(spectral_norm(U.M.adjoint() * T.M * U.M - Tt.M) / spectral_norm(T.M) < 1e-11);
    const double direct = csym_residual(T, conjugation_Ja(sp, a));
    const double realigned = csym_residual(Tt, conjugation_Ja_real(sp, at));
    CHECK(std::abs(direct - realigned) < 1e-11);
  }
  RVector wrong(2);
  wrong << 0.1, 0.0;
  CHECK_THROWS_AS(conjugation_Ja(space, vec({Complex(0.1, 0.2), 0.1}), wrong), Error);
}

TEST_CASE("Takagi factorization") {
  const CMatrix I = CMatrix::Identity(3, 3);
  const CMatrix U1 = takagi(I);
  CHECK(oracle::max_abs(U1 * U1.transpose() - I) < 1e-13);

  CMatrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  CMatrix hand(2, 2);
  hand << 1.0, Complex(0.0, 1.0), 1.0, Complex(0.0, -1.0);
  hand /= std::sqrt(2.0);
  CHECK(oracle::max_abs(hand * hand.transpose() - swap) < 1e-15);
  const CMatrix U2 = takagi(swap);
  CHECK(oracle::max_abs(U2 * U2.transpose() - swap) < 1e-13);

  CMatrix phases = CMatrix::Zero(3, 3);
  for (int j = 0; j < 3; ++j) phases(j, j) = std::polar(1.0, 0.9 * j - 1.0);
  const CMatrix U3 = takagi(phases);
  CHECK(oracle::max_abs(U3 * U3.transpose() - phases) < 1e-13);

  std::mt19937_64 rng(44);
  for (int k = 0; k < 30; ++k) {
    const int n = 1 + k % 6;
    const CMatrix U0 = oracle::random_unitary(n, rng);
    const CMatrix K = U0 * U0.transpose();
    const CMatrix U = takagi(K);
    CHECK(spectral_norm(K - U * U.transpose()) < 1e-10);
    CHECK(spectral_norm(U.adjoint() * U - CMatrix::Identity(n, n)) < 1e-11);
  }
  CHECK_THROWS_AS(takagi(2.0 * I), Error);
  CMatrix asym(2, 2);
  asym << 0.0, 1.0, -1.0, 0.0;
  CHECK_THROWS_AS(takagi(asym), Error);
}

TEST_CASE("J_V pipeline") {
  const auto space = SpaceSpec::hardy_s(2, 2.0, 8);
  CMatrix V(2, 2);
  V << 0.5, Complex(0.0, 0.2), Complex(0.0, 0.2), -0.3;
  const auto c1 = jv_pipeline(space, V, CMatrix::Identity(2, 2));
  CHECK(c1.passed());
  CHECK(c1.residual("symmetry").value < 1e-11);
  CHECK(oracle::max_abs(c1.candidate.M - CMatrix::Identity(45, 45)) < 1e-11);

  // S symmetric and not normal, rotated by a random unitary.
  CMatrix S(2, 2);
  S << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 0.0;
  S /= 2.0;
  std::mt19937_64 rng(45);
  for (int k = 0; k < 5; ++k) {
    const CMatrix U0 = oracle::random_unitary(2, rng);
    const auto cert = jv_pipeline(space, U0 * S * U0.adjoint(), U0 * U0.transpose());
    CHECK(cert.passed());
    for (const auto& r : cert.residuals) CHECK(r.value < 1e-9);
  }

  // Nilpotent V: the swap matrix is a conjugation by hand, K V^T K = V.
  CMatrix nil(2, 2);
  nil << 0.0, 0.5, 0.0, 0.0;
  CMatrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  CHECK(oracle::max_abs(swap * nil.transpose() * swap - nil) == 0.0);
  CHECK(jv_pipeline(space, nil, swap).passed());
  const CMatrix found = find_conjugation_2x2(nil);
  CHECK(oracle::max_abs(found * nil.transpose() * found.conjugate() - nil) < 1e-12);
  CHECK(jv_pipeline(space, nil, found).passed());

  for (int k = 0; k < 10; ++k) {
    CMatrix R = oracle::random_complex(2, 2, rng);
    R /= spectral_norm(R);
    const CMatrix K = find_conjugation_2x2(R);
    CHECK(oracle::max_abs(K - K.transpose()) < 1e-12);
    CHECK(oracle::max_abs(K * K.adjoint() - CMatrix::Identity(2, 2)) < 1e-12);
    CHECK(oracle::max_abs(K * R.transpose() * K.conjugate() - R) < 1e-12);
  }

  try {
    jv_pipeline(space, nil, CMatrix::Identity(2, 2));
    FAIL("expected a precondition failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("K V^T conj(K)") != std::string::npos);
  }
}

TEST_CASE("certify") {
  for (int n = 1; n <= 2; ++n) {
    const auto cert = certify(SpaceSpec::hardy_s(n, 1.5, 6), CVector::Zero(n));
    CHECK(cert.passed());
    for (const auto& r : cert.residuals) CHECK(r.value < 1e-11);
  }

  const auto space = SpaceSpec::hardy_s(2, 2.0, 12);
  const auto c = certify(space, vec({Complex(0.0, 0.3), 0.2}));
  const auto ct = certify(space, vec({0.3, 0.2}));
  CHECK(c.residual("isometry").pass());
  CHECK(c.residual("symmetry").pass());
  CHECK(c.residual("involution").exactness == Exactness::Convergent);
  CHECK(c.residual("symmetry").exactness == Exactness::ExactAtD);
  for (const char* name : {"isometry", "involution", "symmetry"}) {
    CHECK(std::abs(c.residual(name).value - ct.residual(name).value) < 1e-11);
  }
  CHECK(c.diagnostics.count("realigned_symmetry"));
  CHECK_THROWS_AS(certify(space, vec({0.3})), Error);
  CHECK_THROWS_AS(certify(space, vec({0.8, 0.8})), Error);
  CHECK(default_probe_degree(32) == 8);
  CHECK(default_probe_degree(2) == 1);
}

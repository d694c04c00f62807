#include <doctest.h>

#include <numbers>
#include <random>

#include "ballop/error.hpp"
#include "ballop/lfm.hpp"
#include "oracles.hpp"

using namespace ballop;

namespace {

CVector vec(std::initializer_list<Complex> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (Complex x : xs) v[i++] = x;
  return v;
}

// Associated matrices agree up to a nonzero scalar.
double projective_gap(const CMatrix& x, const CMatrix& y) {
  Eigen::Index r = 0, c = 0;
  y.cwiseAbs().maxCoeff(&r, &c);
  const Complex scale = x(r, c) / y(r, c);
  return (x - scale * y).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("mobius data") {
  const auto phi0 = mobius(CVector::Zero(3));
  CHECK((phi0.A() + CMatrix::Identity(3, 3)).norm() == 0.0);
  CHECK(phi0.B().norm() == 0.0);
  CHECK(phi0.C().norm() == 0.0);
  CHECK(phi0.d() == Complex(1.0));

  const auto half = mobius(vec({0.5}));
  for (double x : {-0.7, 0.0, 0.2, 0.9}) {
    const Complex want = (0.5 - x) / (1.0 - x / 2.0);
    CHECK(std::abs(ballop::apply(half, vec({x}))[0] - want) < 1e-15);
  }
  CHECK_THROWS_AS(mobius(vec({0.6, 0.8})), Error);
}

TEST_CASE("mobius interchanges 0 and a and maps the ball into itself") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const CVector a = oracle::random_in_ball(n, 0.95, rng);
    const auto phi = mobius(a);
    CHECK((ballop::apply(phi, CVector::Zero(n)) - a).norm() < 1e-13);
    CHECK(ballop::apply(phi, a).norm() < 1e-13);
    for (int k = 0; k < 2; ++k) {
      const CVector z = oracle::random_in_ball(n, 0.99, rng);
      const CVector w = ballop::apply(phi, z);
      CHECK(w.norm() < 1.0);
      CHECK((w - oracle::mobius_point(a, z)).norm() < 1e-12);
      CHECK((w - mobius_apply_expanded(a, z)).norm() < 1e-12);
    }
  }
}

TEST_CASE("composition") {
  std::mt19937_64 rng(22);
  const CVector a = oracle::random_in_ball(2, 0.7, rng);
  const auto phi = mobius(a);
  CHECK(projective_gap(compose(phi, LinearFractionalMap::identity(2)).associated_matrix(),
                       phi.associated_matrix()) < 1e-14);
  CHECK(projective_gap(compose(phi, phi).associated_matrix(), CMatrix::Identity(3, 3)) < 1e-13);

  const CVector b = oracle::random_in_ball(2, 0.5, rng);
  const auto chi = mobius(b);
  const auto both = compose(phi, chi);
  for (int k = 0; k < 50; ++k) {
    const CVector z = oracle::random_in_ball(2, 0.95, rng);
    CHECK((ballop::apply(both, z) - oracle::mobius_point(a, oracle::mobius_point(b, z))).norm() < 1e-12);
  }
}

TEST_CASE("involution test") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const CVector a = oracle::random_in_ball(1 + trial % 3, 0.95, rng);
    CHECK(is_involution(mobius(a), 1e-11));
    CHECK(involution_defect(mobius(a)) < 1e-11);
  }
  CHECK_FALSE(is_involution(linear_map(0.5 * CMatrix::Identity(2, 2)), 1e-11));
  CHECK(is_involution(linear_map(-CMatrix::Identity(2, 2)), 1e-15));
}

TEST_CASE("linear maps") {
  const CVector z = vec({0.1, Complex(0.2, -0.3)});
  CHECK((ballop::apply(linear_map(CMatrix::Identity(2, 2)), z) - z).norm() == 0.0);
  CHECK(ballop::apply(linear_map(CMatrix::Zero(2, 2)), z).norm() == 0.0);
  CHECK(linear_map(CMatrix::Zero(2, 2)).is_linear());

  const double t1 = 0.4, t2 = -1.1;
  CMatrix rot = CMatrix::Zero(2, 2);
  rot(0, 0) = std::polar(1.0, t1);
  rot(1, 1) = std::polar(1.0, t2);
  const CVector w = ballop::apply(linear_map(rot), z);
  CHECK(std::abs(w[0] - std::polar(1.0, t1) * z[0]) < 1e-16);
  CHECK(std::abs(w[1] - std::polar(1.0, t2) * z[1]) < 1e-16);

  CHECK_THROWS_AS(linear_map(2.0 * CMatrix::Identity(2, 2)), Error);
  CHECK_FALSE(mobius(vec({0.3})).is_linear());
}

TEST_CASE("constructor checks and normalization") {
  CMatrix A = CMatrix::Identity(2, 2);
  CVector B = CVector::Zero(2);
  CVector C = vec({0.5, 0.0});
  const LinearFractionalMap scaled(2.0 * A, 2.0 * B, 2.0 * C, 2.0);
  CHECK(scaled.d() == Complex(1.0));
  CHECK((scaled.C() - C).norm() < 1e-16);
  CHECK_THROWS_AS(LinearFractionalMap(A, B, vec({2.0, 0.0}), 1.0), Error);
  CHECK_THROWS_AS(LinearFractionalMap(A, vec({1.0}), C, 1.0), Error);
  CHECK_THROWS_AS(LinearFractionalMap(A, B, C, 0.0), Error);
  const auto back = LinearFractionalMap::from_associated(scaled.associated_matrix());
  CHECK((back.associated_matrix() - scaled.associated_matrix()).norm() < 1e-15);
}

TEST_CASE("component series") {
  CMatrix V(2, 2);
  V << 0.3, Complex(0.0, 0.2), -0.1, 0.4;
  const auto lin = component_series(linear_map(V), 1, 4);
  CHECK(lin.terms().size() == 2);
  CHECK(std::abs(lin.coeff(MultiIndex({1, 0})) - V(1, 0)) == 0.0);
  CHECK(std::abs(lin.coeff(MultiIndex({0, 1})) - V(1, 1)) == 0.0);

  // (1/2 - z)(1 + z/2 + z^2/4 + ...) = 1/2 - 3/4 z - 3/8 z^2 - 3/16 z^3 ...
  const auto half = component_series(mobius(vec({0.5})), 0, 5);
  CHECK(std::abs(half.coeff(MultiIndex({0})) - 0.5) < 1e-16);
  for (int m = 1; m <= 5; ++m) {
    CHECK(std::abs(half.coeff(MultiIndex({m})) + 0.75 * std::pow(0.5, m - 1)) < 1e-15);
  }

  std::mt19937_64 rng(24);
  const CVector a = oracle::random_in_ball(2, 0.6, rng);
  const CVector z = oracle::random_in_ball(2, 0.5, rng);
  const CVector exact = oracle::mobius_point(a, z);
  double previous = INFINITY;
  for (int D : {4, 8, 16, 32}) {
    double err = 0.0;
    for (int j = 0; j < 2; ++j) err = std::max(err, std::abs(series_eval(component_series(mobius(a), j, D), z) - exact[j]));
    CHECK((err < previous || err < 1e-14));
    previous = err;
  }
  CHECK(previous < 1e-10);
  CHECK_THROWS_AS(component_series(mobius(a), 2, 3), Error);
}

TEST_CASE("singular points") {
  const LinearFractionalMap psi(CMatrix::Identity(1, 1), CVector::Zero(1), vec({-0.5}), 1.0);
  CHECK_NOTHROW(ballop::apply(psi, vec({1.0})));
  CHECK_THROWS_AS(ballop::apply(psi, vec({2.0})), Error);
}

#pragma once

// Reference computations that avoid the library's own code paths. Each one is
// deliberately naive: sparse maps instead of dense storage, scalar recurrences
// instead of shared helpers, pointwise evaluation instead of series algebra.

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "ballop/mindex_series.hpp"

namespace oracle {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Terms = std::map<std::vector<int>, Complex>;

inline int degree(const std::vector<int>& e) {
  int d = 0;
  for (int x : e) d += x;
  return d;
}

inline Terms terms_of(const ballop::TruncatedSeries& f) {
  Terms out;
  for (const auto& [alpha, c] : f.terms()) {
    out[std::vector<int>(alpha.exponents().begin(), alpha.exponents().end())] = c;
  }
  return out;
}

// Double loop over both term lists, dropping anything above degree D.
inline Terms naive_mul(const Terms& f, const Terms& g, int D) {
  Terms out;
  for (const auto& [a, ca] : f) {
    for (const auto& [b, cb] : g) {
      std::vector<int> e(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) e[j] = a[j] + b[j];
      if (degree(e) <= D) out[e] += ca * cb;
    }
  }
  return out;
}

inline Terms naive_pow(const Terms& f, int k, int n, int D) {
  Terms out{{std::vector<int>(n, 0), 1.0}};
  for (int i = 0; i < k; ++i) out = naive_mul(out, f, D);
  return out;
}

inline double max_gap(const Terms& f, const Terms& g) {
  double gap = 0.0;
  for (const auto& [e, c] : f) {
    auto it = g.find(e);
    gap = std::max(gap, std::abs(c - (it == g.end() ? Complex(0.0) : it->second)));
  }
  for (const auto& [e, c] : g) {
    if (!f.count(e)) gap = std::max(gap, std::abs(c));
  }
  return gap;
}

// Horner in the first variable with coefficients that are polynomials in the
// remaining ones, recursively.
inline Complex horner(const Terms& f, const CVector& z, std::size_t var = 0) {
  if (f.empty()) return 0.0;
  if (var == static_cast<std::size_t>(z.size())) return f.begin()->second;
  std::map<int, Terms> by_power;
  for (const auto& [e, c] : f) {
    std::vector<int> rest = e;
    rest[var] = 0;
    by_power[e[var]][rest] += c;
  }
  const int top = by_power.rbegin()->first;
  Complex acc = 0.0;
  for (int k = top; k >= 0; --k) {
    acc *= z[static_cast<Eigen::Index>(var)];
    auto it = by_power.find(k);
    if (it != by_power.end()) acc += horner(it->second, z, var + 1);
  }
  return acc;
}

inline Complex monomial_at(const std::vector<int>& e, const CVector& z) {
  Complex v = 1.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    for (int k = 0; k < e[j]; ++k) v *= z[static_cast<Eigen::Index>(j)];
  }
  return v;
}

// Kernel (1 - <z,w>)^(-s) = sum_m c_m <z,w>^m with c_{m+1} = c_m (s+m)/(m+1),
// and <z,w>^m = sum_{|a|=m} m!/a! z^a conj(w)^a. Reading off the coefficient
// of z^a conj(w)^a gives 1/||z^a||^2 = c_m m!/a!.
inline double hs_norm_sq(const std::vector<int>& alpha, double s) {
  const int m = degree(alpha);
  double c = 1.0;
  for (int k = 0; k < m; ++k) c *= (s + k) / (k + 1);
  double multinomial = 1.0;  // m!/alpha! built one factor at a time
  int placed = 0;
  for (int a : alpha) {
    for (int k = 1; k <= a; ++k) {
      ++placed;
      multinomial *= static_cast<double>(placed) / k;
    }
  }
  return 1.0 / (c * multinomial);
}

// Inner product from the layered definition: degree by degree,
// sum over |a| = m of f_a conj(g_a) ||z^a||^2.
inline Complex hs_inner(const Terms& f, const Terms& g, double s) {
  std::map<int, Complex> layers;
  for (const auto& [e, c] : f) {
    auto it = g.find(e);
    if (it != g.end()) layers[degree(e)] += c * std::conj(it->second) * hs_norm_sq(e, s);
  }
  Complex total = 0.0;
  for (const auto& [m, v] : layers) total += v;
  return total;
}

// Mobius map evaluated straight from its projection form, independent of the
// library's linear fractional data.
inline CVector mobius_point(const CVector& a, const CVector& z) {
  const double aa = a.squaredNorm();
  if (aa == 0.0) return -z;
  const Complex za = a.dot(z);  // <z, a>
  const CVector Pz = (za / aa) * a;
  const CVector Qz = z - Pz;
  const double sa = std::sqrt(1.0 - aa);
  return (a - Pz - sa * Qz) / (1.0 - za);
}

inline double power_iteration_norm(const CMatrix& M, int iters = 2000) {
  CVector v = CVector::Ones(M.cols());
  double lambda = 0.0;
  for (int i = 0; i < iters; ++i) {
    CVector w = M.adjoint() * (M * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    lambda = nw / v.norm();
    v = w / nw;
  }
  return std::sqrt(lambda);
}

inline CMatrix random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix Z(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) Z(r, c) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(Z);
  return qr.householderQ();
}

inline CVector random_in_ball(int n, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CVector v(n);
  for (int j = 0; j < n; ++j) v[j] = Complex(g(rng), g(rng));
  return v * (radius * std::pow(u(rng), 1.0 / (2 * n)) / v.norm());
}

inline CMatrix random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix Z(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) Z(r, c) = Complex(g(rng), g(rng));
  }
  return Z;
}

inline double max_abs(const CMatrix& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace oracle

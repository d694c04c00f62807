#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "ballop/types.hpp"

namespace ballop {

/// Exponent vector alpha in N^n, standing for the monomial z^alpha.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(n, 0)); }
  static MultiIndex unit(int n, int j);

  int dim() const { return static_cast<int>(exps_.size()); }
  int degree() const { return degree_; }
  int operator[](int j) const { return exps_[j]; }
  std::span<const int> exponents() const { return exps_; }

  MultiIndex operator+(const MultiIndex& other) const;

  /// alpha! = prod_j alpha_j!
  double factorial() const;

  /// z^alpha at a point.
  Complex eval(const CVector& z) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) {
    return a.exps_ <=> b.exps_;
  }

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

/// All multi-indices of length n and degree <= D in graded order: by degree
/// ascending, and within a degree lexicographically with larger leading
/// exponents first, so (n=2, D=1) gives (0,0), (1,0), (0,1).
std::vector<MultiIndex> enumerate_multiindices(int n, int D);

/// binomial(n + D, n): the number of monomials of degree <= D in n variables.
std::size_t basis_size(int n, int D);

/// Shared, immutable enumeration for a given (n, D) with O(n) index lookup.
class Basis {
 public:
  static std::shared_ptr<const Basis> get(int n, int D);

  int dim() const { return n_; }
  int cutoff() const { return cutoff_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  /// Position of alpha in the graded order. Requires alpha.degree() <= cutoff.
  std::size_t index_of(const MultiIndex& alpha) const;
  std::size_t index_of(std::span<const int> exps, int degree) const;

  /// Number of basis elements with degree <= m.
  std::size_t prefix_size(int m) const { return basis_size(n_, m); }

  Basis(int n, int D);

 private:
  int n_;
  int cutoff_;
  std::vector<MultiIndex> indices_;
  // binom_[k][m] = number of compositions of m into k non-negative parts.
  std::vector<std::vector<std::size_t>> compositions_;
};

/// Degree <= D truncation of a power series in n complex variables. Storage
/// is dense over the shared basis; a coefficient that is not set is zero.
class TruncatedSeries {
 public:
  TruncatedSeries(int n, int D);
  explicit TruncatedSeries(std::shared_ptr<const Basis> basis);
  TruncatedSeries(std::shared_ptr<const Basis> basis, CVector coeffs);

  static TruncatedSeries constant(int n, int D, Complex value);
  static TruncatedSeries monomial(int n, int D, const MultiIndex& alpha,
                                  Complex value = 1.0);
  static TruncatedSeries variable(int n, int D, int j) {
    return monomial(n, D, MultiIndex::unit(n, j));
  }

  int dim() const { return basis_->dim(); }
  int cutoff() const { return basis_->cutoff(); }
  const Basis& basis() const { return *basis_; }
  std::shared_ptr<const Basis> basis_ptr() const { return basis_; }

  /// Coefficient vector aligned with the basis order.
  const CVector& coeffs() const { return coeffs_; }

  /// Coefficient of z^alpha; zero when |alpha| exceeds the cutoff.
  Complex coeff(const MultiIndex& alpha) const;

  /// Canonical sparse view: entries with modulus below 1e-300 are dropped.
  std::map<MultiIndex, Complex> terms() const;

  TruncatedSeries with_coeff(const MultiIndex& alpha, Complex value) const;

  /// Restriction to a lower cutoff.
  TruncatedSeries truncate(int D) const;

  TruncatedSeries scaled(Complex factor) const;

  bool same_shape(const TruncatedSeries& other) const {
    return dim() == other.dim() && cutoff() == other.cutoff();
  }

 private:
  std::shared_ptr<const Basis> basis_;
  CVector coeffs_;
};

inline constexpr double kSeriesTolerance = 1e-12;

/// Coefficientwise comparison after canonicalization.
bool approx_equal(const TruncatedSeries& f, const TruncatedSeries& g,
                  double tol = kSeriesTolerance);

TruncatedSeries series_add(const TruncatedSeries& f, const TruncatedSeries& g);

/// Cauchy product with every term of degree above the cutoff discarded.
TruncatedSeries series_mul(const TruncatedSeries& f, const TruncatedSeries& g);

/// f^k by binary exponentiation; f^0 is the constant 1.
TruncatedSeries series_pow(const TruncatedSeries& f, int k);

/// The degree-1 series <z, c> = sum_j conj(c_j) z_j. Note the conjugation.
TruncatedSeries linear_form(const CVector& c, int D);

/// Degree <= D truncation of 1 / (d + <z, c>).
TruncatedSeries reciprocal_affine(Complex d, const CVector& c, int D);

Complex series_eval(const TruncatedSeries& f, const CVector& z);

}  // namespace ballop

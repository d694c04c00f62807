#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ballop/mindex_series.hpp"
#include "ballop/types.hpp"

namespace ballop {

/// A weighted Hardy space on the unit ball of C^n, truncated to polynomials
/// of degree <= D. Monomials are orthogonal and their norms depend on the
/// degree only through the weight sequence beta_m.
///
/// Two families are supported:
///   - H_s (s > 0): reproducing kernel (1 - <z, w>)^(-s), ||z^a||^2 = a!/(s)_|a|.
///     s = n is the Hardy space H^2, s = 1 the Drury-Arveson space when n >= 2.
///   - explicit weights beta_0 = 1, beta_1, ..., beta_D > 0 relative to H^2.
///
/// Boundedness of composition operators with linear fractional symbols is
/// assumed for explicit weights and never checked.
class SpaceSpec {
 public:
  static SpaceSpec hardy_s(int n, double s, int D);
  static SpaceSpec weighted(int n, std::vector<double> beta);

  int dim() const { return n_; }
  int cutoff() const { return basis_->cutoff(); }
  std::size_t size() const { return basis_->size(); }
  const Basis& basis() const { return *basis_; }
  std::shared_ptr<const Basis> basis_ptr() const { return basis_; }

  /// Kernel parameter s, absent for explicit-weight spaces.
  std::optional<double> s() const { return s_; }
  const std::vector<double>& betas() const { return beta_; }

  /// ||z^alpha||^2 by basis position.
  double norm_sq_at(std::size_t i) const { return norm_sq_[i]; }
  const std::vector<double>& norm_sq() const { return norm_sq_; }

  /// Same space at another truncation degree (explicit weights must cover it).
  SpaceSpec with_cutoff(int D) const;

  /// Short identifier such as "n=2,s=2,D=12" used in reports.
  std::string describe() const;

 private:
  SpaceSpec(int n, std::optional<double> s, std::vector<double> beta, int D);

  int n_;
  std::optional<double> s_;
  std::vector<double> beta_;
  std::shared_ptr<const Basis> basis_;
  std::vector<double> norm_sq_;
};

/// (x)_m = x (x+1) ... (x+m-1).
double rising_factorial(double x, int m);

/// ||z^alpha||^2 in H^2(B_n): (n-1)! alpha! / (n-1+|alpha|)!.
double h2_norm_sq(const MultiIndex& alpha);

double monomial_norm_sq(const SpaceSpec& space, const MultiIndex& alpha);

/// beta_m = ||z^alpha|| / ||z^alpha||_{H^2} for any |alpha| = m.
double beta(const SpaceSpec& space, int m);

Complex inner_product(const SpaceSpec& space, const TruncatedSeries& f, const TruncatedSeries& g);

/// Truncated reproducing kernel at w: coefficient conj(w)^alpha / ||z^alpha||^2.
TruncatedSeries kernel_series(const SpaceSpec& space, const CVector& w);

/// N_alpha = ||z^alpha||, per basis position. Multiplying monomial
/// coefficients by N gives coordinates in the orthonormal basis z^alpha/N_alpha.
RVector orthonormal_scaling(const SpaceSpec& space);

CVector to_orthonormal(const SpaceSpec& space, const CVector& monomial_coeffs);
CVector from_orthonormal(const SpaceSpec& space, const CVector& orthonormal_coeffs);

}  // namespace ballop

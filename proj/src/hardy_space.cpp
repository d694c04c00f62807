#include "ballop/hardy_space.hpp"

#include <cmath>
#include <sstream>

#include "ballop/error.hpp"

namespace ballop {

double rising_factorial(double x, int m) {
  double r = 1.0;
  for (int k = 0; k < m; ++k) r *= x + k;
  return r;
}

namespace {

// alpha! / (x)_|alpha|, with factors interleaved so intermediate values stay
// near the final magnitude.
double factorial_over_rising(const MultiIndex& alpha, double x) {
  double r = 1.0;
  int k = 0;
  for (int e : alpha.exponents()) {
    for (int f = 1; f <= e; ++f, ++k) r *= f / (x + k);
  }
  return r;
}

}  // namespace

double h2_norm_sq(const MultiIndex& alpha) {
  return factorial_over_rising(alpha, static_cast<double>(alpha.dim()));
}

SpaceSpec::SpaceSpec(int n, std::optional<double> s, std::vector<double> beta, int D)
    : n_(n), s_(s), beta_(std::move(beta)), basis_(Basis::get(n, D)) {
  norm_sq_.reserve(basis_->size());
  for (const auto& alpha : basis_->indices()) {
    const double v = s_ ? factorial_over_rising(alpha, *s_)
                        : beta_[static_cast<std::size_t>(alpha.degree())] *
                              beta_[static_cast<std::size_t>(alpha.degree())] * h2_norm_sq(alpha);
    require(std::isfinite(v) && v > 0.0, ErrorKind::OutOfRange,
            "monomial norm left double range; reduce D or s");
    norm_sq_.push_back(v);
  }
}

SpaceSpec SpaceSpec::hardy_s(int n, double s, int D) {
  require(n >= 1, ErrorKind::InvalidArgument, "dimension n must be >= 1");
  require(D >= 0, ErrorKind::InvalidArgument, "truncation degree must be >= 0");
  require(std::isfinite(s) && s > 0.0, ErrorKind::InvalidArgument, "weight parameter s must be > 0");
  std::vector<double> beta;
  beta.reserve(static_cast<std::size_t>(D) + 1);
  for (int m = 0; m <= D; ++m) {
    // beta_m^2 = (n)_m / (s)_m, formed as a running product of ratios.
    double b2 = 1.0;
    for (int k = 0; k < m; ++k) b2 *= (n + k) / (s + k);
    beta.push_back(std::sqrt(b2));
  }
  return SpaceSpec(n, s, std::move(beta), D);
}

SpaceSpec SpaceSpec::weighted(int n, std::vector<double> beta) {
  require(n >= 1, ErrorKind::InvalidArgument, "dimension n must be >= 1");
  require(!beta.empty(), ErrorKind::InvalidArgument, "weight sequence must contain beta_0");
  require(std::abs(beta[0] - 1.0) <= 1e-15, ErrorKind::InvalidArgument,
          "beta_0 must equal 1 (constants have unit norm)");
  for (double b : beta) {
    require(std::isfinite(b) && b > 0.0, ErrorKind::InvalidArgument, "weights beta_m must be > 0");
  }
  const int D = static_cast<int>(beta.size()) - 1;
  return SpaceSpec(n, std::nullopt, std::move(beta), D);
}

SpaceSpec SpaceSpec::with_cutoff(int D) const {
  if (s_) return hardy_s(n_, *s_, D);
  require(D >= 0 && D + 1 <= static_cast<int>(beta_.size()), ErrorKind::OutOfRange,
          "explicit weights do not cover the requested degree");
  return weighted(n_, std::vector<double>(beta_.begin(), beta_.begin() + D + 1));
}

std::string SpaceSpec::describe() const {
  std::ostringstream os;
  os << "n=" << n_ << ",";
  if (s_) {
    os << "s=" << *s_;
  } else {
    os << "beta";
  }
  os << ",D=" << cutoff();
  return os.str();
}

double monomial_norm_sq(const SpaceSpec& space, const MultiIndex& alpha) {
  require(alpha.dim() == space.dim(), ErrorKind::ShapeMismatch, "multi-index length mismatch");
  require(alpha.degree() <= space.cutoff(), ErrorKind::OutOfRange, "monomial degree exceeds truncation");
  return space.norm_sq_at(space.basis().index_of(alpha));
}

double beta(const SpaceSpec& space, int m) {
  require(m >= 0 && m <= space.cutoff(), ErrorKind::OutOfRange, "beta index out of range");
  return space.betas()[static_cast<std::size_t>(m)];
}

Complex inner_product(const SpaceSpec& space, const TruncatedSeries& f, const TruncatedSeries& g) {
  require(f.dim() == space.dim() && f.cutoff() == space.cutoff() && f.same_shape(g),
          ErrorKind::ShapeMismatch, "inner_product: series do not match the space");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    acc += f.coeffs()[k] * std::conj(g.coeffs()[k]) * space.norm_sq_at(i);
  }
  return acc;
}

TruncatedSeries kernel_series(const SpaceSpec& space, const CVector& w) {
  require(w.size() == space.dim(), ErrorKind::ShapeMismatch, "kernel point dimension mismatch");
  require(w.norm() < 1.0, ErrorKind::OutOfDomain, "kernel point must lie in the open unit ball");
  const CVector wbar = w.conjugate();
  CVector c(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) {
    c[static_cast<Eigen::Index>(i)] = space.basis()[i].eval(wbar) / space.norm_sq_at(i);
  }
  return TruncatedSeries(space.basis_ptr(), std::move(c));
}

RVector orthonormal_scaling(const SpaceSpec& space) {
  RVector n(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) n[static_cast<Eigen::Index>(i)] = std::sqrt(space.norm_sq_at(i));
  return n;
}

CVector to_orthonormal(const SpaceSpec& space, const CVector& monomial_coeffs) {
  require(monomial_coeffs.size() == static_cast<Eigen::Index>(space.size()), ErrorKind::ShapeMismatch,
          "coefficient vector length does not match the space");
  return monomial_coeffs.cwiseProduct(orthonormal_scaling(space).cast<Complex>());
}

CVector from_orthonormal(const SpaceSpec& space, const CVector& orthonormal_coeffs) {
  require(orthonormal_coeffs.size() == static_cast<Eigen::Index>(space.size()), ErrorKind::ShapeMismatch,
          "coefficient vector length does not match the space");
  return orthonormal_coeffs.cwiseQuotient(orthonormal_scaling(space).cast<Complex>());
}

}  // namespace ballop

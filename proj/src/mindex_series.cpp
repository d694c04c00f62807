#include "ballop/mindex_series.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <utility>

#include "ballop/error.hpp"

namespace ballop {

MultiIndex::MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
  require(!exps_.empty(), ErrorKind::InvalidArgument, "multi-index must have length >= 1");
  for (int e : exps_) {
    require(e >= 0, ErrorKind::InvalidArgument, "multi-index exponents must be non-negative");
  }
  degree_ = std::accumulate(exps_.begin(), exps_.end(), 0);
}

MultiIndex MultiIndex::unit(int n, int j) {
  require(j >= 0 && j < n, ErrorKind::OutOfRange, "unit multi-index position out of range");
  std::vector<int> e(n, 0);
  e[j] = 1;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  require(dim() == other.dim(), ErrorKind::ShapeMismatch, "multi-index length mismatch");
  std::vector<int> e(exps_);
  for (int j = 0; j < dim(); ++j) e[j] += other.exps_[j];
  return MultiIndex(std::move(e));
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : exps_) {
    for (int k = 2; k <= e; ++k) f *= k;
  }
  return f;
}

Complex MultiIndex::eval(const CVector& z) const {
  require(z.size() == dim(), ErrorKind::ShapeMismatch, "point dimension mismatch");
  Complex v = 1.0;
  for (int j = 0; j < dim(); ++j) {
    for (int k = 0; k < exps_[j]; ++k) v *= z[j];
  }
  return v;
}

namespace {

// Appends all exponent vectors of length `len` summing to `remaining`, larger
// leading exponents first.
void fill_degree(int len, int remaining, std::vector<int>& prefix,
                 std::vector<MultiIndex>& out) {
  if (len == 1) {
    prefix.push_back(remaining);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    prefix.push_back(e);
    fill_degree(len - 1, remaining - e, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_multiindices(int n, int D) {
  require(n >= 1, ErrorKind::InvalidArgument, "dimension n must be >= 1");
  require(D >= 0, ErrorKind::InvalidArgument, "truncation degree must be >= 0");
  std::vector<MultiIndex> out;
  out.reserve(basis_size(n, D));
  std::vector<int> prefix;
  for (int m = 0; m <= D; ++m) fill_degree(n, m, prefix, out);
  return out;
}

std::size_t basis_size(int n, int D) {
  if (D < 0) return 0;
  // binomial(n + D, n), computed incrementally to stay exact.
  std::size_t r = 1;
  for (int k = 1; k <= n; ++k) r = r * static_cast<std::size_t>(D + k) / static_cast<std::size_t>(k);
  return r;
}

Basis::Basis(int n, int D) : n_(n), cutoff_(D), indices_(enumerate_multiindices(n, D)) {
  compositions_.assign(n + 1, std::vector<std::size_t>(D + 1, 0));
  for (int k = 1; k <= n; ++k) {
    for (int m = 0; m <= D; ++m) compositions_[k][m] = basis_size(k - 1, m);
  }
}

std::shared_ptr<const Basis> Basis::get(int n, int D) {
  require(n >= 1, ErrorKind::InvalidArgument, "dimension n must be >= 1");
  require(D >= 0, ErrorKind::InvalidArgument, "truncation degree must be >= 0");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const Basis>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{n, D}];
  if (!slot) slot = std::make_shared<const Basis>(n, D);
  return slot;
}

std::size_t Basis::index_of(std::span<const int> exps, int degree) const {
  std::size_t idx = degree == 0 ? 0 : basis_size(n_, degree - 1);
  int remaining = degree;
  for (int j = 0; j + 1 < n_; ++j) {
    const int parts = n_ - j - 1;
    for (int b = exps[j] + 1; b <= remaining; ++b) idx += compositions_[parts][remaining - b];
    remaining -= exps[j];
  }
  return idx;
}

std::size_t Basis::index_of(const MultiIndex& alpha) const {
  require(alpha.dim() == n_, ErrorKind::ShapeMismatch, "multi-index length does not match basis");
  require(alpha.degree() <= cutoff_, ErrorKind::OutOfRange, "multi-index degree exceeds cutoff");
  return index_of(alpha.exponents(), alpha.degree());
}

TruncatedSeries::TruncatedSeries(int n, int D) : TruncatedSeries(Basis::get(n, D)) {}

TruncatedSeries::TruncatedSeries(std::shared_ptr<const Basis> basis)
    : basis_(std::move(basis)), coeffs_(CVector::Zero(static_cast<Eigen::Index>(basis_->size()))) {}

TruncatedSeries::TruncatedSeries(std::shared_ptr<const Basis> basis, CVector coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  require(coeffs_.size() == static_cast<Eigen::Index>(basis_->size()), ErrorKind::ShapeMismatch,
          "coefficient vector length does not match basis");
}

TruncatedSeries TruncatedSeries::constant(int n, int D, Complex value) {
  TruncatedSeries s(n, D);
  s.coeffs_[0] = value;
  return s;
}

TruncatedSeries TruncatedSeries::monomial(int n, int D, const MultiIndex& alpha, Complex value) {
  TruncatedSeries s(n, D);
  if (alpha.degree() <= D) s.coeffs_[static_cast<Eigen::Index>(s.basis_->index_of(alpha))] = value;
  return s;
}

Complex TruncatedSeries::coeff(const MultiIndex& alpha) const {
  require(alpha.dim() == dim(), ErrorKind::ShapeMismatch, "multi-index length mismatch");
  if (alpha.degree() > cutoff()) return 0.0;
  return coeffs_[static_cast<Eigen::Index>(basis_->index_of(alpha))];
}

std::map<MultiIndex, Complex> TruncatedSeries::terms() const {
  std::map<MultiIndex, Complex> out;
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i) {
    if (std::abs(coeffs_[i]) >= 1e-300) out.emplace((*basis_)[static_cast<std::size_t>(i)], coeffs_[i]);
  }
  return out;
}

TruncatedSeries TruncatedSeries::with_coeff(const MultiIndex& alpha, Complex value) const {
  require(alpha.degree() <= cutoff(), ErrorKind::OutOfRange, "multi-index degree exceeds cutoff");
  TruncatedSeries s(*this);
  s.coeffs_[static_cast<Eigen::Index>(basis_->index_of(alpha))] = value;
  return s;
}

TruncatedSeries TruncatedSeries::truncate(int D) const {
  require(D >= 0 && D <= cutoff(), ErrorKind::OutOfRange, "truncation must lower the cutoff");
  auto b = Basis::get(dim(), D);
  // Graded order makes the lower-degree basis a prefix.
  return TruncatedSeries(b, coeffs_.head(static_cast<Eigen::Index>(b->size())));
}

TruncatedSeries TruncatedSeries::scaled(Complex factor) const {
  return TruncatedSeries(basis_, coeffs_ * factor);
}

bool approx_equal(const TruncatedSeries& f, const TruncatedSeries& g, double tol) {
  if (!f.same_shape(g)) return false;
  return (f.coeffs() - g.coeffs()).cwiseAbs().maxCoeff() <= tol;
}

TruncatedSeries series_add(const TruncatedSeries& f, const TruncatedSeries& g) {
  require(f.same_shape(g), ErrorKind::InvalidArgument, "series_add: dimension/cutoff mismatch");
  return TruncatedSeries(f.basis_ptr(), f.coeffs() + g.coeffs());
}

TruncatedSeries series_mul(const TruncatedSeries& f, const TruncatedSeries& g) {
  require(f.same_shape(g), ErrorKind::InvalidArgument, "series_mul: dimension/cutoff mismatch");
  const Basis& basis = f.basis();
  const int n = basis.dim();
  const int D = basis.cutoff();
  const CVector& fc = f.coeffs();
  const CVector& gc = g.coeffs();
  CVector out = CVector::Zero(fc.size());
  std::vector<int> sum(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Complex fi = fc[static_cast<Eigen::Index>(i)];
    if (fi == Complex(0.0)) continue;
    const MultiIndex& a = basis[i];
    const std::size_t limit = basis.prefix_size(D - a.degree());
    for (std::size_t j = 0; j < limit; ++j) {
      const Complex gj = gc[static_cast<Eigen::Index>(j)];
      if (gj == Complex(0.0)) continue;
      const MultiIndex& b = basis[j];
      for (int k = 0; k < n; ++k) sum[static_cast<std::size_t>(k)] = a[k] + b[k];
      out[static_cast<Eigen::Index>(basis.index_of(sum, a.degree() + b.degree()))] += fi * gj;
    }
  }
  return TruncatedSeries(f.basis_ptr(), std::move(out));
}

TruncatedSeries series_pow(const TruncatedSeries& f, int k) {
  require(k >= 0, ErrorKind::InvalidArgument, "series_pow: negative exponent");
  TruncatedSeries result = TruncatedSeries::constant(f.dim(), f.cutoff(), 1.0);
  TruncatedSeries base = f;
  while (k > 0) {
    if (k & 1) result = series_mul(result, base);
    k >>= 1;
    if (k > 0) base = series_mul(base, base);
  }
  return result;
}

TruncatedSeries linear_form(const CVector& c, int D) {
  const int n = static_cast<int>(c.size());
  TruncatedSeries s(n, D);
  if (D < 1) return s;
  CVector coeffs = s.coeffs();
  for (int j = 0; j < n; ++j) coeffs[1 + j] = std::conj(c[j]);
  return TruncatedSeries(s.basis_ptr(), std::move(coeffs));
}

TruncatedSeries reciprocal_affine(Complex d, const CVector& c, int D) {
  require(d != Complex(0.0), ErrorKind::SingularDenominator, "reciprocal_affine: d = 0");
  const int n = static_cast<int>(c.size());
  // 1/(d + L) = (1/d) * sum_m (-L/d)^m, accumulated by Horner in the ratio.
  const TruncatedSeries ratio = linear_form(c, D).scaled(-1.0 / d);
  TruncatedSeries acc = TruncatedSeries::constant(n, D, 1.0);
  const TruncatedSeries one = acc;
  for (int m = 0; m < D; ++m) acc = series_add(one, series_mul(ratio, acc));
  return acc.scaled(1.0 / d);
}

Complex series_eval(const TruncatedSeries& f, const CVector& z) {
  const Basis& basis = f.basis();
  require(z.size() == basis.dim(), ErrorKind::ShapeMismatch, "series_eval: point dimension mismatch");
  const int D = basis.cutoff();
  // powers(j, k) = z_j^k
  CMatrix powers(basis.dim(), D + 1);
  for (int j = 0; j < basis.dim(); ++j) {
    powers(j, 0) = 1.0;
    for (int k = 1; k <= D; ++k) powers(j, k) = powers(j, k - 1) * z[j];
  }
  Complex total = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Complex c = f.coeffs()[static_cast<Eigen::Index>(i)];
    if (c == Complex(0.0)) continue;
    Complex term = c;
    for (int j = 0; j < basis.dim(); ++j) term *= powers(j, basis[i][j]);
    total += term;
  }
  return total;
}

}  // namespace ballop

#include "canard/series.hpp"

#include <stdexcept>

namespace canard {

namespace {
void require_same_order(const HSeries& a, const HSeries& b) {
  if (a.truncation_order() != b.truncation_order())
    throw std::invalid_argument(
        "series truncation orders differ: " +
        std::to_string(a.truncation_order()) + " vs " +
        std::to_string(b.truncation_order()));
}
}  // namespace

HSeries::HSeries(int truncation_order) {
  if (truncation_order < 0)
    throw std::invalid_argument("truncation order must be >= 0");
  coeffs_.resize(truncation_order + 1);
}

HSeries::HSeries(const BivariatePolynomial& p, int truncation_order, int power)
    : HSeries(truncation_order) {
  if (power < 0) throw std::invalid_argument("h-power must be >= 0");
  if (power <= truncation_order) coeffs_[power] = p;
}

bool HSeries::is_zero() const {
  for (const auto& c : coeffs_)
    if (!c.is_zero()) return false;
  return true;
}

HSeries& HSeries::operator+=(const HSeries& b) {
  require_same_order(*this, b);
  for (size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += b.coeffs_[k];
  return *this;
}

HSeries& HSeries::operator-=(const HSeries& b) {
  require_same_order(*this, b);
  for (size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= b.coeffs_[k];
  return *this;
}

HSeries& HSeries::operator*=(const Rational& c) {
  for (auto& p : coeffs_) p *= c;
  return *this;
}

HSeries& HSeries::operator*=(const BivariatePolynomial& p) {
  for (auto& q : coeffs_) q = q * p;
  return *this;
}

HSeries HSeries::shifted(int k) const {
  if (k < 0) throw std::invalid_argument("shift must be >= 0");
  HSeries out(truncation_order());
  for (int m = 0; m + k <= truncation_order(); ++m)
    out.coeffs_[m + k] = coeffs_[m];
  return out;
}

HSeries series_mul(const HSeries& a, const HSeries& b) {
  require_same_order(a, b);
  const int T = a.truncation_order();
  HSeries out(T);
  for (int k = 0; k <= T; ++k) {
    BivariatePolynomial acc;
    for (int m = 0; m <= k; ++m) acc += a[m] * b[k - m];
    out[k] = acc;
  }
  return out;
}

HSeries series_inverse(const HSeries& a) {
  const int T = a.truncation_order();
  const BivariatePolynomial& lead = a[0];
  if (lead.is_zero() || lead.degree() > 0)
    throw std::domain_error(
        "series not invertible: h^0 coefficient must be a nonzero constant");
  const Rational c0 = lead.coeff(0, 0);

  // b solves a*b = 1: b_0 = 1/c0, then c0*b_k = -sum_{m=1..k} a_m b_{k-m}.
  HSeries b(T);
  b[0] = BivariatePolynomial(1 / c0);
  for (int k = 1; k <= T; ++k) {
    BivariatePolynomial acc;
    for (int m = 1; m <= k; ++m) acc += a[m] * b[k - m];
    acc *= -1 / c0;
    b[k] = acc;
  }
  return b;
}

HSeries series_exp(const HSeries& a) {
  const int T = a.truncation_order();
  if (!a[0].is_zero())
    throw std::domain_error("series_exp requires a zero h^0 coefficient");

  // exp(a) = sum_{m=0..T} a^m / m!; a has valuation >= 1 so powers beyond
  // h^T vanish and the loop terminates at m = T.
  HSeries out(T);
  out[0] = BivariatePolynomial(Rational(1));
  HSeries power = out;  // a^0
  Rational factorial(1);
  for (int m = 1; m <= T; ++m) {
    power = series_mul(power, a);
    factorial *= m;
    out += power * (1 / factorial);
  }
  return out;
}

}  // namespace canard

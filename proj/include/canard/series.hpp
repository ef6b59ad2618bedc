#pragma once

#include <vector>

#include "canard/polynomial.hpp"

namespace canard {

// Truncated power series in the step size h whose coefficients are bivariate
// polynomials: a = sum_{k=0}^{T} a_k(x,y) h^k. All arithmetic discards terms
// beyond the truncation order T.
class HSeries {
 public:
  explicit HSeries(int truncation_order = 6);

  // Series with p placed at h^power and zeros elsewhere.
  HSeries(const BivariatePolynomial& p, int truncation_order, int power = 0);

  int truncation_order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const BivariatePolynomial& operator[](int k) const { return coeffs_[k]; }
  BivariatePolynomial& operator[](int k) { return coeffs_[k]; }

  bool is_zero() const;
  bool operator==(const HSeries&) const = default;

  HSeries& operator+=(const HSeries& b);
  HSeries& operator-=(const HSeries& b);
  HSeries& operator*=(const Rational& c);
  HSeries& operator*=(const BivariatePolynomial& p);

  friend HSeries operator+(HSeries a, const HSeries& b) {
    a += b;
    return a;
  }
  friend HSeries operator-(HSeries a, const HSeries& b) {
    a -= b;
    return a;
  }
  friend HSeries operator-(HSeries a) {
    a *= Rational(-1);
    return a;
  }
  friend HSeries operator*(HSeries a, const Rational& c) {
    a *= c;
    return a;
  }
  friend HSeries operator*(const Rational& c, HSeries a) {
    a *= c;
    return a;
  }

  // Multiply by h^k (shift coefficients up, dropping overflow).
  HSeries shifted(int k) const;

 private:
  std::vector<BivariatePolynomial> coeffs_;  // coeffs_[k] multiplies h^k
};

// Cauchy product truncated at the common order; mismatched truncation orders
// are an error.
HSeries series_mul(const HSeries& a, const HSeries& b);

// Multiplicative inverse. The h^0 coefficient must be a nonzero constant
// (normally 1); zero or non-constant leading coefficients are an error.
HSeries series_inverse(const HSeries& a);

// Truncated exponential; requires a zero h^0 coefficient.
HSeries series_exp(const HSeries& a);

}  // namespace canard

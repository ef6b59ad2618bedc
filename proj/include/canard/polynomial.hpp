#pragma once

#include <compare>
#include <map>
#include <string>

#include "canard/rational.hpp"

namespace canard {

// Exponent pair (i, j) of a monomial x^i y^j. The map ordering doubles as the
// canonical serialization order.
struct Monomial {
  int i = 0;
  int j = 0;
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

// Total-degree cap on stored terms (default 12). Multiplications whose result
// would exceed the cap throw; derivations that need larger scratch degrees
// raise the cap locally with DegreeCapGuard.
int poly_degree_cap();
void set_poly_degree_cap(int cap);

struct DegreeCapGuard {
  explicit DegreeCapGuard(int cap);
  ~DegreeCapGuard();
  DegreeCapGuard(const DegreeCapGuard&) = delete;
  DegreeCapGuard& operator=(const DegreeCapGuard&) = delete;

 private:
  int saved_;
};

// Bivariate polynomial in x, y with exact rational coefficients. Zero
// coefficients are never stored, so equality is plain map equality.
class BivariatePolynomial {
 public:
  BivariatePolynomial() = default;
  explicit BivariatePolynomial(const Rational& constant);

  static BivariatePolynomial monomial(int i, int j,
                                      const Rational& coeff = Rational(1));

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  Rational coeff(int i, int j) const;
  void set_coeff(int i, int j, const Rational& c);
  void add_term(int i, int j, const Rational& c);

  bool is_zero() const { return terms_.empty(); }
  // Total degree; -1 for the zero polynomial.
  int degree() const;

  BivariatePolynomial& operator+=(const BivariatePolynomial& q);
  BivariatePolynomial& operator-=(const BivariatePolynomial& q);
  BivariatePolynomial& operator*=(const Rational& c);

  friend BivariatePolynomial operator+(BivariatePolynomial p,
                                       const BivariatePolynomial& q) {
    p += q;
    return p;
  }
  friend BivariatePolynomial operator-(BivariatePolynomial p,
                                       const BivariatePolynomial& q) {
    p -= q;
    return p;
  }
  friend BivariatePolynomial operator-(BivariatePolynomial p) {
    p *= Rational(-1);
    return p;
  }
  friend BivariatePolynomial operator*(const BivariatePolynomial& p,
                                       const BivariatePolynomial& q);
  friend BivariatePolynomial operator*(BivariatePolynomial p,
                                       const Rational& c) {
    p *= c;
    return p;
  }
  friend BivariatePolynomial operator*(const Rational& c,
                                       BivariatePolynomial p) {
    p *= c;
    return p;
  }

  bool operator==(const BivariatePolynomial&) const = default;

  double eval(double x, double y) const;
  Rational eval_exact(const Rational& x, const Rational& y) const;

  // Canonical text form: terms sorted by (i, j), each printed as
  // "c * x^i * y^j" with c as "num" or "num/den"; the zero polynomial is "0".
  std::string str() const;

 private:
  std::map<Monomial, Rational> terms_;
};

enum class PolyOp { add, sub, mul };
enum class Var { x, y };

BivariatePolynomial poly_arith(const BivariatePolynomial& p,
                               const BivariatePolynomial& q, PolyOp op);
BivariatePolynomial poly_partial(const BivariatePolynomial& p, Var var);

}  // namespace canard

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <stdexcept>

#include "canard/polynomial.hpp"
#include "canard/series.hpp"
#include "doctest.h"

using namespace canard;

namespace {

BivariatePolynomial X() { return BivariatePolynomial::monomial(1, 0); }
BivariatePolynomial Y() { return BivariatePolynomial::monomial(0, 1); }
BivariatePolynomial one() { return BivariatePolynomial(Rational(1)); }

// Random sparse polynomial with small rational coefficients, fixed generator.
BivariatePolynomial random_poly(std::mt19937& gen, int max_deg = 3) {
  std::uniform_int_distribution<int> nterms(1, 4), expo(0, max_deg),
      num(-5, 5), den(1, 4);
  BivariatePolynomial p;
  for (int t = nterms(gen); t-- > 0;)
    p.add_term(expo(gen), expo(gen), rat(num(gen), den(gen)));
  return p;
}

HSeries random_series(std::mt19937& gen, int T, bool unit_lead) {
  HSeries a(T);
  for (int k = 0; k <= T; ++k) a[k] = random_poly(gen, 2);
  a[0] = unit_lead ? one() : BivariatePolynomial();
  return a;
}

HSeries unit_series(int T) { return HSeries(one(), T); }

}  // namespace

TEST_CASE("rational construction and canonical text") {
  CHECK(rat(2, 4) == rat(1, 2));
  CHECK(rat(-3, -6) == rat(1, 2));
  CHECK(rat(3, -6) == rat(-1, 2));
  CHECK(rational_str(rat(1, 2)) == "1/2");
  CHECK(rational_str(rat(-3)) == "-3");
  CHECK(rational_str(rat(-5, 7)) == "-5/7");
  CHECK(rat(0, 5) == 0);
}

TEST_CASE("polynomial arithmetic matches hand expansion") {
  // x * y = xy
  CHECK(poly_arith(X(), Y(), PolyOp::mul) ==
        BivariatePolynomial::monomial(1, 1));

  // (x^2 - y) + y = x^2 (zero term pruned)
  BivariatePolynomial p = BivariatePolynomial::monomial(2, 0) - Y();
  CHECK(poly_arith(p, Y(), PolyOp::add) == BivariatePolynomial::monomial(2, 0));
  CHECK(poly_arith(p, Y(), PolyOp::add).terms().size() == 1);

  // (1 + x)^2 = 1 + 2x + x^2
  BivariatePolynomial q = one() + X();
  BivariatePolynomial expect = one() + rat(2) * X() +
                               BivariatePolynomial::monomial(2, 0);
  CHECK(poly_arith(q, q, PolyOp::mul) == expect);

  CHECK(poly_arith(p, p, PolyOp::sub).is_zero());
}

TEST_CASE("partial derivatives") {
  // d/dx (x^2 y) = 2xy
  CHECK(poly_partial(BivariatePolynomial::monomial(2, 1), Var::x) ==
        BivariatePolynomial::monomial(1, 1, rat(2)));
  // d/dy (x^2) = 0
  CHECK(poly_partial(BivariatePolynomial::monomial(2, 0), Var::y).is_zero());
  // d/dy (y^3 - x^2 y) = 3y^2 - x^2
  BivariatePolynomial p =
      BivariatePolynomial::monomial(0, 3) - BivariatePolynomial::monomial(2, 1);
  BivariatePolynomial expect = BivariatePolynomial::monomial(0, 2, rat(3)) -
                               BivariatePolynomial::monomial(2, 0);
  CHECK(poly_partial(p, Var::y) == expect);
}

TEST_CASE("mixed partials commute") {
  std::mt19937 gen(12345);
  for (int trial = 0; trial < 50; ++trial) {
    BivariatePolynomial p = random_poly(gen, 5);
    CHECK(poly_partial(poly_partial(p, Var::x), Var::y) ==
          poly_partial(poly_partial(p, Var::y), Var::x));
  }
}

TEST_CASE("distributivity over random polynomials") {
  std::mt19937 gen(2024);
  for (int trial = 0; trial < 50; ++trial) {
    BivariatePolynomial p = random_poly(gen), q = random_poly(gen),
                        r = random_poly(gen);
    CHECK((p + q) * r == p * r + q * r);
  }
}

TEST_CASE("degree accounting and overflow detection") {
  BivariatePolynomial p = BivariatePolynomial::monomial(6, 6);
  CHECK(p.degree() == 12);
  CHECK(poly_degree_cap() == 12);
  CHECK_THROWS_AS(p * X(), std::overflow_error);
  {
    DegreeCapGuard guard(13);
    CHECK((p * X()).degree() == 13);
  }
  CHECK(poly_degree_cap() == 12);
  CHECK(BivariatePolynomial().degree() == -1);
}

TEST_CASE("canonical polynomial serialization") {
  BivariatePolynomial p = BivariatePolynomial::monomial(2, 0) - Y();
  CHECK(p.str() == "-1 * x^0 * y^1 + 1 * x^2 * y^0");
  CHECK(BivariatePolynomial().str() == "0");
  BivariatePolynomial q = BivariatePolynomial::monomial(1, 1, rat(1, 2));
  CHECK(q.str() == "1/2 * x^1 * y^1");
}

TEST_CASE("series product examples") {
  const int T = 2;
  CHECK(series_mul(unit_series(T), unit_series(T)) == unit_series(T));

  // (h x)(h y) = h^2 xy
  HSeries hx(X(), T, 1), hy(Y(), T, 1);
  HSeries expect(BivariatePolynomial::monomial(1, 1), T, 2);
  CHECK(series_mul(hx, hy) == expect);

  // (1 + hx)(1 - hx) = 1 - h^2 x^2 at truncation 2
  HSeries a = unit_series(T) + hx, b = unit_series(T) - hx;
  HSeries expect2 =
      unit_series(T) - HSeries(BivariatePolynomial::monomial(2, 0), T, 2);
  CHECK(series_mul(a, b) == expect2);
}

TEST_CASE("series truncation order mismatch is an error") {
  CHECK_THROWS_AS(series_mul(unit_series(2), unit_series(3)),
                  std::invalid_argument);
}

TEST_CASE("series inverse examples") {
  CHECK(series_inverse(unit_series(4)) == unit_series(4));

  // 1/(1 - hx) = 1 + hx + h^2x^2 + h^3x^3 at truncation 3
  HSeries a = unit_series(3) - HSeries(X(), 3, 1);
  HSeries expect(3);
  for (int k = 0; k <= 3; ++k) expect[k] = BivariatePolynomial::monomial(k, 0);
  CHECK(series_inverse(a) == expect);

  // 1/(1 - hx + h^2/4) = 1 + hx + h^2(x^2 - 1/4) at truncation 2
  HSeries d = unit_series(2) - HSeries(X(), 2, 1) +
              HSeries(BivariatePolynomial(rat(1, 4)), 2, 2);
  HSeries expect2(2);
  expect2[0] = one();
  expect2[1] = X();
  expect2[2] =
      BivariatePolynomial::monomial(2, 0) - BivariatePolynomial(rat(1, 4));
  CHECK(series_inverse(d) == expect2);

  // Nonzero constant leads are normalized internally: 1/(2 + 2hx).
  HSeries two = unit_series(1) * rat(2) + HSeries(rat(2) * X(), 1, 1);
  HSeries inv = series_inverse(two);
  CHECK(series_mul(two, inv) == unit_series(1));
}

TEST_CASE("series inverse rejects zero or non-constant lead") {
  HSeries zero_lead(2);
  zero_lead[1] = X();
  CHECK_THROWS_AS(series_inverse(zero_lead), std::domain_error);
  HSeries poly_lead(X(), 2, 0);
  CHECK_THROWS_AS(series_inverse(poly_lead), std::domain_error);
}

TEST_CASE("series exponential examples") {
  CHECK(series_exp(HSeries(4)) == unit_series(4));

  // exp(h a) = 1 + h a + h^2 a^2/2 at truncation 2, for a = x - 2y
  BivariatePolynomial a = X() - rat(2) * Y();
  HSeries arg(a, 2, 1);
  HSeries expect = unit_series(2) + arg +
                   HSeries(a * a * rat(1, 2), 2, 2);
  CHECK(series_exp(arg) == expect);

  // exp(h^2 y) = 1 + h^2 y at truncation 3 (h^4 truncated away)
  HSeries arg2(Y(), 3, 2);
  CHECK(series_exp(arg2) == unit_series(3) + arg2);

  HSeries bad(one(), 2, 0);
  CHECK_THROWS_AS(series_exp(bad), std::domain_error);
}

TEST_CASE("a * inverse(a) is the unit series") {
  std::mt19937 gen(777);
  for (int trial = 0; trial < 25; ++trial) {
    DegreeCapGuard guard(24);  // inverse coefficients reach degree ~2k
    HSeries a = random_series(gen, 4, /*unit_lead=*/true);
    CHECK(series_mul(a, series_inverse(a)) == unit_series(4));
  }
}

TEST_CASE("exp(a) * exp(-a) is the unit series") {
  std::mt19937 gen(888);
  for (int trial = 0; trial < 10; ++trial) {
    DegreeCapGuard guard(24);  // scratch powers of a need headroom
    HSeries a = random_series(gen, 4, /*unit_lead=*/false);
    CHECK(series_mul(series_exp(a), series_exp(-a)) == unit_series(4));
  }
}

TEST_CASE("series respects truncation in mixed arithmetic") {
  HSeries a(X(), 3, 3);
  HSeries sq = series_mul(a, a);  // h^6 exceeds truncation 3
  CHECK(sq.is_zero());
  CHECK(a.shifted(1).is_zero());
  CHECK(a.shifted(0) == a);
}

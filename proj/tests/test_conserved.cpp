#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <stdexcept>

#include "canard/canard_maps.hpp"
#include "canard/conserved.hpp"
#include "canard/melnikov.hpp"
#include "doctest.h"

using namespace canard;

namespace {

PlanarState p0_step(double h, PlanarState s) {
  return k2_kahan_map(h, 0.0, 0.0, PerturbationCoeffs{0.0, 0.0, 0.0, 0.0}, s);
}

// Independent transcription of the on-curve multiplier numerator/denominator.
double oracle_f(double x, double h) {
  const double c = 1.0 + h * h / 4.0;
  return -h * h * x * x + c * c;
}

double oracle_g(double x, double h) {
  const double c = 1.0 + h * h / 4.0;
  return h * h * x * x - x * (2.0 * h + h * h * h / 2.0) + c * c;
}

// The expected first correction polynomial,
//   p1 = (1/6) * (1/2 + y (1 + y - y^2) - x^2 (x^2/2 + y - y^2)),
// written out monomial by monomial.
BivariatePolynomial expected_p1() {
  BivariatePolynomial p(rat(1, 12));
  p += BivariatePolynomial::monomial(0, 1, rat(1, 6));
  p += BivariatePolynomial::monomial(0, 2, rat(1, 6));
  p += BivariatePolynomial::monomial(0, 3, rat(-1, 6));
  p += BivariatePolynomial::monomial(4, 0, rat(-1, 12));
  p += BivariatePolynomial::monomial(2, 1, rat(-1, 6));
  p += BivariatePolynomial::monomial(2, 2, rat(1, 6));
  return p;
}

// Leading defect polynomial g3 = (1/6) x (x^2 + x^4 - 4 x^2 y + 3 y^2).
BivariatePolynomial expected_g3() {
  BivariatePolynomial p;
  p += BivariatePolynomial::monomial(3, 0, rat(1, 6));
  p += BivariatePolynomial::monomial(5, 0, rat(1, 6));
  p += BivariatePolynomial::monomial(3, 1, rat(-2, 3));
  p += BivariatePolynomial::monomial(1, 2, rat(1, 2));
  return p;
}

BivariatePolynomial bracket_poly() {
  BivariatePolynomial p(rat(1, 4));
  p += BivariatePolynomial::monomial(0, 1, rat(1, 2));
  p += BivariatePolynomial::monomial(2, 0, rat(-1, 2));
  return p;
}

Trajectory p0_orbit(double h, PlanarState s0, long steps) {
  CanardParams p;
  p.epsilon = 0.0;
  p.lambda = 0.0;
  p.h = h;
  return iterate(MapId::k2_kahan, p, s0, 0, steps);
}

}  // namespace

TEST_CASE("H matches the closed form and vanishes on the separatrix") {
  // H(x, y) = 1/2 e^{-2y} (y - x^2 + 1/2)
  CHECK(conserved_H(0.0, -0.5) == 0.0);
  CHECK(conserved_H(0.0, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  // The reference solution (t/2, t^2/4 - 1/2) lies on the zero level set.
  for (double t : {-2.0, 0.0, 3.0}) {
    const double x = t / 2.0;
    const double y = t * t / 4.0 - 0.5;
    CHECK(conserved_H(x, y) == 0.0);
  }
  // Interior value computed by hand: H(0, -0.2) = 0.15 e^{0.4}.
  CHECK(conserved_H(0.0, -0.2) ==
        doctest::Approx(0.15 * std::exp(0.4)).epsilon(1e-14));
  // Local maximum 1/4 at the center.
  CHECK(conserved_H(0.05, 0.02) < 0.25);
  CHECK(conserved_H(-0.1, -0.05) < 0.25);
}

TEST_CASE("gamma_h walks the invariant parabola") {
  for (double h : {0.5, 0.1, 0.01}) {
    const PlanarState s0 = gamma_h(0, h);
    CHECK(s0.x == 0.0);
    CHECK(s0.y == doctest::Approx(-0.5 - h * h / 8.0).epsilon(1e-16));
  }
  const PlanarState s1 = gamma_h(1, 0.1);
  CHECK(s1.x == doctest::Approx(0.05).epsilon(1e-16));
  CHECK(s1.y == doctest::Approx(-0.49875).epsilon(1e-16));
  // Symmetric in n up to the sign of x.
  const PlanarState sp = gamma_h(137, 0.02);
  const PlanarState sm = gamma_h(-137, 0.02);
  CHECK(sp.x == -sm.x);
  CHECK(sp.y == sm.y);
}

TEST_CASE("one step of P0 advances gamma_h by one index") {
  const double tol = 1e-13;
  for (long n = -1000; n < 1000; ++n) {
    const PlanarState img = p0_step(0.01, gamma_h(n, 0.01));
    const PlanarState tgt = gamma_h(n + 1, 0.01);
    REQUIRE(std::fabs(img.x - tgt.x) < tol);
    REQUIRE(std::fabs(img.y - tgt.y) < tol);
  }
  for (long n = -100; n < 100; ++n) {
    const PlanarState img = p0_step(0.1, gamma_h(n, 0.1));
    const PlanarState tgt = gamma_h(n + 1, 0.1);
    REQUIRE(std::fabs(img.x - tgt.x) < tol);
    REQUIRE(std::fabs(img.y - tgt.y) < tol);
  }
}

TEST_CASE("phi_h measures the offset from the invariant parabola") {
  CHECK(phi_h(0.0, 0.0, 0.0) == -0.5);
  CHECK(phi_h(0.0, -1.0, 0.2) == doctest::Approx(0.5 - 0.04 / 8.0).epsilon(1e-16));
  for (long n : {-40L, 0L, 7L, 300L}) {
    const PlanarState s = gamma_h(n, 0.05);
    CHECK(on_curve(s.x, s.y, 0.05, 1e-12));
  }
  CHECK_FALSE(on_curve(0.0, -0.4, 0.05, 1e-12));
}

TEST_CASE("exact rational stepping preserves the curve with zero defect") {
  // Along the invariant parabola the map acts as x -> x + h/2 exactly; in
  // rational arithmetic the defect must be identically zero, not just small.
  for (long den : {2L, 10L}) {
    const Rational h = rat(1, den);
    RationalPlanarState s{rat(0), rat(-1, 2) - h * h * rat(1, 8)};
    CHECK(phi_h_exact(s, h) == 0);
    const long steps = den == 2 ? 50 : 200;
    for (long k = 0; k < steps; ++k) {
      const RationalPlanarState next = p0_step_exact(s, h);
      REQUIRE(phi_h_exact(next, h) == 0);
      REQUIRE(next.x - s.x == h * rat(1, 2));
      s = next;
    }
  }
}

TEST_CASE("exact stepping agrees with the double-precision map") {
  const Rational h = rat(1, 10);
  const RationalPlanarState s{rat(1, 4), rat(1, 8)};
  const RationalPlanarState img = p0_step_exact(s, h);
  const PlanarState d = p0_step(0.1, {0.25, 0.125});
  CHECK(std::fabs(to_double(img.x) - d.x) < 1e-15);
  CHECK(std::fabs(to_double(img.y) - d.y) < 1e-15);
  // Pole of the map: 1 - h x + h^2/4 = 0.
  const RationalPlanarState pole{rat(401, 40), rat(0)};
  CHECK_THROWS_AS((void)p0_step_exact(pole, h), std::domain_error);
}

TEST_CASE("closed-form Jacobian of P0 matches finite differences") {
  const double fd = 1e-6;
  const struct {
    double x, y, h;
  } pts[] = {{0.3, 0.1, 0.1}, {0.0, 0.0, 0.05}, {-0.7, 0.4, 0.2}, {1.1, -0.3, 0.01}};
  for (const auto& q : pts) {
    const Jacobian2 J = p0_jacobian(q.x, q.y, q.h);
    const PlanarState xp = p0_step(q.h, {q.x + fd, q.y});
    const PlanarState xm = p0_step(q.h, {q.x - fd, q.y});
    const PlanarState yp = p0_step(q.h, {q.x, q.y + fd});
    const PlanarState ym = p0_step(q.h, {q.x, q.y - fd});
    CHECK(J.dxdx == doctest::Approx((xp.x - xm.x) / (2 * fd)).epsilon(1e-6));
    CHECK(J.dydx == doctest::Approx((xp.y - xm.y) / (2 * fd)).epsilon(1e-6));
    CHECK(J.dxdy == doctest::Approx((yp.x - ym.x) / (2 * fd)).epsilon(1e-6));
    CHECK(J.dydy == doctest::Approx((yp.y - ym.y) / (2 * fd)).epsilon(1e-6));
  }
  // Spot value at the origin, h = 0.1: entries reduce to simple fractions.
  const double h = 0.1;
  const double c = 1.0 + h * h / 4.0;
  const Jacobian2 J0 = p0_jacobian(0.0, 0.0, h);
  CHECK(J0.dxdx == doctest::Approx((1.0 - h * h * h * h / 16.0) / (c * c)).epsilon(1e-15));
  CHECK(J0.dxdy == doctest::Approx(-h / c).epsilon(1e-15));
  CHECK(J0.dydx == doctest::Approx((h + h * h * h / 4.0) / (c * c)).epsilon(1e-15));
  CHECK(J0.dydy == doctest::Approx((1.0 - h * h / 4.0) / c).epsilon(1e-15));
}

TEST_CASE("Jacobian determinant transports the curve density phi_h") {
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> steps(0.01, 0.4);
  int checked = 0;
  while (checked < 100) {
    const double x = coord(rng);
    const double y = coord(rng);
    const double h = steps(rng);
    if (std::fabs(phi_h(x, y, h)) < 1e-3) continue;  // stay clearly off-curve
    const DetRatioCheck c = p0_det_ratio_check(x, y, h);
    REQUIRE(c.det_closed_form ==
            doctest::Approx(c.phi_ratio).epsilon(1e-10));
    ++checked;
  }
  // Exactly on the curve the density ratio degenerates.
  const PlanarState s = gamma_h(3, 0.1);
  const double y_on = s.x * s.x - 0.5 - 0.01 / 8.0;
  CHECK_THROWS_AS((void)p0_det_ratio_check(s.x, y_on, 0.1), std::domain_error);
}

TEST_CASE("on-curve multiplier trichotomy") {
  const double h = 0.1;
  // Independent evaluation of the closed forms.
  for (double x : {-1.0, 0.0, 1.0}) {
    const CurveMultiplier m = derivative_classification(x, h);
    CHECK(m.f == doctest::Approx(oracle_f(x, h)).epsilon(1e-15));
    CHECK(m.g == doctest::Approx(oracle_g(x, h)).epsilon(1e-15));
    CHECK(m.value == doctest::Approx(oracle_f(x, h) / oracle_g(x, h)).epsilon(1e-15));
  }
  CHECK(derivative_classification(-1.0, h).cls == CurveMultiplierClass::contracting);
  CHECK(derivative_classification(-1.0, h).value < 1.0);
  CHECK(derivative_classification(0.0, h).cls == CurveMultiplierClass::neutral);
  CHECK(derivative_classification(0.0, h).value == 1.0);
  CHECK(derivative_classification(1.0, h).cls == CurveMultiplierClass::expanding);
  CHECK(derivative_classification(1.0, h).value > 1.0);
  // Both polynomials vanish at the common pole x* = (1 + h^2/4)/h.
  const CurveMultiplier mp = derivative_classification((1.0 + h * h / 4.0) / h, h);
  CHECK(std::fabs(mp.f) < 1e-12);
  CHECK(std::fabs(mp.g) < 1e-12);
  CHECK(mp.pole_x == doctest::Approx(10.025).epsilon(1e-15));

  // Dynamical cross-check: the plain partial derivative of the map's
  // x-component, evaluated at on-curve points, equals f/g.
  for (double x : {-2.0, -0.5, 0.0, 0.8, 2.0}) {
    const double y = x * x - 0.5 - h * h / 8.0;
    const double fd = 1e-6;
    PlanarState xp = p0_step(h, {x + fd, y});
    PlanarState xm = p0_step(h, {x - fd, y});
    const double dxdx = (xp.x - xm.x) / (2 * fd);
    const CurveMultiplier m = derivative_classification(x, h);
    CHECK(dxdx == doctest::Approx(m.value).epsilon(1e-5));
    // Restricted to the curve itself the dynamics is the translation
    // x -> x + h/2, so the directional derivative along the curve is 1.
    PlanarState yp = p0_step(h, {x, y + fd});
    PlanarState ym = p0_step(h, {x, y - fd});
    const double dxdy = (yp.x - ym.x) / (2 * fd);
    CHECK(dxdx + 2.0 * x * dxdy == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("series expansion of H after one step") {
  const HSeries s = expand_H_of_step(3);
  CHECK(s[0] == bracket_poly());
  CHECK(s[1].is_zero());
  CHECK(s[2].is_zero());
  // Hand expansion at (x, y) = (1, 0): the h^3 coefficient is +1/3 = g3(1, 0).
  CHECK(s[3] == expected_g3());

  CHECK_THROWS_AS((void)expand_H_of_step(2), std::invalid_argument);

  // Numeric consistency with the actual map: the truncated series evaluated
  // at small h tracks e^{2y} H(P0(z)) to the order of the truncation.
  const HSeries s6 = expand_H_of_step(6);
  const double x = 0.3, y = -0.2, h = 0.05;
  double acc = 0.0;
  for (int k = s6.truncation_order(); k >= 0; --k)
    acc = acc * h + s6[k].eval(x, y);
  const PlanarState img = p0_step(h, {x, y});
  const double target = std::exp(2.0 * y) * conserved_H(img.x, img.y);
  CHECK(acc == doctest::Approx(target).epsilon(1e-8));
}

TEST_CASE("first correction reproduces the quartic polynomial exactly") {
  const ExpWeightedPoly p1 = solve_correction(1, FormalConservedQuantity{});
  CHECK(p1.poly == expected_p1());
  CHECK(p1.poly.coeff(0, 0) == rat(1, 12));
  CHECK(p1.poly.coeff(2, 0) == 0);  // the free column of the solve
  CHECK(p1.poly.degree() == 4);
}

TEST_CASE("defect series vanishes through the corrected order") {
  // No corrections: defect starts exactly at h^3 with the leading defect g3.
  const HSeries d0 = invariant_defect_series(FormalConservedQuantity{}, 3);
  CHECK(d0[0].is_zero());
  CHECK(d0[1].is_zero());
  CHECK(d0[2].is_zero());
  CHECK(d0[3] == expected_g3());

  const FormalConservedQuantity f2 = derive_formal_invariant(2);
  REQUIRE(f2.corrections.size() == 1);
  const HSeries d2 = invariant_defect_series(f2, 5);
  for (int k = 0; k <= 4; ++k) REQUIRE(d2[k].is_zero());
  CHECK_FALSE(d2[5].is_zero());  // the next odd defect is genuinely nonzero

  const FormalConservedQuantity f4 = derive_formal_invariant(4);
  REQUIRE(f4.corrections.size() == 2);
  const HSeries d4 = invariant_defect_series(f4, 5);
  for (int k = 0; k <= 5; ++k) REQUIRE(d4[k].is_zero());
  CHECK(f4.corrections[1].poly.degree() <= 6);

  const FormalConservedQuantity f6 = derive_formal_invariant(6);
  REQUIRE(f6.corrections.size() == 3);
  const HSeries d6 = invariant_defect_series(f6, 7);
  for (int k = 0; k <= 7; ++k) REQUIRE(d6[k].is_zero());
  CHECK(f6.corrections[2].poly.degree() <= 8);
}

TEST_CASE("solve_correction rejects inconsistent input") {
  CHECK_THROWS_AS((void)solve_correction(0, FormalConservedQuantity{}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)solve_correction(2, FormalConservedQuantity{}),
                  std::invalid_argument);
  // A wrong first correction leaves an uncancelled h^3 defect, which the
  // solver must refuse to skip over.
  FormalConservedQuantity bad;
  bad.corrections.push_back(ExpWeightedPoly{BivariatePolynomial{}});
  CHECK_THROWS_AS((void)solve_correction(2, bad), DerivationError);
  CHECK_THROWS_AS((void)derive_formal_invariant(3), std::invalid_argument);
}

TEST_CASE("hbar_eval reduces to H at order zero") {
  const FormalConservedQuantity none{};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double x = coord(rng), y = coord(rng);
    CHECK(hbar_eval(x, y, 0.3, none) == conserved_H(x, y));
  }
  // With one correction the value shifts by h^2 e^{-2y} p1.
  const FormalConservedQuantity f2 = derive_formal_invariant(2);
  const double x = 0.4, y = -0.3, h = 0.1;
  const double expected = conserved_H(x, y) +
                          h * h * std::exp(-2.0 * y) * expected_p1().eval(x, y);
  CHECK(hbar_eval(x, y, h, f2) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("hbar is nearly constant along the exact on-curve orbit") {
  const FormalConservedQuantity f2 = derive_formal_invariant(2);
  const double h = 0.01;
  double worst = 0.0;
  for (long n = -1000; n <= 1000; ++n) {
    const PlanarState s = gamma_h(n, h);
    worst = std::max(worst, std::fabs(hbar_eval(s.x, s.y, h, f2)));
  }
  // The h^2-corrected value along gamma_h is O(h^4).
  CHECK(worst <= 1e-9);
}

TEST_CASE("peak-to-peak of the corrected invariant scales like h^4") {
  const FormalConservedQuantity f2 = derive_formal_invariant(2);
  const MonitorResult coarse =
      conservation_monitor(p0_orbit(0.02, {0.0, -0.4}, 1000), f2);
  const MonitorResult fine =
      conservation_monitor(p0_orbit(0.01, {0.0, -0.4}, 1000), f2);
  const double factor = coarse.ptp_Hbar / fine.ptp_Hbar;
  CHECK(factor > 16.0 * 0.7);
  CHECK(factor < 16.0 * 1.3);
  // And the corrected quantity is far flatter than H itself.
  CHECK(fine.ptp_Hbar < 1e-2 * fine.ptp_H);
}

TEST_CASE("fourth-order correction flattens the invariant further") {
  const FormalConservedQuantity f2 = derive_formal_invariant(2);
  const FormalConservedQuantity f4 = derive_formal_invariant(4);
  const Trajectory orbit = p0_orbit(0.05, {0.0, -0.4}, 1000);
  const MonitorResult m2 = conservation_monitor(orbit, f2);
  const MonitorResult m4 = conservation_monitor(orbit, f4);
  CHECK(m4.ptp_Hbar < m2.ptp_Hbar / 5.0);
  // O(h^6) at h = 0.05 alongside O(1) orbit coordinates.
  CHECK(m4.ptp_Hbar < 50.0 * std::pow(0.05, 6));
}

TEST_CASE("conservation monitor on a fixed point is exactly flat") {
  CanardParams p;
  p.h = 0.01;
  Trajectory traj = iterate(MapId::k2_kahan, p, {0.0, 0.0}, 0, 10);
  const FormalConservedQuantity f2 = derive_formal_invariant(2);
  const MonitorResult m = conservation_monitor(traj, f2);
  REQUIRE(m.rows.size() == 11);
  CHECK(m.rows.front().n == 0);
  CHECK(m.ptp_H == 0.0);
  CHECK(m.ptp_Hbar == 0.0);
  CHECK(m.rows[0].H == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.rows[0].Hbar ==
        doctest::Approx(0.25 + 0.0001 / 12.0).epsilon(1e-12));
}

TEST_CASE("Kahan orbit conserves, Euler orbit drifts") {
  const FormalConservedQuantity f2 = derive_formal_invariant(2);
  const MonitorResult kahan =
      conservation_monitor(p0_orbit(0.01, {0.0, -0.4}, 10000), f2);
  REQUIRE(kahan.rows.size() == 10001);  // no pole crossing truncated the orbit
  CHECK(kahan.ptp_Hbar < 1e-2 * kahan.ptp_H);
  CHECK(kahan.ptp_Hbar < 1e-6);

  CanardParams p;
  p.h = 0.01;
  const Trajectory euler = iterate(MapId::k2_euler, p, {0.0, -0.2}, 0, 10000);
  const MonitorResult m = conservation_monitor(euler, f2);
  REQUIRE(m.rows.size() == 10001);
  // Explicit Euler spirals outward; H falls from its interior value toward
  // the zero level of the separatrix, and keeps falling.
  const double h0 = m.rows.front().H;
  const double h1 = m.rows.back().H;
  CHECK(h0 - h1 > 1e-2);
  for (size_t k = 500; k < m.rows.size(); k += 500)
    CHECK(m.rows[k].H < m.rows[k - 500].H + 1e-12);
}

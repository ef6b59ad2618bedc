#pragma once

// Conserved-quantity machinery for the central-chart map P0 (the lambda = 0,
// rescaled Kahan map).  The exact flow it discretizes preserves
//     H(x, y) = 1/2 * exp(-2y) * (y - x^2 + 1/2),
// and P0 itself preserves the parabola  y = x^2 - 1/2 - h^2/8  exactly.  Away
// from that curve H is no longer invariant, but it admits a formal correction
// series
//     Hbar(x, y, h) = H(x, y) + sum_{j>=1} h^{2j} * exp(-2y) * p_j(x, y)
// whose truncations are preserved to successively higher order in h.  This
// header exposes the curve/orbit helpers, the exact series expansion of H
// along one step of P0, and the solver that produces the p_j by exact
// rational linear algebra.

#include <stdexcept>
#include <vector>

#include "canard/canard_maps.hpp"
#include "canard/polynomial.hpp"
#include "canard/series.hpp"

namespace canard {

// ---------------------------------------------------------------------------
// Scalar helpers
// ---------------------------------------------------------------------------

// H(x, y) = 1/2 * exp(-2y) * (y - x^2 + 1/2).
double conserved_H(double x, double y);

// The exact orbit of P0 on its invariant parabola:
//   gamma_h(n) = (h n / 2,  h^2 n^2 / 4 - 1/2 - h^2 / 8).
PlanarState gamma_h(long n, double h);

// phi_h(x, y) = x^2 - y - 1/2 - h^2/8; zero exactly on the invariant parabola.
double phi_h(double x, double y, double h);

// True when |phi_h| <= tol.
bool on_curve(double x, double y, double h, double tol);

// ---------------------------------------------------------------------------
// Exact rational arithmetic on the invariant curve
// ---------------------------------------------------------------------------

// Planar state with exact rational coordinates, used where float rounding
// would be amplified beyond any useful tolerance (the multiplier along the
// repelling branch grows like exp(h^2 n^2 / 2)).
struct RationalPlanarState {
  Rational x;
  Rational y;
};

// One step of P0 evaluated in exact rational arithmetic.  Throws
// std::domain_error when the state sits on the pole 1 - h x + h^2/4 = 0.
RationalPlanarState p0_step_exact(const RationalPlanarState& s, const Rational& h);

// phi_h in exact arithmetic.
Rational phi_h_exact(const RationalPlanarState& s, const Rational& h);

// ---------------------------------------------------------------------------
// Density transport and on-curve multiplier
// ---------------------------------------------------------------------------

struct DetRatioCheck {
  double det_closed_form;  // det of the closed-form Jacobian of P0
  double phi_ratio;        // phi_h(P0(z)) / phi_h(z)
};

// The Jacobian determinant of P0 transports the density phi_h:
// det DP0(z) = phi_h(P0(z)) / phi_h(z).  Returns both sides; throws
// std::domain_error when phi_h(z) = 0 (the ratio degenerates on the curve).
DetRatioCheck p0_det_ratio_check(double x, double y, double h);

enum class CurveMultiplierClass { contracting, neutral, expanding };

// Restricted to the invariant parabola, the x-derivative of the first
// component of P0 is the rational function f_h(x) / g_h(x) with
//   f_h(x) = -h^2 x^2 + (1 + h^2/4)^2
//   g_h(x) =  h^2 x^2 - x (2h + h^3/2) + (1 + h^2/4)^2.
// Both vanish at the pole x = (1 + h^2/4) / h; |f| < |g| on the attracting
// branch x < 0, |f| = |g| at x = 0, and |f| > |g| for x > 0.
struct CurveMultiplier {
  double f;
  double g;
  double value;  // f / g (infinite at the common root)
  double pole_x;
  CurveMultiplierClass cls;
};

CurveMultiplier derivative_classification(double x, double h);

// ---------------------------------------------------------------------------
// Formal invariant series
// ---------------------------------------------------------------------------

// A polynomial carrying an implicit exp(-2y) weight: represents
// exp(-2y) * poly(x, y).
struct ExpWeightedPoly {
  BivariatePolynomial poly;
};

// Truncated formal invariant.  corrections[j] is the polynomial part of the
// h^{2(j+1)} term, so order() == 2 * corrections.size().
struct FormalConservedQuantity {
  std::vector<ExpWeightedPoly> corrections;

  int order() const { return 2 * static_cast<int>(corrections.size()); }
};

// Raised when the transport equation for a correction term has no solution
// (the linear system is inconsistent even after enlarging the ansatz).
struct DerivationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact h-power series of exp(+2y) * H(P0(x, y, h)), i.e. H evaluated one
// step forward with the exp(-2y) weight factored out.  Coefficient of h^0 is
// the bracket (y - x^2 + 1/2)/2; coefficients of h^1 and h^2 vanish; h^3
// carries the leading defect x (x^2 + x^4 - 4 x^2 y + 3 y^2) / 6.
// Requires order >= 3.
HSeries expand_H_of_step(int order);

// Exact h-power series of the one-step defect of the corrected invariant:
//   exp(+2y) * [ Hbar(P0(z), h) - Hbar(z, h) ]
// truncated at the given order.  With corrections through h^{2i} present,
// every coefficient up to and including h^{2i+1} vanishes identically.
HSeries invariant_defect_series(const FormalConservedQuantity& fcq, int trunc);

// Solves for the correction p_i at order h^{2i}: the h^{2i+1} defect
// coefficient g of the series above must cancel against the transport term,
//   (x^2 - y) dp/dx + x dp/dy - 2 x p = -g.
// The polynomial ansatz has total degree 2(i+1), enlarged once by 2 if the
// system is inconsistent; free variables of the exact rational solve are set
// to zero.  `previous` must carry at least i-1 corrections.
ExpWeightedPoly solve_correction(int i, const FormalConservedQuantity& previous);

// Convenience: solve successively up to the requested (even) order.
FormalConservedQuantity derive_formal_invariant(int order);

// Hbar(x, y, h) truncated per fcq; with no corrections this is exactly H.
double hbar_eval(double x, double y, double h, const FormalConservedQuantity& fcq);

// ---------------------------------------------------------------------------
// Orbit monitoring
// ---------------------------------------------------------------------------

struct MonitorRow {
  long n;
  double H;
  double Hbar;
};

struct MonitorResult {
  std::vector<MonitorRow> rows;
  double ptp_H;     // peak-to-peak of H over the trajectory
  double ptp_Hbar;  // peak-to-peak of Hbar
};

MonitorResult conservation_monitor(const Trajectory& traj,
                                   const FormalConservedQuantity& fcq);

}  // namespace canard

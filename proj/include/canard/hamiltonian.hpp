#pragma once

#include <array>

#include "canard/canard_maps.hpp"

namespace canard {

// Coordinates (v, w) in which the rescaled planar flow becomes Hamiltonian.
// The flow on U = {2y - 2x^2 + 1 > 0} preserves the measure with density
// 1/(2y - 2x^2 + 1); rho transports that measure to Lebesgue measure dv dw
// (det Drho = 1/(2y - 2x^2 + 1)), so the transformed flow is area-preserving
// and admits the global Hamiltonian H_hat below.
struct HamiltonianState {
  double v = 0.0;
  double w = 0.0;
};

// rho(x, y) = (x/2 - x^2 + y, ln(2y - 2x^2 + 1)).
// Throws std::domain_error outside U.
HamiltonianState rho(double x, double y);

// Closed-form inverse of rho:
//   x = 2v - e^w + 1,
//   y = -(3/2) e^w + 1/2 + 4v (1 + v - e^w) + e^{2w}.
// Its image always lies in U (the density there equals e^w > 0).
PlanarState rho_inv(double v, double w);

// H_hat(v, w) = (1 + ln 4)/4 + e^{2w}/2 + 2v - w/4 + 2v^2 - (e^w/4)(8v + 3).
// Satisfies H_hat(rho(x, y)) = -(1/4) ln H(x, y) with the planar invariant
// H(x, y) = (1/2) e^{-2y} (y - x^2 + 1/2).
double H_hat(double v, double w);

// The transformed flow in Hamiltonian form:
//   v' = -dH_hat/dw = (1/4)(-4 e^{2w} + 1 + e^w (8v + 3)),
//   w' = +dH_hat/dv = 4v - 2 e^w + 2.
std::array<double, 2> hamiltonian_vf(double v, double w);

// One symplectic Euler step for H_hat:
//   v+ = v - h dH_hat/dw(v+, w),   w+ = w + h dH_hat/dv(v+, w).
// The scheme is linearly implicit in v+ and resolves in closed form:
//   v+ = (v - h e^{2w} + h/4 + (3h/4) e^w) / (1 - 2 h e^w),
//   w+ = w + h (2 + 4 v+ - 2 e^w).
// Throws SingularStepError when 1 - 2 h e^w vanishes.  The step has unit
// Jacobian determinant (area preservation).
HamiltonianState symplectic_euler_step(double v, double w, double h);

// Aggregate diagnostics over fixed probe sets, printed by the CLI:
//  - max |H_hat(rho(x,y)) + ln(H(x,y))/4| on a 20x20 grid of U,
//  - max |(2y - 2x^2 + 1) det Drho - 1| on the same grid (measure transport;
//    det Drho itself is 1 only where the density is 1),
//  - max |det - 1| of the symplectic Euler step at h = 0.01 (sampled),
//  - max |H_hat drift| over 10^4 steps, h = 0.01, from (v, w) = (0.1, 0),
//  - |det - 1| of the rescaled Kahan map conjugated through rho at a probe
//    point (h = 0.2, near the invariant parabola), where it exceeds 1e-3:
//    the conjugated map is measurably NOT area-preserving.
struct HamiltonianReport {
  double max_identity_residual = 0.0;
  double max_transport_defect = 0.0;
  double max_step_det_defect = 0.0;
  double hhat_drift = 0.0;
  double kahan_conjugate_det_defect = 0.0;
};
HamiltonianReport hamiltonian_report();

}  // namespace canard

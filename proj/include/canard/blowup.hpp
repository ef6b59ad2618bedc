#pragma once

#include <array>

#include "canard/canard_maps.hpp"

namespace canard {

// Entry/exit chart coordinates: x = r1 x1, y = r1^2, eps = r1^2 eps1,
// lambda = r1 lambda1, h = h1 / r1.
struct ChartPointK1 {
  double x1 = 0.0;
  double r1 = 0.0;       // >= 0
  double eps1 = 0.0;     // >= 0
  double lambda1 = 0.0;
  double h1 = 0.0;       // >= 0
};

// Central (rescaling) chart coordinates: x = r2 x2, y = r2^2 y2,
// eps = r2^2, lambda = r2 lambda2, h = h2 / r2.
struct ChartPointK2 {
  double x2 = 0.0;
  double y2 = 0.0;
  double r2 = 0.0;       // >= 0
  double lambda2 = 0.0;
  double h2 = 0.0;       // >= 0
};

// Validity box for the entry/exit chart; nu < 1 keeps the x1 map's
// denominator away from zero near the fixed points.
struct DomainD1 {
  double rho = 1.0;
  double delta = 1.0;
  double nu = 0.9;

  void validate() const;
  bool contains(const ChartPointK1& p) const;
  // Constructor-style factory: validates the domain bounds.
  ChartPointK1 checked_point(double x1, double r1, double eps1, double lambda1,
                             double h1) const;
};

struct OriginalPoint {
  double x = 0.0;
  double y = 0.0;
  double epsilon = 0.0;  // >= 0
  double lambda = 0.0;
  double h = 0.0;        // >= 0
};

// Chart transition K1 -> K2 (needs eps1 > 0):
// x2 = eps1^{-1/2} x1, y2 = eps1^{-1}, r2 = r1 eps1^{1/2},
// lambda2 = eps1^{-1/2} lambda1, h2 = h1 eps1^{1/2}.
ChartPointK2 kappa12(const ChartPointK1& p);

// Inverse transition K2 -> K1 (needs y2 > 0).
ChartPointK1 kappa21(const ChartPointK2& p);

// Blow-down to original coordinates; the radial coordinate must be positive
// because h is recovered as h1/r1 (resp. h2/r2).
OriginalPoint blowdown_k1(const ChartPointK1& p);
OriginalPoint blowdown_k2(const ChartPointK2& p);

// One iterate of the desingularized entry/exit-chart map. For r1 > 0 the
// step is computed by exact conjugation (blow down, apply the map in
// original coordinates, re-express); the image must satisfy y~ > 0 so that
// r~1 = sqrt(y~) exists. On {r1 = 0} the closed-form F/E/G expressions are
// used (the a-terms carry a factor r1 and vanish there).
ChartPointK1 k1_kahan_map(const ChartPointK1& p, const PerturbationCoeffs& a);

// Closed-form route for the unperturbed map (valid for any r1 when a = 0);
// kept separate as a cross-check of the conjugation route.
ChartPointK1 k1_kahan_map_unperturbed(const ChartPointK1& p);

struct K1FixedPoints {
  ChartPointK1 attracting;  // (-1, 0, 0, 0, h1)
  ChartPointK1 repelling;   // (+1, 0, 0, 0, h1)
  double alpha;             // x1-derivative at the attracting point
  double alpha_inverse;     // x1-derivative at the repelling point
};
K1FixedPoints k1_fixed_points(double h1);

// Finite-difference check of the linearization of the (x1, eps1, h1)
// subsystem on {r1 = lambda1 = 0} at the two fixed points. The distinguished
// tangent vectors (-1, 4, 1) and (1, 4, 1) are mapped to themselves plus a
// pure h1-shift of -2 h1^2 (attracting) resp. +2 h1^2 (repelling); the
// report carries the deviations from those images.
struct K1EigenReport {
  double h1 = 0.0;
  std::array<std::array<double, 3>, 3> jac_attracting{};
  std::array<std::array<double, 3>, 3> jac_repelling{};
  std::array<double, 3> deviation_attracting{};
  std::array<double, 3> deviation_repelling{};
  double max_deviation_attracting = 0.0;
  double max_deviation_repelling = 0.0;
};
K1EigenReport k1_jacobian_eigen_check(double h1);

}  // namespace canard

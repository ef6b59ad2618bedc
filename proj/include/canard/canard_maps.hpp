#pragma once

#include <optional>
#include <string>
#include <vector>

#include "canard/integrators.hpp"

namespace canard {

struct PlanarState {
  double x = 0.0;
  double y = 0.0;
};

// Perturbation coefficients of the quadratic fold model
//   x' = -y + x^2 + eps*a1*x - a2*x*y,
//   y' = eps*(x - lambda) + eps*a5*y + eps*a4*x^2.
// (The cubic slot of the general normal form is identically zero here.)
struct PerturbationCoeffs {
  double a1 = 0.0, a2 = 0.0, a4 = 0.0, a5 = 0.0;
  bool zero() const { return a1 == 0 && a2 == 0 && a4 == 0 && a5 == 0; }
};

struct CanardParams {
  double epsilon = 0.0;  // time-scale separation, >= 0
  double lambda = 0.0;   // bifurcation parameter
  double h = 0.01;       // step size, > 0
  double a1 = 0.0, a2 = 0.0, a4 = 0.0, a5 = 0.0;

  void validate() const;
  PerturbationCoeffs coeffs() const { return {a1, a2, a4, a5}; }
};

enum class MapId { kahan, euler, k2_kahan, k2_euler };

MapId map_id_from_string(const std::string& name);  // "kahan", "k2-kahan", ...
std::string to_string(MapId id);

struct Trajectory {
  std::vector<PlanarState> states;  // contiguous indices, ascending
  long start_index = 0;
  CanardParams params;
  // Indices at which iteration stopped because the step denominator changed
  // sign (or the linear solve hit a pole); at most one per direction.
  std::vector<long> singular_events;

  long end_index() const {
    return start_index + static_cast<long>(states.size()) - 1;
  }
  const PlanarState& at(long n) const;
};

// The fold model in original coordinates as a quadratic field.
QuadraticVectorField canard_field(const CanardParams& p);

// The rescaled field in the central chart: x' = -y + x^2 + r(a1 x - a2 x y),
// y' = x - lambda + r(a4 x^2 + a5 y). r enters only through the a-terms.
QuadraticVectorField k2_field(double lambda2, double r2,
                              const PerturbationCoeffs& a);

// One step of the linearly implicit discretization of the fold model in
// original coordinates. For a = 0 this is the closed-form birational map; for
// nonzero a it is evaluated through the generic stepper (hand-expanding the
// closed form for general a is error-prone and buys nothing).
PlanarState canard_kahan_map(const CanardParams& p, const PlanarState& s);

PlanarState canard_euler_map(const CanardParams& p, const PlanarState& s);

// Rescaled-chart steps; at r2 = lambda2 = 0, a = 0 the map reduces to the
// unperturbed central-chart map with invariant parabola y = x^2 - 1/2 - h^2/8.
PlanarState k2_kahan_map(double h, double lambda2, double r2,
                         const PerturbationCoeffs& a, const PlanarState& s);
PlanarState k2_euler_map(double h, double lambda2, double r2,
                         const PlanarState& s);

// Step denominator det(Id - (h/2) Df(z)) of the implicit solve; iteration
// stops when its sign flips (the orbit has crossed the pole of the map).
double kahan_step_denominator(MapId id, const CanardParams& p,
                              const PlanarState& s);

struct UnsupportedOperation : std::logic_error {
  using std::logic_error::logic_error;
};

// Iterate the chosen map over the index range [n_from, n_to] with state s0 at
// index 0 (n_from <= 0 <= n_to). Backward iteration uses the birational
// inverse and is refused for the (non-invertible) Euler maps. For the chart
// maps, params are read in chart units: h = chart step, lambda = chart
// lambda, r2 = sqrt(epsilon).
Trajectory iterate(MapId id, const CanardParams& p, const PlanarState& s0,
                   long n_from, long n_to);

// Both roots of the on-manifold invariance relation of the slow subsystem,
//   xt^2 - (h/2) xt = x^2 + (h/2) x,
// solved as a quadratic in xt: {x + h/2, -x}. Only the first continues the
// slow dynamics; the second is an artefact of the invariance equation being
// underdetermined.
struct SlowRoots {
  double advance;   // root x + h/2
  double artefact;  // root -x
};
SlowRoots slow_subsystem_roots(double x, double h);

}  // namespace canard

#include "canard/canard_maps.hpp"

#include <cmath>
#include <stdexcept>

namespace canard {

void CanardParams::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (!(h > 0.0)) throw std::invalid_argument("h must be > 0");
  for (double v : {epsilon, lambda, h, a1, a2, a4, a5})
    if (!std::isfinite(v))
      throw std::invalid_argument("parameters must be finite");
}

MapId map_id_from_string(const std::string& name) {
  if (name == "kahan") return MapId::kahan;
  if (name == "euler") return MapId::euler;
  if (name == "k2-kahan") return MapId::k2_kahan;
  if (name == "k2-euler") return MapId::k2_euler;
  throw std::invalid_argument("unknown map id: " + name);
}

std::string to_string(MapId id) {
  switch (id) {
    case MapId::kahan:
      return "kahan";
    case MapId::euler:
      return "euler";
    case MapId::k2_kahan:
      return "k2-kahan";
    case MapId::k2_euler:
      return "k2-euler";
  }
  return "?";
}

const PlanarState& Trajectory::at(long n) const {
  const long k = n - start_index;
  if (k < 0 || k >= static_cast<long>(states.size()))
    throw std::out_of_range("trajectory index out of range");
  return states[static_cast<size_t>(k)];
}

QuadraticVectorField canard_field(const CanardParams& p) {
  QuadraticVectorField vf = QuadraticVectorField::zero(2);
  // x' = x^2 - y + eps*a1*x - a2*x*y
  vf.quadratic[0][0][0] = 1.0;
  vf.quadratic[0][0][1] = vf.quadratic[0][1][0] = -0.5 * p.a2;
  vf.linear[0][0] = p.epsilon * p.a1;
  vf.linear[0][1] = -1.0;
  // y' = eps*(x - lambda) + eps*a5*y + eps*a4*x^2
  vf.quadratic[1][0][0] = p.epsilon * p.a4;
  vf.linear[1][0] = p.epsilon;
  vf.linear[1][1] = p.epsilon * p.a5;
  vf.constant[1] = -p.epsilon * p.lambda;
  return vf;
}

QuadraticVectorField k2_field(double lambda2, double r2,
                              const PerturbationCoeffs& a) {
  QuadraticVectorField vf = QuadraticVectorField::zero(2);
  // x' = x^2 - y + r(a1*x - a2*x*y)
  vf.quadratic[0][0][0] = 1.0;
  vf.quadratic[0][0][1] = vf.quadratic[0][1][0] = -0.5 * r2 * a.a2;
  vf.linear[0][0] = r2 * a.a1;
  vf.linear[0][1] = -1.0;
  // y' = x - lambda + r(a4*x^2 + a5*y)
  vf.quadratic[1][0][0] = r2 * a.a4;
  vf.linear[1][0] = 1.0;
  vf.linear[1][1] = r2 * a.a5;
  vf.constant[1] = -lambda2;
  return vf;
}

namespace {

void check_denominator(double den, double scale, const PlanarState& s,
                       double h) {
  if (std::fabs(den) < 1e-13 * std::max(1.0, scale))
    throw SingularStepError({s.x, s.y}, h);
}

// Closed form of the unperturbed map in original coordinates (signed h so the
// same formula serves as the inverse).
PlanarState kahan_orig_closed(double h, double eps, double lam,
                              const PlanarState& s) {
  const double x = s.x, y = s.y;
  const double den = 1.0 - h * x + 0.25 * h * h * eps;
  check_denominator(den, std::fabs(h * x) + 0.25 * h * h * eps, s, h);
  PlanarState out;
  out.x = (x - h * y - 0.25 * h * h * eps * x + 0.5 * h * h * lam * eps) / den;
  out.y = (y - h * y * x - 0.5 * h * h * eps * x * x - h * lam * eps +
           h * h * x * lam * eps + h * eps * x - 0.25 * h * h * eps * y) /
          den;
  return out;
}

// Closed form of the unperturbed rescaled-chart map (lambda kept, a = 0).
PlanarState k2_kahan_closed(double h, double lam, const PlanarState& s) {
  const double x = s.x, y = s.y;
  const double den = 1.0 - h * x + 0.25 * h * h;
  check_denominator(den, std::fabs(h * x) + 0.25 * h * h, s, h);
  PlanarState out;
  out.x = (x - h * y - 0.25 * h * h * x + 0.5 * h * h * lam) / den;
  out.y = (y - h * y * x - 0.5 * h * h * x * x - h * lam + h * h * x * lam +
           h * x - 0.25 * h * h * y) /
          den;
  return out;
}

PlanarState generic_kahan(const QuadraticVectorField& vf, const PlanarState& s,
                          double h) {
  const Vec out = kahan_step(vf, {s.x, s.y}, h);
  return {out[0], out[1]};
}

PlanarState step_signed(MapId id, const CanardParams& p, const PlanarState& s,
                        double h) {
  switch (id) {
    case MapId::kahan:
      if (p.coeffs().zero())
        return kahan_orig_closed(h, p.epsilon, p.lambda, s);
      return generic_kahan(canard_field(p), s, h);
    case MapId::k2_kahan: {
      const double r2 = std::sqrt(p.epsilon);
      if (p.coeffs().zero()) return k2_kahan_closed(h, p.lambda, s);
      return generic_kahan(k2_field(p.lambda, r2, p.coeffs()), s, h);
    }
    case MapId::euler: {
      if (h < 0) throw UnsupportedOperation("Euler map is not invertible");
      PlanarState out;
      out.x = s.x + h * (s.x * s.x - s.y + p.epsilon * p.a1 * s.x -
                         p.a2 * s.x * s.y);
      out.y = s.y + h * p.epsilon *
                        (s.x - p.lambda + p.a5 * s.y + p.a4 * s.x * s.x);
      return out;
    }
    case MapId::k2_euler:
      if (h < 0) throw UnsupportedOperation("Euler map is not invertible");
      return k2_euler_map(h, p.lambda, std::sqrt(p.epsilon), s);
  }
  throw std::logic_error("unreachable");
}

double denominator_signed(MapId id, const CanardParams& p,
                          const PlanarState& s, double h) {
  QuadraticVectorField vf;
  switch (id) {
    case MapId::kahan:
      vf = canard_field(p);
      break;
    case MapId::k2_kahan:
      vf = k2_field(p.lambda, std::sqrt(p.epsilon), p.coeffs());
      break;
    default:
      return 1.0;  // explicit maps have no pole
  }
  const Mat J = vf.jacobian({s.x, s.y});
  const double a00 = 1.0 - 0.5 * h * J[0][0], a01 = -0.5 * h * J[0][1];
  const double a10 = -0.5 * h * J[1][0], a11 = 1.0 - 0.5 * h * J[1][1];
  return a00 * a11 - a01 * a10;
}

}  // namespace

PlanarState canard_kahan_map(const CanardParams& p, const PlanarState& s) {
  p.validate();
  return step_signed(MapId::kahan, p, s, p.h);
}

PlanarState canard_euler_map(const CanardParams& p, const PlanarState& s) {
  p.validate();
  return step_signed(MapId::euler, p, s, p.h);
}

PlanarState k2_kahan_map(double h, double lambda2, double r2,
                         const PerturbationCoeffs& a, const PlanarState& s) {
  if (a.zero()) return k2_kahan_closed(h, lambda2, s);
  return generic_kahan(k2_field(lambda2, r2, a), s, h);
}

PlanarState k2_euler_map(double h, double lambda2, double r2,
                         const PlanarState& s) {
  (void)r2;  // the unperturbed rescaled field does not depend on r
  PlanarState out;
  out.x = s.x + h * (s.x * s.x - s.y);
  out.y = s.y + h * (s.x - lambda2);
  return out;
}

double kahan_step_denominator(MapId id, const CanardParams& p,
                              const PlanarState& s) {
  return denominator_signed(id, p, s, p.h);
}

Trajectory iterate(MapId id, const CanardParams& p, const PlanarState& s0,
                   long n_from, long n_to) {
  p.validate();
  if (n_from > 0 || n_to < 0)
    throw std::invalid_argument("iterate requires n_from <= 0 <= n_to");
  const bool is_euler = (id == MapId::euler || id == MapId::k2_euler);
  if (n_from < 0 && is_euler)
    throw UnsupportedOperation(
        "backward iteration is unsupported for the non-invertible Euler maps");

  Trajectory traj;
  traj.params = p;

  // One directional sweep; returns states from index +-1 outward, stopping
  // when the step denominator changes sign relative to its value at s0 (the
  // orbit has crossed the pole), when the solve itself is singular, or when
  // the state stops being finite.
  auto sweep = [&](double h_signed, long count,
                   std::vector<PlanarState>& out) -> std::optional<long> {
    const double den0 = denominator_signed(id, p, s0, h_signed);
    PlanarState s = s0;
    for (long k = 1; k <= count; ++k) {
      const long index = (h_signed > 0) ? k : -k;
      try {
        s = step_signed(id, p, s, h_signed);
      } catch (const SingularStepError&) {
        return index;
      }
      if (!std::isfinite(s.x) || !std::isfinite(s.y)) return index;
      if (denominator_signed(id, p, s, h_signed) * den0 < 0) return index;
      out.push_back(s);
    }
    return std::nullopt;
  };

  std::vector<PlanarState> back, fwd;
  std::optional<long> sing_back, sing_fwd;
  if (n_from < 0) sing_back = sweep(-p.h, -n_from, back);
  if (n_to > 0) sing_fwd = sweep(p.h, n_to, fwd);

  traj.start_index = -static_cast<long>(back.size());
  traj.states.reserve(back.size() + 1 + fwd.size());
  for (auto it = back.rbegin(); it != back.rend(); ++it)
    traj.states.push_back(*it);
  traj.states.push_back(s0);
  for (const auto& s : fwd) traj.states.push_back(s);

  if (sing_back) traj.singular_events.push_back(*sing_back);
  if (sing_fwd) traj.singular_events.push_back(*sing_fwd);
  return traj;
}

SlowRoots slow_subsystem_roots(double x, double h) {
  // xt^2 - (h/2) xt - (x^2 + (h/2) x) = 0, solved by the quadratic formula;
  // the discriminant is the perfect square (2x + h/2)^2.
  const double half_h = 0.5 * h;
  const double disc = 0.25 * half_h * half_h + x * x + half_h * x;
  const double sq = std::sqrt(std::max(disc, 0.0));
  const double root_plus = 0.5 * half_h + sq;
  const double root_minus = 0.5 * half_h - sq;
  SlowRoots roots{};
  if (2.0 * x + half_h >= 0.0) {
    roots.advance = root_plus;
    roots.artefact = root_minus;
  } else {
    roots.advance = root_minus;
    roots.artefact = root_plus;
  }
  return roots;
}

}  // namespace canard

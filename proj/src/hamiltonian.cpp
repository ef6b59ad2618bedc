#include "canard/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

#include "canard/conserved.hpp"
#include "canard/integrators.hpp"

namespace canard {

HamiltonianState rho(double x, double y) {
  const double density = 2.0 * y - 2.0 * x * x + 1.0;
  if (!(density > 0.0))
    throw std::domain_error("rho: point outside U = {2y - 2x^2 + 1 > 0}");
  return {0.5 * x - x * x + y, std::log(density)};
}

PlanarState rho_inv(double v, double w) {
  const double ew = std::exp(w);
  PlanarState z;
  z.x = 2.0 * v - ew + 1.0;
  z.y = -1.5 * ew + 0.5 + 4.0 * v * (1.0 + v - ew) + ew * ew;
  return z;
}

double H_hat(double v, double w) {
  const double ew = std::exp(w);
  return (1.0 + std::log(4.0)) / 4.0 + ew * ew / 2.0 + 2.0 * v - w / 4.0 +
         2.0 * v * v - ew * (8.0 * v + 3.0) / 4.0;
}

std::array<double, 2> hamiltonian_vf(double v, double w) {
  const double ew = std::exp(w);
  return {0.25 * (-4.0 * ew * ew + 1.0 + ew * (8.0 * v + 3.0)),
          4.0 * v - 2.0 * ew + 2.0};
}

HamiltonianState symplectic_euler_step(double v, double w, double h) {
  const double ew = std::exp(w);
  const double den = 1.0 - 2.0 * h * ew;
  if (std::fabs(den) < 1e-13 * std::max(1.0, std::fabs(2.0 * h * ew)))
    throw SingularStepError({v, w}, h);
  HamiltonianState next;
  next.v = (v - h * ew * ew + h / 4.0 + 3.0 * h / 4.0 * ew) / den;
  next.w = w + h * (2.0 + 4.0 * next.v - 2.0 * ew);
  return next;
}

namespace {

double planar_H(double x, double y) {
  return 0.5 * std::exp(-2.0 * y) * (y - x * x + 0.5);
}

double density(double x, double y) { return 2.0 * y - 2.0 * x * x + 1.0; }

// Finite-difference Jacobian determinant of a plane map.
template <typename M>
double fd_det(M m, double u0, double u1, double d) {
  const auto pu = m(u0 + d, u1), mu = m(u0 - d, u1);
  const auto pv = m(u0, u1 + d), mv = m(u0, u1 - d);
  const double j00 = (pu[0] - mu[0]) / (2.0 * d);
  const double j10 = (pu[1] - mu[1]) / (2.0 * d);
  const double j01 = (pv[0] - mv[0]) / (2.0 * d);
  const double j11 = (pv[1] - mv[1]) / (2.0 * d);
  return j00 * j11 - j01 * j10;
}

}  // namespace

HamiltonianReport hamiltonian_report() {
  HamiltonianReport rep;

  auto rho_pair = [](double x, double y) {
    const HamiltonianState s = rho(x, y);
    return std::array<double, 2>{s.v, s.w};
  };
  for (int i = 0; i < 20; ++i) {
    const double x = -0.7 + 1.4 * i / 19.0;
    for (int j = 0; j < 20; ++j) {
      const double y = x * x - 0.5 + 0.02 + 2.0 * j / 19.0;
      const HamiltonianState s = rho(x, y);
      rep.max_identity_residual =
          std::max(rep.max_identity_residual,
                   std::fabs(H_hat(s.v, s.w) + 0.25 * std::log(planar_H(x, y))));
      rep.max_transport_defect =
          std::max(rep.max_transport_defect,
                   std::fabs(density(x, y) * fd_det(rho_pair, x, y, 1e-6) - 1.0));
    }
  }

  auto step_pair = [](double v, double w) {
    const HamiltonianState s = symplectic_euler_step(v, w, 0.01);
    return std::array<double, 2>{s.v, s.w};
  };
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double v = -0.3 + 0.6 * i / 4.0;
      const double w = -0.5 + 1.0 * j / 4.0;
      rep.max_step_det_defect =
          std::max(rep.max_step_det_defect,
                   std::fabs(fd_det(step_pair, v, w, 1e-6) - 1.0));
    }
  }

  {
    double v = 0.1, w = 0.0;
    const double h0 = H_hat(v, w);
    for (int n = 0; n < 10000; ++n) {
      const HamiltonianState s = symplectic_euler_step(v, w, 0.01);
      v = s.v;
      w = s.w;
      rep.hhat_drift = std::max(rep.hhat_drift, std::fabs(H_hat(v, w) - h0));
    }
  }

  {
    const double h = 0.2;
    auto conj = [&](double v, double w) {
      const PlanarState z = rho_inv(v, w);
      const PlanarState t = k2_kahan_map(h, 0.0, 0.0, PerturbationCoeffs{}, z);
      const HamiltonianState s = rho(t.x, t.y);
      return std::array<double, 2>{s.v, s.w};
    };
    const HamiltonianState at = rho(0.5, -0.1);
    rep.kahan_conjugate_det_defect =
        std::fabs(fd_det(conj, at.v, at.w, 1e-5) - 1.0);
  }

  return rep;
}

}  // namespace canard

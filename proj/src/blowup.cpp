#include "canard/blowup.hpp"

#include <cmath>
#include <stdexcept>

namespace canard {

void DomainD1::validate() const {
  if (!(rho > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("domain bounds rho, delta must be positive");
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument("domain bound nu must lie in (0, 1)");
}

bool DomainD1::contains(const ChartPointK1& p) const {
  return p.r1 >= 0.0 && p.r1 <= rho && p.eps1 >= 0.0 && p.eps1 <= delta &&
         p.h1 >= 0.0 && p.h1 <= nu;
}

ChartPointK1 DomainD1::checked_point(double x1, double r1, double eps1,
                                     double lambda1, double h1) const {
  validate();
  ChartPointK1 p{x1, r1, eps1, lambda1, h1};
  if (!contains(p))
    throw std::domain_error("chart point outside the K1 domain box");
  return p;
}

ChartPointK2 kappa12(const ChartPointK1& p) {
  if (!(p.eps1 > 0.0))
    throw std::domain_error("kappa12 requires eps1 > 0");
  const double s = std::sqrt(p.eps1);
  return ChartPointK2{p.x1 / s, 1.0 / p.eps1, p.r1 * s, p.lambda1 / s,
                      p.h1 * s};
}

ChartPointK1 kappa21(const ChartPointK2& p) {
  if (!(p.y2 > 0.0))
    throw std::domain_error("kappa21 requires y2 > 0");
  const double s = std::sqrt(p.y2);
  return ChartPointK1{p.x2 / s, p.r2 * s, 1.0 / p.y2, p.lambda2 / s,
                      p.h2 * s};
}

OriginalPoint blowdown_k1(const ChartPointK1& p) {
  if (!(p.r1 > 0.0))
    throw std::domain_error("blowdown_k1 requires r1 > 0 to recover h");
  return OriginalPoint{p.r1 * p.x1, p.r1 * p.r1, p.r1 * p.r1 * p.eps1,
                       p.r1 * p.lambda1, p.h1 / p.r1};
}

OriginalPoint blowdown_k2(const ChartPointK2& p) {
  if (!(p.r2 > 0.0))
    throw std::domain_error("blowdown_k2 requires r2 > 0 to recover h");
  return OriginalPoint{p.r2 * p.x2, p.r2 * p.r2 * p.y2, p.r2 * p.r2,
                       p.r2 * p.lambda2, p.h2 / p.r2};
}

namespace {

// The desingularized map on {r1 = 0} is built from
//   F = 1 - h1 x1 + h1 eps1 x1 - (h1^2/2) eps1 x1^2 - h1 l1 eps1
//       + h1^2 x1 l1 eps1 - (h1^2/4) eps1,
//   E = 1 - h1 x1 + (h1^2/4) eps1,   G = F / E.
double k1_F(double x1, double e1, double l1, double h1) {
  return 1.0 - h1 * x1 + h1 * e1 * x1 - 0.5 * h1 * h1 * e1 * x1 * x1 -
         h1 * l1 * e1 + h1 * h1 * x1 * l1 * e1 - 0.25 * h1 * h1 * e1;
}

double k1_E(double x1, double e1, double h1) {
  return 1.0 - h1 * x1 + 0.25 * h1 * h1 * e1;
}

}  // namespace

ChartPointK1 k1_kahan_map_unperturbed(const ChartPointK1& p) {
  const double F = k1_F(p.x1, p.eps1, p.lambda1, p.h1);
  const double E = k1_E(p.x1, p.eps1, p.h1);
  if (!(F > 0.0) || !(E > 0.0))
    throw std::domain_error(
        "desingularized step leaves the chart: F, E must stay positive");
  const double G = F / E;
  const double sqrtG = std::sqrt(G);
  ChartPointK1 out;
  out.x1 = (p.x1 - p.h1 - 0.25 * p.h1 * p.h1 * p.eps1 * p.x1 +
            0.5 * p.h1 * p.h1 * p.lambda1 * p.eps1) /
           std::sqrt(F * E);
  out.r1 = p.r1 * sqrtG;
  out.eps1 = p.eps1 / G;
  out.lambda1 = p.lambda1 / sqrtG;
  out.h1 = p.h1 * sqrtG;
  return out;
}

ChartPointK1 k1_kahan_map(const ChartPointK1& p, const PerturbationCoeffs& a) {
  if (p.r1 == 0.0) {
    // The a-terms enter with a factor r1 and vanish identically here.
    return k1_kahan_map_unperturbed(p);
  }
  const OriginalPoint z = blowdown_k1(p);
  CanardParams params;
  params.epsilon = z.epsilon;
  params.lambda = z.lambda;
  params.h = z.h;
  params.a1 = a.a1;
  params.a2 = a.a2;
  params.a4 = a.a4;
  params.a5 = a.a5;
  const PlanarState image = canard_kahan_map(params, {z.x, z.y});
  if (!(image.y > 0.0))
    throw std::domain_error(
        "image left the chart: y~ <= 0, no radial coordinate");
  const double r1 = std::sqrt(image.y);
  return ChartPointK1{image.x / r1, r1, z.epsilon / image.y, z.lambda / r1,
                      z.h * r1};
}

K1FixedPoints k1_fixed_points(double h1) {
  if (!(h1 >= 0.0 && h1 < 1.0))
    throw std::domain_error("fixed-point analysis needs 0 <= h1 < 1");
  K1FixedPoints fp;
  fp.attracting = ChartPointK1{-1.0, 0.0, 0.0, 0.0, h1};
  fp.repelling = ChartPointK1{1.0, 0.0, 0.0, 0.0, h1};
  fp.alpha = (1.0 - h1) / (1.0 + h1);
  fp.alpha_inverse = (1.0 + h1) / (1.0 - h1);
  return fp;
}

K1EigenReport k1_jacobian_eigen_check(double h1) {
  if (!(h1 > 0.0 && h1 < 1.0))
    throw std::domain_error("eigen check needs 0 < h1 < 1");

  // (x1, eps1, h1) subsystem on {r1 = lambda1 = 0}.
  auto submap = [](const std::array<double, 3>& v) -> std::array<double, 3> {
    ChartPointK1 p{v[0], 0.0, v[1], 0.0, v[2]};
    ChartPointK1 q = k1_kahan_map_unperturbed(p);
    return {q.x1, q.eps1, q.h1};
  };

  auto fd_jacobian = [&](const std::array<double, 3>& at) {
    std::array<std::array<double, 3>, 3> J{};
    for (int c = 0; c < 3; ++c) {
      const double step = 1e-6 * std::max(1.0, std::fabs(at[c]));
      std::array<double, 3> plus = at, minus = at;
      plus[c] += step;
      minus[c] -= step;
      const auto fp = submap(plus), fm = submap(minus);
      for (int r = 0; r < 3; ++r) J[r][c] = (fp[r] - fm[r]) / (2.0 * step);
    }
    return J;
  };

  K1EigenReport rep;
  rep.h1 = h1;
  const std::array<double, 3> pa{-1.0, 0.0, h1}, pr{1.0, 0.0, h1};
  rep.jac_attracting = fd_jacobian(pa);
  rep.jac_repelling = fd_jacobian(pr);

  const std::array<double, 3> va{-1.0, 4.0, 1.0}, vr{1.0, 4.0, 1.0};
  const std::array<double, 3> shift_a{0.0, 0.0, -2.0 * h1 * h1};
  const std::array<double, 3> shift_r{0.0, 0.0, +2.0 * h1 * h1};
  for (int r = 0; r < 3; ++r) {
    double ja = 0.0, jr = 0.0;
    for (int c = 0; c < 3; ++c) {
      ja += rep.jac_attracting[r][c] * va[c];
      jr += rep.jac_repelling[r][c] * vr[c];
    }
    rep.deviation_attracting[r] = ja - (va[r] + shift_a[r]);
    rep.deviation_repelling[r] = jr - (vr[r] + shift_r[r]);
    rep.max_deviation_attracting = std::max(
        rep.max_deviation_attracting, std::fabs(rep.deviation_attracting[r]));
    rep.max_deviation_repelling = std::max(rep.max_deviation_repelling,
                                           std::fabs(rep.deviation_repelling[r]));
  }
  return rep;
}

}  // namespace canard

#include "canard/conserved.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "canard/melnikov.hpp"

namespace canard {

namespace {

BivariatePolynomial mono(int i, int j, const Rational& c = Rational(1)) {
  return BivariatePolynomial::monomial(i, j, c);
}

// (y - x^2 + 1/2) / 2, the polynomial part of H.
BivariatePolynomial bracket_poly() {
  BivariatePolynomial b(rat(1, 4));
  b += mono(0, 1, rat(1, 2));
  b += mono(2, 0, rat(-1, 2));
  return b;
}

// Degree ceiling for series scratch work.  Compositions p_j(X, Y) inflate
// intermediate degrees well past the default cap before truncation prunes
// them again.
constexpr int kScratchDegreeCap = 64;

struct StepSeries {
  HSeries X, Y;
};

// The closed-form step written as exact h-series: component numerators times
// the inverted denominator 1 - h x + h^2/4.
StepSeries p0_series(int trunc) {
  HSeries num_x(trunc), num_y(trunc), den(trunc);
  num_x[0] = mono(1, 0);
  if (trunc >= 1) num_x[1] = mono(0, 1, rat(-1));
  if (trunc >= 2) num_x[2] = mono(1, 0, rat(-1, 4));

  num_y[0] = mono(0, 1);
  if (trunc >= 1) num_y[1] = mono(1, 0) - mono(1, 1);
  if (trunc >= 2) num_y[2] = mono(2, 0, rat(-1, 2)) + mono(0, 1, rat(-1, 4));

  den[0] = BivariatePolynomial(Rational(1));
  if (trunc >= 1) den[1] = mono(1, 0, rat(-1));
  if (trunc >= 2) den[2] = BivariatePolynomial(rat(1, 4));

  const HSeries dinv = series_inverse(den);
  return {series_mul(num_x, dinv), series_mul(num_y, dinv)};
}

// p(X(h), Y(h)) as a truncated series, with cached component powers.
HSeries compose(const BivariatePolynomial& p, const StepSeries& s, int trunc) {
  int max_i = 0, max_j = 0;
  for (const auto& [m, c] : p.terms()) {
    max_i = std::max(max_i, m.i);
    max_j = std::max(max_j, m.j);
  }
  std::vector<HSeries> xp, yp;
  xp.emplace_back(BivariatePolynomial(Rational(1)), trunc, 0);
  for (int k = 1; k <= max_i; ++k) xp.push_back(series_mul(xp.back(), s.X));
  yp.emplace_back(BivariatePolynomial(Rational(1)), trunc, 0);
  for (int k = 1; k <= max_j; ++k) yp.push_back(series_mul(yp.back(), s.Y));

  HSeries out(trunc);
  for (const auto& [m, c] : p.terms())
    out += series_mul(xp[m.i], yp[m.j]) * c;
  return out;
}

// exp(+2y) * Hbar(P0(z, h), h) as an exact series.
HSeries corrected_after_step(const FormalConservedQuantity& fcq, int trunc) {
  const StepSeries s = p0_series(trunc);
  const HSeries delta = s.Y - HSeries(mono(0, 1), trunc, 0);
  const HSeries weight = series_exp(delta * rat(-2));

  HSeries acc = s.Y - series_mul(s.X, s.X);
  acc += HSeries(BivariatePolynomial(rat(1, 2)), trunc, 0);
  acc *= rat(1, 2);
  for (size_t j = 0; j < fcq.corrections.size(); ++j) {
    const int shift = 2 * (static_cast<int>(j) + 1);
    if (shift > trunc) break;
    acc += compose(fcq.corrections[j].poly, s, trunc).shifted(shift);
  }
  return series_mul(weight, acc);
}

// Transport operator L(p) = (x^2 - y) p_x + x p_y - 2 x p; the directional
// derivative of exp(-2y) p along the h^1 flow of the step, weight included.
BivariatePolynomial transport(const BivariatePolynomial& p) {
  BivariatePolynomial out =
      (mono(2, 0) - mono(0, 1)) * poly_partial(p, Var::x);
  out += mono(1, 0) * poly_partial(p, Var::y);
  out -= mono(1, 0, Rational(2)) * p;
  return out;
}

// Exact rational solve of L(p) = -g over the monomials of total degree
// <= deg, graded order, free variables zero.
BivariatePolynomial solve_transport(const BivariatePolynomial& g, int deg) {
  std::vector<Monomial> vars;
  for (int d = 0; d <= deg; ++d)
    for (int i = 0; i <= d; ++i) vars.push_back({i, d - i});
  const int cols = static_cast<int>(vars.size());

  std::vector<BivariatePolynomial> images(cols);
  std::map<Monomial, int> row_of;
  for (int k = 0; k < cols; ++k) {
    images[k] = transport(mono(vars[k].i, vars[k].j));
    for (const auto& [m, c] : images[k].terms()) row_of.emplace(m, 0);
  }
  for (const auto& [m, c] : g.terms()) row_of.emplace(m, 0);
  int rows = 0;
  for (auto& [m, idx] : row_of) idx = rows++;

  // Augmented matrix [A | -g].
  std::vector<std::vector<Rational>> a(
      rows, std::vector<Rational>(cols + 1, Rational(0)));
  for (int k = 0; k < cols; ++k)
    for (const auto& [m, c] : images[k].terms()) a[row_of[m]][k] = c;
  for (const auto& [m, c] : g.terms()) a[row_of[m]][cols] = -c;

  int rank = 0;
  std::vector<int> pivot_col;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pr = -1;
    for (int r = rank; r < rows; ++r)
      if (a[r][col] != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(a[pr], a[rank]);
    const Rational scale = Rational(1) / a[rank][col];
    for (int c2 = col; c2 <= cols; ++c2) a[rank][c2] *= scale;
    for (int r = 0; r < rows; ++r) {
      if (r == rank || a[r][col] == 0) continue;
      const Rational f = a[r][col];
      for (int c2 = col; c2 <= cols; ++c2) a[r][c2] -= f * a[rank][c2];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  for (int r = rank; r < rows; ++r)
    if (a[r][cols] != 0)
      throw DerivationError("transport equation inconsistent at ansatz degree " +
                            std::to_string(deg));

  BivariatePolynomial p;
  for (int r = 0; r < rank; ++r)
    if (a[r][cols] != 0)
      p.add_term(vars[pivot_col[r]].i, vars[pivot_col[r]].j, a[r][cols]);

  if (!(transport(p) + g).is_zero())
    throw DerivationError("transport solve failed exact verification");
  return p;
}

}  // namespace

double conserved_H(double x, double y) {
  return 0.5 * std::exp(-2.0 * y) * (y - x * x + 0.5);
}

PlanarState gamma_h(long n, double h) {
  const double t = static_cast<double>(n);
  return {h * t / 2.0, h * h * t * t / 4.0 - 0.5 - h * h / 8.0};
}

double phi_h(double x, double y, double h) {
  return x * x - y - 0.5 - h * h / 8.0;
}

bool on_curve(double x, double y, double h, double tol) {
  return std::fabs(phi_h(x, y, h)) <= tol;
}

RationalPlanarState p0_step_exact(const RationalPlanarState& s,
                                  const Rational& h) {
  const Rational den = 1 - h * s.x + h * h * rat(1, 4);
  if (den == 0)
    throw std::domain_error("p0_step_exact: state lies on the step pole");
  const Rational xt = (s.x - h * s.y - h * h * rat(1, 4) * s.x) / den;
  const Rational yt = (s.y - h * s.x * s.y - h * h * rat(1, 2) * s.x * s.x +
                       h * s.x - h * h * rat(1, 4) * s.y) /
                      den;
  return {xt, yt};
}

Rational phi_h_exact(const RationalPlanarState& s, const Rational& h) {
  return s.x * s.x - s.y - rat(1, 2) - h * h * rat(1, 8);
}

DetRatioCheck p0_det_ratio_check(double x, double y, double h) {
  const double phi = phi_h(x, y, h);
  // Degenerate when phi vanishes to within rounding of the terms that
  // produced it; the ratio carries no information there.
  const double scale = x * x + std::fabs(y) + 0.5 + h * h / 8.0;
  if (std::fabs(phi) <= 16.0 * std::numeric_limits<double>::epsilon() * scale)
    throw std::domain_error(
        "p0_det_ratio_check: density ratio degenerates on the invariant curve");
  const PlanarState img =
      k2_kahan_map(h, 0.0, 0.0, PerturbationCoeffs{0.0, 0.0, 0.0, 0.0}, {x, y});
  return {p0_jacobian(x, y, h).det(), phi_h(img.x, img.y, h) / phi};
}

CurveMultiplier derivative_classification(double x, double h) {
  const double c = 1.0 + h * h / 4.0;
  CurveMultiplier m;
  m.f = -h * h * x * x + c * c;
  m.g = h * h * x * x - x * (2.0 * h + h * h * h / 2.0) + c * c;
  m.value = m.f / m.g;
  m.pole_x = c / h;
  const double af = std::fabs(m.f);
  const double ag = std::fabs(m.g);
  m.cls = af < ag   ? CurveMultiplierClass::contracting
          : af == ag ? CurveMultiplierClass::neutral
                     : CurveMultiplierClass::expanding;
  return m;
}

HSeries expand_H_of_step(int order) {
  if (order < 3)
    throw std::invalid_argument("expand_H_of_step: order must be >= 3");
  DegreeCapGuard guard(kScratchDegreeCap);
  return corrected_after_step(FormalConservedQuantity{}, order);
}

HSeries invariant_defect_series(const FormalConservedQuantity& fcq, int trunc) {
  if (trunc < 0)
    throw std::invalid_argument("invariant_defect_series: negative truncation");
  DegreeCapGuard guard(kScratchDegreeCap);
  HSeries defect = corrected_after_step(fcq, trunc);
  defect -= HSeries(bracket_poly(), trunc, 0);
  for (size_t j = 0; j < fcq.corrections.size(); ++j) {
    const int shift = 2 * (static_cast<int>(j) + 1);
    if (shift > trunc) break;
    defect -= HSeries(fcq.corrections[j].poly, trunc, shift);
  }
  return defect;
}

ExpWeightedPoly solve_correction(int i, const FormalConservedQuantity& previous) {
  if (i < 1)
    throw std::invalid_argument("solve_correction: index must be >= 1");
  if (static_cast<int>(previous.corrections.size()) < i - 1)
    throw std::invalid_argument(
        "solve_correction: previous must carry at least i-1 corrections");
  DegreeCapGuard guard(kScratchDegreeCap);

  FormalConservedQuantity trimmed;
  trimmed.corrections.assign(previous.corrections.begin(),
                             previous.corrections.begin() + (i - 1));
  const int trunc = 2 * i + 1;
  const HSeries defect = invariant_defect_series(trimmed, trunc);
  for (int k = 0; k < trunc; ++k)
    if (!defect[k].is_zero())
      throw DerivationError("solve_correction: supplied corrections leave a "
                            "defect at order h^" +
                            std::to_string(k));

  const BivariatePolynomial g = defect[trunc];
  const int base_degree = 2 * (i + 1);
  try {
    return {solve_transport(g, base_degree)};
  } catch (const DerivationError&) {
    return {solve_transport(g, base_degree + 2)};
  }
}

FormalConservedQuantity derive_formal_invariant(int order) {
  if (order < 0 || order % 2 != 0)
    throw std::invalid_argument(
        "derive_formal_invariant: order must be even and non-negative");
  FormalConservedQuantity fcq;
  for (int i = 1; 2 * i <= order; ++i)
    fcq.corrections.push_back(solve_correction(i, fcq));
  return fcq;
}

double hbar_eval(double x, double y, double h,
                 const FormalConservedQuantity& fcq) {
  double v = conserved_H(x, y);
  if (fcq.corrections.empty()) return v;
  const double w = std::exp(-2.0 * y);
  double hpow = h * h;
  for (const auto& c : fcq.corrections) {
    v += hpow * w * c.poly.eval(x, y);
    hpow *= h * h;
  }
  return v;
}

MonitorResult conservation_monitor(const Trajectory& traj,
                                   const FormalConservedQuantity& fcq) {
  MonitorResult out;
  out.rows.reserve(traj.states.size());
  for (long n = traj.start_index; n <= traj.end_index(); ++n) {
    const PlanarState& s = traj.at(n);
    out.rows.push_back(
        {n, conserved_H(s.x, s.y), hbar_eval(s.x, s.y, traj.params.h, fcq)});
  }
  double min_h = out.rows.front().H, max_h = min_h;
  double min_hb = out.rows.front().Hbar, max_hb = min_hb;
  for (const MonitorRow& r : out.rows) {
    min_h = std::min(min_h, r.H);
    max_h = std::max(max_h, r.H);
    min_hb = std::min(min_hb, r.Hbar);
    max_hb = std::max(max_hb, r.Hbar);
  }
  out.ptp_H = max_h - min_h;
  out.ptp_Hbar = max_hb - min_hb;
  return out;
}

}  // namespace canard

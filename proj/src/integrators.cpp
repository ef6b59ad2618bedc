#include "canard/integrators.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace canard {

QuadraticVectorField QuadraticVectorField::zero(int n) {
  QuadraticVectorField vf;
  vf.dim = n;
  vf.quadratic.assign(n, Mat(n, Vec(n, 0.0)));
  vf.linear.assign(n, Vec(n, 0.0));
  vf.constant.assign(n, 0.0);
  return vf;
}

void QuadraticVectorField::validate() const {
  const size_t n = static_cast<size_t>(dim);
  if (dim <= 0 || quadratic.size() != n || linear.size() != n ||
      constant.size() != n)
    throw std::invalid_argument("vector field dimensions inconsistent");
  for (const auto& Tk : quadratic) {
    if (Tk.size() != n) throw std::invalid_argument("quadratic tensor shape");
    for (size_t i = 0; i < n; ++i) {
      if (Tk[i].size() != n)
        throw std::invalid_argument("quadratic tensor shape");
      for (size_t j = 0; j < i; ++j)
        if (Tk[i][j] != Tk[j][i])
          throw std::invalid_argument("quadratic tensor not symmetric");
    }
  }
  for (const auto& row : linear)
    if (row.size() != n) throw std::invalid_argument("linear matrix shape");
}

Vec QuadraticVectorField::eval(const Vec& z) const {
  Vec out(dim, 0.0);
  for (int k = 0; k < dim; ++k) {
    double acc = constant[k];
    for (int i = 0; i < dim; ++i) {
      acc += linear[k][i] * z[i];
      for (int j = 0; j < dim; ++j) acc += quadratic[k][i][j] * z[i] * z[j];
    }
    out[k] = acc;
  }
  return out;
}

Mat QuadraticVectorField::jacobian(const Vec& z) const {
  Mat J(dim, Vec(dim, 0.0));
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i) {
      double acc = linear[k][i];
      for (int j = 0; j < dim; ++j) acc += 2.0 * quadratic[k][i][j] * z[j];
      J[k][i] = acc;
    }
  return J;
}

SingularStepError::SingularStepError(Vec state, double step)
    : std::runtime_error("singular step at h = " + std::to_string(step)),
      z(std::move(state)),
      h(step) {}

namespace {

// Solve A w = b in place by partial-pivot elimination; a pivot smaller than
// 1e-13 times the matrix max-norm signals a pole of the map.
Vec solve_or_throw(Mat A, Vec b, const Vec& z, double h) {
  const int n = static_cast<int>(b.size());
  double norm = 0.0;
  for (const auto& row : A)
    for (double v : row) norm = std::max(norm, std::fabs(v));
  const double tol = 1e-13 * std::max(norm, 1e-300);

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[pivot][col])) pivot = r;
    if (std::fabs(A[pivot][col]) < tol) throw SingularStepError(z, h);
    std::swap(A[pivot], A[col]);
    std::swap(b[pivot], b[col]);
    for (int r = col + 1; r < n; ++r) {
      const double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec w(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= A[r][c] * w[c];
    w[r] = acc / A[r][r];
  }
  return w;
}

Vec qbar(const QuadraticVectorField& vf, const Vec& z, const Vec& zt) {
  // Qbar(z, z~) = (Q(z + z~) - Q(z) - Q(z~)) / 2, evaluated directly from the
  // symmetric tensor as sum_{i,j} T[k][i][j] z_i z~_j.
  Vec out(vf.dim, 0.0);
  for (int k = 0; k < vf.dim; ++k) {
    double acc = 0.0;
    for (int i = 0; i < vf.dim; ++i)
      for (int j = 0; j < vf.dim; ++j)
        acc += vf.quadratic[k][i][j] * z[i] * zt[j];
    out[k] = acc;
  }
  return out;
}

}  // namespace

Vec kahan_step(const QuadraticVectorField& vf, const Vec& z, double h) {
  Mat A(vf.dim, Vec(vf.dim, 0.0));
  const Mat J = vf.jacobian(z);
  for (int r = 0; r < vf.dim; ++r) {
    for (int c = 0; c < vf.dim; ++c) A[r][c] = -0.5 * h * J[r][c];
    A[r][r] += 1.0;
  }
  const Vec w = solve_or_throw(std::move(A), vf.eval(z), z, h);
  Vec out = z;
  for (int k = 0; k < vf.dim; ++k) out[k] += h * w[k];
  return out;
}

Vec kahan_inverse_step(const QuadraticVectorField& vf, const Vec& z,
                       double h) {
  return kahan_step(vf, z, -h);
}

double kahan_bilinear_residual(const QuadraticVectorField& vf, const Vec& z,
                               const Vec& z_next, double h) {
  if (h == 0.0) throw std::domain_error("bilinear residual needs h != 0");
  const Vec q = qbar(vf, z, z_next);
  double res = 0.0;
  for (int k = 0; k < vf.dim; ++k) {
    double lin = 0.0;
    for (int i = 0; i < vf.dim; ++i)
      lin += 0.5 * vf.linear[k][i] * (z[i] + z_next[i]);
    const double r =
        (z_next[k] - z[k]) / h - q[k] - lin - vf.constant[k];
    res = std::max(res, std::fabs(r));
  }
  return res;
}

double rk_form_residual(const QuadraticVectorField& vf, const Vec& z,
                        const Vec& z_next, double h) {
  if (h == 0.0) throw std::domain_error("RK residual needs h != 0");
  Vec mid(vf.dim, 0.0);
  for (int k = 0; k < vf.dim; ++k) mid[k] = 0.5 * (z[k] + z_next[k]);
  const Vec fz = vf.eval(z), fm = vf.eval(mid), fn = vf.eval(z_next);
  double res = 0.0;
  for (int k = 0; k < vf.dim; ++k) {
    const double r =
        (z_next[k] - z[k]) / h + 0.5 * fz[k] - 2.0 * fm[k] + 0.5 * fn[k];
    res = std::max(res, std::fabs(r));
  }
  return res;
}

Vec euler_step(const QuadraticVectorField& vf, const Vec& z, double h) {
  Vec out = z;
  const Vec f = vf.eval(z);
  for (int k = 0; k < vf.dim; ++k) out[k] += h * f[k];
  return out;
}

Vec reference_flow(const QuadraticVectorField& vf, Vec z0, double t,
                   long steps) {
  if (steps < 1) throw std::invalid_argument("reference_flow needs steps >= 1");
  const double dt = t / static_cast<double>(steps);
  const int n = vf.dim;
  Vec k1, k2, k3, k4, tmp(n, 0.0);
  for (long s = 0; s < steps; ++s) {
    k1 = vf.eval(z0);
    for (int i = 0; i < n; ++i) tmp[i] = z0[i] + 0.5 * dt * k1[i];
    k2 = vf.eval(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = z0[i] + 0.5 * dt * k2[i];
    k3 = vf.eval(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = z0[i] + dt * k3[i];
    k4 = vf.eval(tmp);
    for (int i = 0; i < n; ++i)
      z0[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return z0;
}

}  // namespace canard

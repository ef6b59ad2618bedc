#pragma once

#include <stdexcept>
#include <vector>

namespace canard {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

// Vector field with quadratic right-hand side
//   f(z)_k = sum_{i,j} T[k][i][j] z_i z_j + (B z)_k + c_k,
// T symmetric in its last two indices.
struct QuadraticVectorField {
  int dim = 0;
  std::vector<Mat> quadratic;  // T[k][i][j]
  Mat linear;                  // B[k][i]
  Vec constant;                // c[k]

  static QuadraticVectorField zero(int n);

  Vec eval(const Vec& z) const;
  Mat jacobian(const Vec& z) const;  // Df(z)_{k,i} = 2 sum_j T[k][i][j] z_j + B[k][i]
  void validate() const;             // dimension and symmetry checks
};

// Raised when the linearly implicit step hits a pole of the birational map
// (the matrix Id - (h/2) Df(z) is numerically singular).
struct SingularStepError : std::runtime_error {
  SingularStepError(Vec state, double step);
  Vec z;
  double h;
};

// One step of the linearly implicit midpoint-type scheme
//   z~ = z + h (Id - (h/2) Df(z))^{-1} f(z),
// solved by Gaussian elimination with partial pivoting. A pivot below
// 1e-13 times the matrix max-norm raises SingularStepError.
Vec kahan_step(const QuadraticVectorField& vf, const Vec& z, double h);

// Inverse step: the scheme is time-reversible, so the inverse is the forward
// step with -h.
Vec kahan_inverse_step(const QuadraticVectorField& vf, const Vec& z, double h);

// Max-norm of (z~ - z)/h - Qbar(z, z~) - (1/2) B (z + z~) - c, where Qbar is
// the symmetric bilinear form polarizing Q. Vanishes (to round-off) exactly
// for step pairs of the scheme above.
double kahan_bilinear_residual(const QuadraticVectorField& vf, const Vec& z,
                               const Vec& z_next, double h);

// Max-norm of (z~ - z)/h + (1/2) f(z) - 2 f((z + z~)/2) + (1/2) f(z~): the
// implicit Runge-Kutta form of the same scheme for quadratic fields.
double rk_form_residual(const QuadraticVectorField& vf, const Vec& z,
                        const Vec& z_next, double h);

Vec euler_step(const QuadraticVectorField& vf, const Vec& z, double h);

// Fixed-step classical fourth-order Runge-Kutta flow approximation, used as
// the continuous-time oracle in convergence tests.
Vec reference_flow(const QuadraticVectorField& vf, Vec z0, double t,
                   long steps);

}  // namespace canard

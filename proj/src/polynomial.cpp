#include "canard/polynomial.hpp"

#include <sstream>
#include <stdexcept>

namespace canard {

namespace {
int g_degree_cap = 12;
}

int poly_degree_cap() { return g_degree_cap; }

void set_poly_degree_cap(int cap) {
  if (cap < 0) throw std::invalid_argument("degree cap must be non-negative");
  g_degree_cap = cap;
}

DegreeCapGuard::DegreeCapGuard(int cap) : saved_(g_degree_cap) {
  set_poly_degree_cap(cap);
}

DegreeCapGuard::~DegreeCapGuard() { g_degree_cap = saved_; }

BivariatePolynomial::BivariatePolynomial(const Rational& constant) {
  set_coeff(0, 0, constant);
}

BivariatePolynomial BivariatePolynomial::monomial(int i, int j,
                                                  const Rational& coeff) {
  BivariatePolynomial p;
  p.set_coeff(i, j, coeff);
  return p;
}

Rational BivariatePolynomial::coeff(int i, int j) const {
  auto it = terms_.find(Monomial{i, j});
  return it == terms_.end() ? Rational(0) : it->second;
}

void BivariatePolynomial::set_coeff(int i, int j, const Rational& c) {
  if (i < 0 || j < 0) throw std::invalid_argument("negative exponent");
  if (c == 0) {
    terms_.erase(Monomial{i, j});
    return;
  }
  if (i + j > g_degree_cap)
    throw std::overflow_error("polynomial degree exceeds cap " +
                              std::to_string(g_degree_cap));
  terms_[Monomial{i, j}] = c;
}

void BivariatePolynomial::add_term(int i, int j, const Rational& c) {
  set_coeff(i, j, coeff(i, j) + c);
}

int BivariatePolynomial::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.i + m.j);
  return d;
}

BivariatePolynomial& BivariatePolynomial::operator+=(
    const BivariatePolynomial& q) {
  for (const auto& [m, c] : q.terms_) add_term(m.i, m.j, c);
  return *this;
}

BivariatePolynomial& BivariatePolynomial::operator-=(
    const BivariatePolynomial& q) {
  for (const auto& [m, c] : q.terms_) add_term(m.i, m.j, -c);
  return *this;
}

BivariatePolynomial& BivariatePolynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

BivariatePolynomial operator*(const BivariatePolynomial& p,
                              const BivariatePolynomial& q) {
  BivariatePolynomial out;
  for (const auto& [mp, cp] : p.terms_)
    for (const auto& [mq, cq] : q.terms_)
      out.add_term(mp.i + mq.i, mp.j + mq.j, cp * cq);
  return out;
}

double BivariatePolynomial::eval(double x, double y) const {
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = to_double(c);
    for (int k = 0; k < m.i; ++k) t *= x;
    for (int k = 0; k < m.j; ++k) t *= y;
    acc += t;
  }
  return acc;
}

Rational BivariatePolynomial::eval_exact(const Rational& x,
                                         const Rational& y) const {
  Rational acc(0);
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (int k = 0; k < m.i; ++k) t *= x;
    for (int k = 0; k < m.j; ++k) t *= y;
    acc += t;
  }
  return acc;
}

std::string BivariatePolynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    os << rational_str(c) << " * x^" << m.i << " * y^" << m.j;
    first = false;
  }
  return os.str();
}

BivariatePolynomial poly_arith(const BivariatePolynomial& p,
                               const BivariatePolynomial& q, PolyOp op) {
  switch (op) {
    case PolyOp::add:
      return p + q;
    case PolyOp::sub:
      return p - q;
    case PolyOp::mul:
      return p * q;
  }
  throw std::invalid_argument("unknown polynomial operation");
}

BivariatePolynomial poly_partial(const BivariatePolynomial& p, Var var) {
  BivariatePolynomial out;
  for (const auto& [m, c] : p.terms()) {
    if (var == Var::x && m.i > 0) out.add_term(m.i - 1, m.j, c * m.i);
    if (var == Var::y && m.j > 0) out.add_term(m.i, m.j - 1, c * m.j);
  }
  return out;
}

}  // namespace canard

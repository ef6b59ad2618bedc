#pragma once

#include <gmpxx.h>

#include <string>

namespace canard {

// Exact rational scalar. mpq_class keeps lowest terms with a positive
// denominator after canonicalization, which rat() performs up front.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational r{mpz_class(num), mpz_class(den)};
  r.canonicalize();
  return r;
}

// Canonical text form: "num" when the denominator is 1, else "num/den".
inline std::string rational_str(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace canard

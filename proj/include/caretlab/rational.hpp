#pragma once

// Exact rational scalars. Every identity checked by this library is exact, so
// GMP rationals are the single numeric type outside the float solvers.

#include <gmpxx.h>

#include "caretlab/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace caretlab {

using Rational = mpq_class;

/// Parses `p/q` or `p` (optional leading '-'); the result is canonicalized.
inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw ParseError("empty rational", 0);
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') i = 1;
  bool seen_slash = false;
  bool digit_before = false;
  bool digit_after = false;
  for (std::size_t k = i; k < text.size(); ++k) {
    const char ch = text[k];
    if (ch == '/') {
      if (seen_slash || !digit_before) throw ParseError("misplaced '/' in rational", k);
      seen_slash = true;
    } else if (ch >= '0' && ch <= '9') {
      (seen_slash ? digit_after : digit_before) = true;
    } else {
      throw ParseError(std::string("unexpected character '") + ch + "' in rational", k);
    }
  }
  if (!digit_before || (seen_slash && !digit_after)) {
    throw ParseError("incomplete rational '" + std::string(text) + "'", text.size());
  }
  Rational q;
  q.set_str(std::string(text[0] == '+' ? text.substr(1) : text), 10);
  if (q.get_den() == 0) throw ParseError("zero denominator", text.find('/'));
  q.canonicalize();
  return q;
}

/// Always `p/q`, including integers (`1/1`), so files stay uniform.
inline std::string format_rational(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational abs_rational(const Rational& q) { return q < 0 ? Rational(-q) : q; }

/// Best rational approximation with denominator <= max_den (continued fraction
/// convergents plus the final semiconvergent). The double is converted exactly
/// first, so the result is deterministic across platforms.
inline Rational best_rational_approximation(double x, const mpz_class& max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot rationalize a non-finite value");
  if (max_den < 1) throw std::invalid_argument("denominator cap must be positive");
  const Rational exact(x);
  if (exact.get_den() <= max_den) return exact;

  // Convergents h/k of exact = [a0; a1, a2, ...].
  mpz_class h2 = 0, h1 = 1;  // h_{n-2}, h_{n-1}
  mpz_class k2 = 1, k1 = 0;
  mpz_class num = exact.get_num();
  mpz_class den = exact.get_den();
  while (den != 0) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    const mpz_class k_next = a * k1 + k2;
    if (k_next > max_den) {
      // Largest semiconvergent still inside the cap.
      mpz_class t;
      mpz_fdiv_q(t.get_mpz_t(), mpz_class(max_den - k2).get_mpz_t(), k1.get_mpz_t());
      const Rational convergent(h1, k1);
      const Rational semi(t * h1 + h2, t * k1 + k2);
      Rational best = convergent;
      if (t > 0 && abs_rational(semi - exact) < abs_rational(convergent - exact)) best = semi;
      best.canonicalize();
      return best;
    }
    const mpz_class h_next = a * h1 + h2;
    h2 = h1;
    h1 = h_next;
    k2 = k1;
    k1 = k_next;
    const mpz_class rem = num - a * den;
    num = den;
    den = rem;
  }
  Rational result(h1, k1);
  result.canonicalize();
  return result;
}

}  // namespace caretlab

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncres {

using Rational = mpq_class;
using Integer = mpz_class;
using Exp = std::int64_t;

// Sentinel for "no floor" (EXACT). Arithmetic on it saturates.
inline constexpr Exp kNegInf = std::numeric_limits<Exp>::min() / 4;

inline bool is_neg_inf(Exp e) { return e <= kNegInf / 2; }

inline Exp sat_add(Exp a, Exp b) {
  if (is_neg_inf(a) || is_neg_inf(b)) return kNegInf;
  return a + b;
}

inline std::vector<Exp> sat_add(const std::vector<Exp>& a, const std::vector<Exp>& b) {
  std::vector<Exp> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = sat_add(a[i], b[i]);
  return r;
}

inline std::vector<Exp> vmax(const std::vector<Exp>& a, const std::vector<Exp>& b) {
  std::vector<Exp> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

// p/q in lowest terms; mpq_class(p, q) alone does not reduce.
inline Rational make_rational(long p, unsigned long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& q) {
  mpq_class c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

// Parses "p", "-p", "p/q". Throws std::invalid_argument on malformed input.
inline Rational parse_rational(const std::string& s) {
  mpq_class q;
  if (s.empty() || q.set_str(s, 10) != 0 || q.get_den() == 0) {
    throw std::invalid_argument("malformed rational: " + s);
  }
  q.canonicalize();
  return q;
}

// All library errors carry a stable kind string, used for CLI JSON output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define NCRES_DEFINE_ERROR(Name)                                     \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& msg) : Error(#Name, msg) {}     \
  };

NCRES_DEFINE_ERROR(ModeMismatch)
NCRES_DEFINE_ERROR(DimensionMismatch)
NCRES_DEFINE_ERROR(PrecisionError)
NCRES_DEFINE_ERROR(WindowTooWide)
NCRES_DEFINE_ERROR(KindMismatch)
NCRES_DEFINE_ERROR(ShapeError)
NCRES_DEFINE_ERROR(NotMaurerCartan)
NCRES_DEFINE_ERROR(ModelMismatch)
NCRES_DEFINE_ERROR(NotHolomorphic)
NCRES_DEFINE_ERROR(ArityMismatch)
NCRES_DEFINE_ERROR(NoSolution)
NCRES_DEFINE_ERROR(AmbiguousSolution)
NCRES_DEFINE_ERROR(NotACycle)
NCRES_DEFINE_ERROR(RowNotExact)
NCRES_DEFINE_ERROR(SyntaxError)
NCRES_DEFINE_ERROR(NegativeExponentInDiffMode)

#undef NCRES_DEFINE_ERROR

// Integer-valued generalized binomial C(b, k) = b(b-1)...(b-k+1)/k!.
inline Integer binomial(Exp b, Exp k) {
  Integer num = 1;
  Integer den = 1;
  for (Exp i = 0; i < k; ++i) {
    num *= Integer(static_cast<long>(b - i));
    den *= Integer(static_cast<long>(i + 1));
  }
  return num / den;
}

inline Integer falling(Exp a, Exp k) {
  Integer r = 1;
  for (Exp i = 0; i < k; ++i) r *= Integer(static_cast<long>(a - i));
  return r;
}

inline Integer factorial(Exp k) {
  Integer r = 1;
  for (Exp i = 2; i <= k; ++i) r *= Integer(static_cast<long>(i));
  return r;
}

}  // namespace ncres

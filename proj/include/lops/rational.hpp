#pragma once

#include <gmpxx.h>

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>

namespace lops {

/// Exact rational scalar used for every coefficient and exact evaluation.
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "a", "-a", "a/b" (integers). Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Canonical "num/den" text; integers print without a denominator.
std::string to_string(const Rational& r);

/// Exact square root when r is the square of a rational.
std::optional<Rational> rational_sqrt(const Rational& r);

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }
inline Rational exact_quotient(const Rational& a, const Rational& b) { return a / b; }
inline std::size_t pivot_cost(const Rational& r) { return mpz_sizeinbase(r.get_num_mpz_t(), 2) + mpz_sizeinbase(r.get_den_mpz_t(), 2); }

}  // namespace lops

namespace Eigen {
template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  using Real = mpq_class;
  using NonInteger = mpq_class;
  using Nested = mpq_class;
  using Literal = mpq_class;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};
}  // namespace Eigen

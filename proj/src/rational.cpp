#include "lops/rational.hpp"

#include <stdexcept>

namespace lops {

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  std::string s(text);
  Rational r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("malformed rational literal '" + s + "'");
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

std::optional<Rational> rational_sqrt(const Rational& r) {
  if (sgn(r) < 0) return std::nullopt;
  if (mpz_perfect_square_p(r.get_num_mpz_t()) == 0 || mpz_perfect_square_p(r.get_den_mpz_t()) == 0)
    return std::nullopt;
  Integer n = sqrt(r.get_num());
  Integer d = sqrt(r.get_den());
  return Rational(n, d);
}

}  // namespace lops

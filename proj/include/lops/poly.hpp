#pragma once

#include "lops/monomial.hpp"
#include "lops/rational.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lops {

struct Term {
  Monomial monomial;
  Rational coefficient;
  friend bool operator==(const Term&, const Term&) = default;
};

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept strictly descending in monomial order with no zero
/// coefficients, so structural equality is mathematical equality.
class Poly {
 public:
  Poly() = default;
  Poly(int c);  // NOLINT(google-explicit-constructor)
  Poly(const Rational& c);  // NOLINT(google-explicit-constructor)
  explicit Poly(const Monomial& m, const Rational& c = 1);

  static Poly variable(AtomId atom, int exponent = 1);
  /// Canonicalizes arbitrary terms: sorts, merges duplicates, drops zeros.
  static Poly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].monomial.is_one()); }
  Rational constant_term() const;
  const Term& leading_term() const { return terms_.front(); }

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly&, const Poly&) = default;

 private:
  std::vector<Term> terms_;
};

Poly add(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Poly& b);
Poly pow(const Poly& p, unsigned k);
Poly scale(const Poly& p, const Rational& c);

struct DivisionResult {
  Poly quotient;
  Poly remainder;
};

/// Multivariate division by the leading term of `den` in the fixed order.
DivisionResult divide(const Poly& num, const Poly& den);
/// Quotient when `den` divides `num`; NotDivisible carries the remainder otherwise.
Poly exact_div(const Poly& num, const Poly& den);

using Assignment = std::map<AtomId, Rational>;

/// Throws MissingAtom if an atom of p is unassigned.
Rational eval(const Poly& p, const Assignment& values);
/// Replaces the assigned atoms by their values and keeps the rest symbolic.
Poly partial_eval(const Poly& p, const Assignment& values);
Poly substitute(const Poly& p, const std::map<AtomId, Poly>& bindings);

/// Total degree; -1 for the zero polynomial.
int degree(const Poly& p);
int degree_in(const Poly& p, AtomId atom);

struct Homogeneity {
  bool zero = false;
  bool homogeneous = false;
  int degree = 0;
};
Homogeneity homogeneous_degree_in(const Poly& p, const std::vector<AtomId>& atoms);
/// Shorthand for homogeneity in ξ₀..ξ₃.
Homogeneity xi_homogeneity(const Poly& p);

/// Coefficient of atom^k, as a polynomial in the remaining atoms.
Poly coefficient(const Poly& p, AtomId atom, int k);
/// Sorted ids of atoms occurring in p.
std::vector<AtomId> atoms_of(const Poly& p);
/// Largest monomial dividing every term.
Monomial monomial_content(const Poly& p);
/// Divides every coefficient so that the leading one is 1.
Poly monic(const Poly& p);

/// Exact square root by leading-term matching; nullopt when p is not a square.
/// On failure, `remainder` (if given) receives p - r² for the last candidate r.
std::optional<Poly> poly_sqrt(const Poly& p, Poly* remainder = nullptr);

std::string to_string(const Poly& p);
std::string to_string(const Monomial& m);

/// Maps an identifier to an atom; the column points at the identifier.
using AtomResolver = std::function<AtomId(std::string_view name, std::size_t column)>;

/// Grammar: sums of products of factors; factor = number | identifier |
/// '(' expr ')' , each optionally raised to '^' <integer>; '/' only by a
/// nonzero constant. Throws ParseError (line/column relative to `line`, `column0`).
Poly parse_poly(std::string_view text, const AtomResolver& resolve = {}, std::size_t line = 1, std::size_t column0 = 1);

}  // namespace lops

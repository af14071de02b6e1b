#pragma once

#include "lops/atom.hpp"

#include <boost/container/small_vector.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

namespace lops {

/// Power product over the atom universe.
///
/// Exponents are packed one byte per atom, eight atoms per 64-bit word, with
/// the lowest atom id in the most significant byte. Comparing words as
/// unsigned integers is then the lexicographic order with ξ₀ > ξ₁ > ... >
/// parameters, and multiplication is a word-wise add. Exponents are capped at
/// 127 so that per-byte sums never carry into a neighbour.
class Monomial {
 public:
  static constexpr int kMaxExponent = 127;

  Monomial() = default;
  static Monomial of(AtomId atom, int exponent = 1);

  int exponent(AtomId atom) const;
  void set_exponent(AtomId atom, int exponent);

  bool is_one() const { return words_.empty(); }
  int total_degree() const;
  int xi_degree() const;
  int degree_in(std::span<const AtomId> atoms) const;

  Monomial operator*(const Monomial& other) const;
  bool divisible_by(const Monomial& other) const;
  std::optional<Monomial> divided_by(const Monomial& other) const;
  Monomial gcd(const Monomial& other) const;
  /// Same monomial with every exponent of `atom` removed.
  Monomial without(AtomId atom) const;

  /// Visits (atom, exponent) pairs with exponent > 0 in increasing atom id.
  void for_each(const std::function<void(AtomId, int)>& fn) const;

  std::strong_ordering operator<=>(const Monomial& other) const;
  bool operator==(const Monomial& other) const { return words_ == other.words_; }

  std::size_t hash() const;

 private:
  void trim();
  boost::container::small_vector<std::uint64_t, 6> words_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

}  // namespace lops

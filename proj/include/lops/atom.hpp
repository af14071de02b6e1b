#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lops {

enum class AtomKind : std::uint8_t { covector, parameter };

/// A polynomial indeterminate. Identity is (name, index).
struct Atom {
  std::string name;
  AtomKind kind = AtomKind::parameter;
  std::optional<int> index;

  /// Text used in the DSL and in rendered polynomials, e.g. "xi2" or "F".
  std::string text() const;
  friend bool operator==(const Atom& a, const Atom& b) { return a.name == b.name && a.index == b.index; }
};

using AtomId = std::uint16_t;

/// Process-wide interning. ξ₀..ξ₃ always hold ids 0..3, so they lead every
/// monomial order. Registration is thread-safe; lookups return stable references.
AtomId intern(const Atom& atom);
const Atom& atom_of(AtomId id);
std::size_t atom_count();

AtomId xi(int component);
AtomId param(std::string_view name);
std::optional<AtomId> find_atom(std::string_view text);

inline bool is_covector(AtomId id) { return id < 4; }

/// Ids of ξ₀..ξ₃.
const std::vector<AtomId>& xi_atoms();

}  // namespace lops

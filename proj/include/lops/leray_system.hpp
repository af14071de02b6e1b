#pragma once

#include "lops/poly.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lops {

struct UnknownBlock {
  std::string name;
  int multiplicity = 1;
  int m = 0;
  friend bool operator==(const UnknownBlock&, const UnknownBlock&) = default;
};

struct EquationBlock {
  std::string name;
  int multiplicity = 1;
  int n = 0;
  friend bool operator==(const EquationBlock&, const EquationBlock&) = default;
};

/// Principal symbol of unknown component (unk_block, unk_component) in
/// equation component (eq_block, eq_component).
struct SymbolEntry {
  std::size_t eq_block = 0;
  int eq_component = 0;
  std::size_t unk_block = 0;
  int unk_component = 0;
  Poly symbol;
  friend bool operator==(const SymbolEntry&, const SymbolEntry&) = default;
};

/// Highest derivative of an unknown in the coefficients and right-hand side of an equation.
struct DependencyDecl {
  std::size_t eq_block = 0;
  std::size_t unk_block = 0;
  int declared_order = 0;
  friend bool operator==(const DependencyDecl&, const DependencyDecl&) = default;
};

enum class ParamConstraint { none, positive, nonzero };

struct ParamDecl {
  std::string name;
  ParamConstraint constraint = ParamConstraint::none;
  friend bool operator==(const ParamDecl&, const ParamDecl&) = default;
};

struct FactorDecl {
  std::string name;
  int multiplicity = 1;
  Poly factor;
  friend bool operator==(const FactorDecl&, const FactorDecl&) = default;
};

/// Claimed factorization: prefactor · Π factor^multiplicity.
struct FactorsBlock {
  Poly prefactor = 1;
  std::vector<FactorDecl> factors;
  friend bool operator==(const FactorsBlock&, const FactorsBlock&) = default;
};

using Binding = std::pair<std::string, Rational>;

struct LeraySystem {
  std::string name = "system";
  std::vector<ParamDecl> params;
  std::vector<UnknownBlock> unknowns;
  std::vector<EquationBlock> equations;
  std::vector<SymbolEntry> entries;
  std::vector<DependencyDecl> deps;
  /// Specialisations applied before the determinant is taken.
  std::vector<Binding> assumptions;
  /// Parameter values at which hyperbolicity and cones are examined.
  std::vector<Binding> point;
  std::optional<FactorsBlock> factors;

  std::optional<std::size_t> unknown_index(std::string_view name) const;
  std::optional<std::size_t> equation_index(std::string_view name) const;
  int unknown_total() const;
  int equation_total() const;
  /// Scalar row/column offsets of each block.
  std::vector<int> equation_offsets() const;
  std::vector<int> unknown_offsets() const;

  friend bool operator==(const LeraySystem&, const LeraySystem&) = default;
};

LeraySystem parse_system(std::string_view text);
LeraySystem load_system(const std::string& path);
std::string print_system(const LeraySystem& s);

Assignment to_assignment(const std::vector<Binding>& bindings);

struct EntryCheck {
  std::size_t eq_block = 0;
  int eq_component = 0;
  std::size_t unk_block = 0;
  int unk_component = 0;
  int required_degree = 0;
  std::optional<int> found_degree;  // empty when the symbol is not ξ-homogeneous
  bool pass = false;
};

struct DependencyCheck {
  std::size_t eq_block = 0;
  std::size_t unk_block = 0;
  int declared_order = 0;
  int allowed_order = 0;
  bool pass = false;
};

struct StructureReport {
  bool square = false;
  std::vector<EntryCheck> entries;
  std::vector<DependencyCheck> deps;
  std::vector<std::string> failures;
  bool pass = false;
};

StructureReport validate_structure(const LeraySystem& s);

/// ℓ = Σ multiplicity·m − Σ multiplicity·n.
int total_order(const LeraySystem& s);

struct ConditionReport {
  int max_factor_degree = 0;
  int max_m = 0;
  int min_n = 0;
  bool pass = false;
  std::string statement;
};

ConditionReport leray_condition(const LeraySystem& s, const std::vector<int>& factor_degrees);

}  // namespace lops

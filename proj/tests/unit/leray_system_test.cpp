#include "lops/errors.hpp"
#include "lops/leray_system.hpp"

#include <gtest/gtest.h>

using namespace lops;

namespace {

const char* kWave = R"(
system wave
param gu00
param gu11
unknown phi multiplicity 1 index 2
equation wave multiplicity 1 index 0
entry wave[0] phi[0] := gu00*xi0^2 + gu11*xi1^2   # principal part
depends wave on phi order 1
)";

}  // namespace

TEST(LeraySystem, ParsesWaveEquation) {
  auto s = parse_system(kWave);
  EXPECT_EQ(s.name, "wave");
  ASSERT_EQ(s.entries.size(), 1U);
  EXPECT_EQ(total_order(s), 2);
  auto r = validate_structure(s);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.square);
}

TEST(LeraySystem, MalformedIndexLineNamesTheLine) {
  try {
    parse_system("param F\nunknown u multiplicity 1 index\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 2U);
    EXPECT_EQ(e.column, 31U);
  }
}

TEST(LeraySystem, RejectsTrailingGarbage) {
  EXPECT_THROW(parse_system("unknown u multiplicity 1 index 2 extra\n"), ParseError);
  EXPECT_THROW(parse_system("unknown u multiplicity 1 index 2\nequation e multiplicity 1 index 0\nentry e[0] u[0] := xi0^2 )\n"),
               ParseError);
}

TEST(LeraySystem, UnknownAtomAndDuplicateEntry) {
  const std::string head = "unknown u multiplicity 1 index 2\nequation e multiplicity 1 index 0\n";
  EXPECT_THROW(parse_system(head + "entry e[0] u[0] := zeta*xi0^2\n"), UnknownAtom);
  EXPECT_THROW(parse_system(head + "entry e[0] u[0] := xi0^2\nentry e[0] u[0] := xi1^2\n"), DuplicateEntry);
  EXPECT_THROW(parse_system(head + "entry e[0] u[1] := xi0^2\n"), ParseError);
  EXPECT_THROW(parse_system(head + "factors:\nprefactor := 1\n"), ParseError);
  EXPECT_THROW(parse_system("param xi0\n"), ParseError);
  EXPECT_THROW(parse_system("unknown u multiplicity 0 index 2\n"), ParseError);
  EXPECT_THROW(parse_system("unknown u multiplicity 1 index -1\n"), ParseError);
}

TEST(LeraySystem, WrongHomogeneityFailsNamingEntry) {
  auto s = parse_system(
      "unknown u multiplicity 1 index 2\nequation e multiplicity 1 index 0\nentry e[0] u[0] := xi0^2 + xi1\n");
  auto r = validate_structure(s);
  EXPECT_FALSE(r.pass);
  ASSERT_EQ(r.failures.size(), 1U);
  EXPECT_NE(r.failures[0].find("e[0] u[0]"), std::string::npos);
  auto t = parse_system("unknown u multiplicity 1 index 2\nequation e multiplicity 1 index 0\nentry e[0] u[0] := xi0^3\n");
  EXPECT_FALSE(validate_structure(t).pass);
}

TEST(LeraySystem, DependencyOrderChecked) {
  auto s = parse_system(std::string(kWave) + "depends wave on phi order 2\n");
  auto r = validate_structure(s);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.deps.back().allowed_order, 1);
}

TEST(LeraySystem, PrintParseRoundTrip) {
  auto s = parse_system(std::string(kWave) +
                        "param F positive\nparam th nonzero\nassume gu00 = 1\npoint gu11 = -1/2\nfactors:\n  prefactor := F\n  factor a "
                        "multiplicity 2 := xi0 - xi1\nend\n");
  auto again = parse_system(print_system(s));
  EXPECT_EQ(again, s);
  EXPECT_EQ(print_system(again), print_system(s));
}

TEST(LeraySystem, LerayCondition) {
  auto s = parse_system(kWave);
  auto r = leray_condition(s, {2});
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.statement, "2 >= 2");
  EXPECT_FALSE(leray_condition(s, {1, 1}).pass);
}

TEST(LeraySystem, TotalOrderPermutationInvariant) {
  LeraySystem s;
  s.unknowns = {{"a", 10, 3}, {"b", 1, 2}, {"c", 4, 2}, {"d", 6, 1}, {"e", 4, 2}};
  s.equations = {{"A", 10, 1}, {"B", 1, 0}, {"C", 4, 0}, {"D", 6, 0}, {"E", 4, 0}};
  EXPECT_EQ(total_order(s), 44);
  std::sort(s.unknowns.begin(), s.unknowns.end(), [](auto& x, auto& y) { return x.name > y.name; });
  do {
    EXPECT_EQ(total_order(s), 44);
  } while (std::next_permutation(s.equations.begin(), s.equations.end(),
                                 [](auto& x, auto& y) { return x.name < y.name; }));
}

TEST(LeraySystem, ShippedWaveAndBrokenFiles) {
  auto w = load_system(std::string(LOPS_DATA_DIR) + "/wave.lops");
  EXPECT_TRUE(validate_structure(w).pass);
  EXPECT_EQ(total_order(w), 2);
  EXPECT_THROW(load_system(std::string(LOPS_DATA_DIR) + "/broken.lops"), ParseError);
}

#include "lops/determinant.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

using namespace lops;

namespace {

Poly P(const char* s) { return parse_poly(s); }

Poly small_poly(std::mt19937& rng) {
  static const char* pool[] = {"0", "0", "1", "xi0", "xi1 - q", "F*xi2", "xi0^2 - xi3", "2/3*q + xi1", "-F", "xi2*xi3 + 1"};
  std::uniform_int_distribution<int> pick(0, 9);
  return parse_poly(pool[pick(rng)]) * parse_poly(pool[2 + pick(rng) % 8]);
}

}  // namespace

TEST(Determinant, Diagonal) {
  PolyMatrix m = PolyMatrix::Constant(3, 3, Poly{});
  m(0, 0) = P("xi0");
  m(1, 1) = P("F+q");
  m(2, 2) = P("xi1^2 - xi2^2");
  EXPECT_EQ(determinant(m), P("xi0*(F+q)*(xi1^2-xi2^2)"));
}

TEST(Determinant, PermutationSign) {
  PolyMatrix m = PolyMatrix::Constant(2, 2, Poly{});
  m(0, 1) = P("xi0");
  m(1, 0) = P("xi1");
  EXPECT_EQ(determinant(m), P("-xi0*xi1"));
}

TEST(Determinant, SingularPattern) {
  PolyMatrix m = PolyMatrix::Constant(2, 2, Poly{});
  m(0, 0) = P("xi0");
  m(0, 1) = P("xi1");
  EXPECT_TRUE(determinant(m).is_zero());
}

TEST(Determinant, BlockStructureFindsTriangularBlocks) {
  PolyMatrix m = PolyMatrix::Constant(4, 4, Poly{});
  m(0, 0) = P("xi0");
  m(0, 3) = P("F");
  m(1, 1) = P("xi1");
  m(1, 2) = P("q");
  m(2, 1) = P("xi2");
  m(2, 2) = P("xi3");
  m(3, 3) = P("xi0 + xi1");
  auto bs = block_triangular_structure(nonzero_pattern(m));
  EXPECT_EQ(bs.row_blocks.size(), 3U);
  EXPECT_EQ(determinant(m), P("xi0*(xi1*xi3 - q*xi2)*(xi0+xi1)"));
}

TEST(Determinant, RationalGaussMatchesLaplace) {
  std::mt19937 rng(21);
  for (int t = 0; t < 50; ++t) {
    RationalMatrix m(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) m(i, j) = oracle::random_rational(rng);
    EXPECT_EQ(determinant(m), oracle::laplace_determinant(m));
    EXPECT_EQ(cofactor_determinant(m), oracle::laplace_determinant(m));
  }
}

TEST(DeterminantProperty, AgreesWithLeibnizUpTo6x6) {
  std::mt19937 rng(22);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int t = 0; t < 200; ++t) {
    const int n = dim(rng);
    PolyMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = small_poly(rng);
    const Poly expected = oracle::leibniz_determinant(m);
    ASSERT_EQ(determinant(m), expected) << "trial " << t;
    ASSERT_EQ(bareiss_determinant(m), expected) << "trial " << t;
  }
}

TEST(DeterminantProperty, ContentExtractionPreservesValue) {
  // Rows sharing a multi-term factor exercise the content heuristics.
  std::mt19937 rng(23);
  const Poly w = P("xi0 + 2*xi1 - xi3");
  for (int t = 0; t < 30; ++t) {
    PolyMatrix m(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = small_poly(rng) * (i < 2 ? w : Poly(1));
    EXPECT_EQ(determinant(m), oracle::leibniz_determinant(m));
  }
}

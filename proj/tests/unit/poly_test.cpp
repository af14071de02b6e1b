#include "lops/errors.hpp"
#include "lops/poly.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lops;

namespace {

Poly P(const char* s) { return parse_poly(s); }

// Small random polynomial in a few ξ and parameter atoms.
Poly random_poly(std::mt19937& rng, int max_terms = 5, int max_exp = 3) {
  static const std::vector<AtomId> atoms{xi(0), xi(1), xi(2), xi(3), param("F"), param("q")};
  std::uniform_int_distribution<int> nterms(1, max_terms), e(0, max_exp), c(-9, 9), d(1, 4), pick(0, 5);
  std::vector<Term> terms;
  const int n = nterms(rng);
  for (int i = 0; i < n; ++i) {
    Monomial m;
    for (int k = 0; k < 3; ++k) m.set_exponent(atoms[pick(rng)], e(rng));
    Rational r(c(rng), d(rng));
    r.canonicalize();
    terms.push_back({m, r});
  }
  return Poly::from_terms(terms);
}

}  // namespace

TEST(Poly, DifferenceOfSquares) {
  EXPECT_EQ(P("(xi0+xi1)*(xi0-xi1)"), P("xi0^2-xi1^2"));
  EXPECT_EQ(to_string(P("(xi0+xi1)*(xi0-xi1)")), "xi0^2 - xi1^2");
}

TEST(Poly, AdditiveIdentity) {
  auto p = P("3*xi0*F - 1/2*q");
  EXPECT_EQ(p + Poly{}, p);
}

TEST(Poly, CubeOfParameterFactor) {
  // Oracle: binomial expansion written out by hand.
  auto lhs = P("F+q") * pow(P("F+q"), 2);
  EXPECT_EQ(lhs, P("F^3 + 3*F^2*q + 3*F*q^2 + q^3"));
}

TEST(Poly, ExactDivision) {
  EXPECT_EQ(exact_div(P("xi0^2-xi1^2"), P("xi0-xi1")), P("xi0+xi1"));
  EXPECT_THROW(exact_div(P("xi0^2"), P("xi1")), NotDivisible);
  try {
    exact_div(P("xi0^2 + xi1"), P("xi0"));
    FAIL();
  } catch (const NotDivisible& e) {
    EXPECT_EQ(e.remainder, "xi1");
  }
}

TEST(Poly, Eval) {
  EXPECT_EQ(eval(P("xi0^2-xi1^2"), {{xi(0), 3}, {xi(1), 2}}), 5);
  EXPECT_EQ(eval(P("7/3"), {}), Rational(7, 3));
  EXPECT_THROW(eval(P("xi0*F"), {{xi(0), 1}}), MissingAtom);
}

TEST(Poly, Homogeneity) {
  auto h = xi_homogeneity(P("xi0*xi1 + xi2^2"));
  EXPECT_TRUE(h.homogeneous);
  EXPECT_EQ(h.degree, 2);
  EXPECT_FALSE(xi_homogeneity(P("xi0 + xi1^2")).homogeneous);
  auto g = xi_homogeneity(P("F*xi0^4 + (F+q)*xi0^2*xi1^2 + q*xi2^4"));
  EXPECT_TRUE(g.homogeneous);
  EXPECT_EQ(g.degree, 4);
  EXPECT_TRUE(xi_homogeneity(Poly{}).zero);
}

TEST(Poly, SubstituteAndPartialEval) {
  auto p = P("F*xi0^2 + q*xi1");
  EXPECT_EQ(substitute(p, {{param("q"), P("F+1")}}), P("F*xi0^2 + F*xi1 + xi1"));
  EXPECT_EQ(partial_eval(p, {{param("q"), 0}}), P("F*xi0^2"));
  EXPECT_EQ(degree(p), 3);
  EXPECT_EQ(coefficient(P("xi0^2*F + xi0^2*q + xi1"), xi(0), 2), P("F+q"));
}

TEST(Poly, Sqrt) {
  auto r = poly_sqrt(pow(P("q*xi3*(xi2-xi3) + F"), 2));
  ASSERT_TRUE(r);
  EXPECT_EQ(pow(*r, 2), pow(P("q*xi3*(xi2-xi3) + F"), 2));
  Poly rem;
  EXPECT_FALSE(poly_sqrt(P("xi0^2 + xi1^2"), &rem));
  EXPECT_FALSE(rem.is_zero());
  EXPECT_FALSE(poly_sqrt(P("-4")));
}

TEST(Poly, ParseErrors) {
  EXPECT_THROW(P("xi0 +"), ParseError);
  EXPECT_THROW(P("xi0 / xi1"), ParseError);
  EXPECT_THROW(P("xi0 xi1"), ParseError);
  try {
    parse_poly("F + $", {}, 4, 10);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 4U);
    EXPECT_EQ(e.column, 14U);
  }
}

TEST(PolyProperty, RingAxioms) {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    auto a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a + b, b + a);
    EXPECT_TRUE((a - a).is_zero());
  }
}

TEST(PolyProperty, DivisionInvertsMultiplication) {
  std::mt19937 rng(12);
  for (int i = 0; i < 200; ++i) {
    auto a = random_poly(rng), b = random_poly(rng);
    if (b.is_zero()) continue;
    EXPECT_EQ(exact_div(a * b, b), a);
    auto [q, r] = divide(a, b);
    EXPECT_EQ(q * b + r, a);
  }
}

TEST(PolyProperty, EvalIsHomomorphism) {
  std::mt19937 rng(13);
  std::uniform_int_distribution<int> c(-20, 20), d(1, 7);
  auto a = random_poly(rng), b = random_poly(rng);
  for (int i = 0; i < 1000; ++i) {
    Assignment s;
    for (auto id : {xi(0), xi(1), xi(2), xi(3), param("F"), param("q")}) s[id] = Rational(c(rng), d(rng));
    for (auto& [k, v] : s) v.canonicalize();
    ASSERT_EQ(eval(a * b, s), eval(a, s) * eval(b, s));
    ASSERT_EQ(eval(a + b, s), eval(a, s) + eval(b, s));
  }
}

TEST(PolyProperty, HomogeneousDegreesAdd) {
  std::mt19937 rng(14);
  for (int i = 0; i < 100; ++i) {
    auto a = random_poly(rng), b = random_poly(rng);
    auto ha = xi_homogeneity(a), hb = xi_homogeneity(b);
    if (ha.zero || hb.zero || !ha.homogeneous || !hb.homogeneous) continue;
    auto hab = xi_homogeneity(a * b);
    EXPECT_TRUE(hab.homogeneous);
    EXPECT_EQ(hab.degree, ha.degree + hb.degree);
  }
  auto x = P("xi0*F + xi1*q"), y = P("xi2^2 - xi3^2");
  EXPECT_EQ(xi_homogeneity(x * y).degree, 3);
}

TEST(PolyProperty, PrintParseRoundTrip) {
  std::mt19937 rng(15);
  for (int i = 0; i < 200; ++i) {
    auto a = random_poly(rng);
    EXPECT_EQ(parse_poly(to_string(a)), a) << to_string(a);
  }
}

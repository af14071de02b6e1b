#include "lops/char_analysis.hpp"

#include "lops/errors.hpp"
#include "lops/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <sstream>

namespace lops {

PolyMatrix build_symbol_matrix(const LeraySystem& s, bool apply_assumptions) {
  const int n = s.equation_total();
  if (n != s.unknown_total()) throw std::invalid_argument("symbol matrix needs a square system");
  PolyMatrix m = PolyMatrix::Constant(n, n, Poly{});
  const auto eo = s.equation_offsets(), uo = s.unknown_offsets();
  const Assignment assumed = apply_assumptions ? to_assignment(s.assumptions) : Assignment{};
  for (const auto& e : s.entries) {
    auto& slot = m(eo[e.eq_block] + e.eq_component, uo[e.unk_block] + e.unk_component);
    slot = assumed.empty() ? e.symbol : partial_eval(e.symbol, assumed);
  }
  return m;
}

Factorization factorization_of(const FactorsBlock& block) {
  Factorization f;
  f.scalar_prefactor = block.prefactor;
  for (const auto& d : block.factors) f.factors.push_back({d.name, d.factor, d.multiplicity});
  return f;
}

Poly expand(const Factorization& f) {
  // Equal factors listed under different names share one power.
  std::vector<std::pair<Poly, unsigned>> merged;
  for (const auto& nf : f.factors) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& m) { return m.first == nf.factor; });
    if (it == merged.end()) merged.emplace_back(nf.factor, static_cast<unsigned>(nf.multiplicity));
    else it->second += static_cast<unsigned>(nf.multiplicity);
  }
  std::vector<Poly> parts{f.scalar_prefactor};
  for (const auto& [p, k] : merged) parts.push_back(pow(p, k));
  return product(std::move(parts));
}

VerifyReport verify_factorization(const Poly& det, const Factorization& f) {
  VerifyReport r;
  const Poly diff = det - expand(f);
  r.difference_terms = diff.size();
  r.pass = diff.is_zero();
  if (!r.pass) {
    const auto& t = diff.leading_term();
    r.witness = to_string(Poly(t.monomial, t.coefficient));
  }
  return r;
}

int factor_multiplicity(Poly p, const Poly& factor) {
  if (p.is_zero() || factor.is_constant()) return 0;
  int k = 0;
  for (;;) {
    auto [q, r] = divide(p, factor);
    if (!r.is_zero()) return k;
    p = std::move(q);
    ++k;
  }
}

std::string to_string(Method m) {
  switch (m) {
    case Method::linear_exact: return "linear-exact";
    case Method::quadratic_signature: return "quadratic-signature";
    case Method::biquadratic_closed_form: return "biquadratic-closed-form";
    case Method::sampled: return "sampled";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::hyperbolic: return "hyperbolic";
    case Verdict::not_hyperbolic: return "not-hyperbolic";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

Assignment with_covector(Assignment a, const Covector& v) {
  for (int i = 0; i < 4; ++i) a[xi(i)] = v[i];
  return a;
}

std::array<double, 4> to_double(const Covector& v) {
  return {v[0].get_d(), v[1].get_d(), v[2].get_d(), v[3].get_d()};
}

// Reduces p at the parameters and insists that only ξ atoms remain.
Poly xi_only(const Poly& p, const Assignment& params) {
  Poly pe = params.empty() ? p : partial_eval(p, params);
  for (auto a : atoms_of(pe))
    if (!is_covector(a)) throw MissingAtom("no value for parameter " + atom_of(a).text());
  return pe;
}

// ---- univariate helpers over Q (ascending coefficients) ----
using UPoly = std::vector<Rational>;

void trim(UPoly& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

UPoly derivative(const UPoly& p) {
  UPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

// Quotient and remainder of a by b (b nonzero).
std::pair<UPoly, UPoly> udivmod(UPoly a, const UPoly& b) {
  trim(a);
  UPoly q;
  if (a.size() < b.size()) return {q, a};
  q.assign(a.size() - b.size() + 1, 0);
  while (!a.empty() && a.size() >= b.size()) {
    const std::size_t shift = a.size() - b.size();
    const Rational c = a.back() / b.back();
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
    trim(a);
  }
  trim(q);
  return {q, a};
}

UPoly make_monic(UPoly p) {
  trim(p);
  if (p.empty()) return p;
  const Rational lc = p.back();
  for (auto& c : p) c /= lc;
  return p;
}

UPoly ugcd(UPoly a, UPoly b) {
  a = make_monic(a);
  b = make_monic(b);
  while (!b.empty()) {
    auto r = udivmod(a, b).second;
    a = std::move(b);
    b = make_monic(r);
  }
  return a;
}

std::vector<std::complex<double>> complex_roots(const UPoly& p) {
  const auto m = make_monic(p);
  const int d = static_cast<int>(m.size()) - 1;
  if (d <= 0) return {};
  if (d == 1) return {{-m[0].get_d(), 0}};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -m[i].get_d();
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < d; ++i) out.push_back(es.eigenvalues()[i]);
  return out;
}

struct LineRoots {
  std::vector<double> real;
  double max_imag = 0;  // relative: |im| / (1 + |re|)
};

LineRoots line_roots(const Poly& pe, const Covector& eta, const Covector& tau) {
  LineRoots out;
  const auto sf = square_free(restrict_to_line(pe, eta, tau));
  for (const auto& z : complex_roots(sf)) {
    const double rel = std::abs(z.imag()) / (1 + std::abs(z.real()));
    out.max_imag = std::max(out.max_imag, rel);
    out.real.push_back(z.real());
  }
  std::sort(out.real.begin(), out.real.end());
  return out;
}

Covector direction_in(const std::array<Covector, 3>& basis, const Vec3Q& n) {
  Covector v;
  for (int m = 0; m < 4; ++m) v[m] = n[0] * basis[0][m] + n[1] * basis[1][m] + n[2] * basis[2][m];
  return v;
}

}  // namespace

std::vector<Rational> restrict_to_line(const Poly& p, const Covector& eta, const Covector& tau) {
  // powers[μ][e] = (η_μ + τ_μ s)^e
  std::array<std::vector<UPoly>, 4> powers;
  for (int mu = 0; mu < 4; ++mu) powers[mu].push_back({Rational(1)});
  auto power = [&](int mu, int e) -> const UPoly& {
    auto& v = powers[mu];
    while (static_cast<int>(v.size()) <= e) {
      const auto& last = v.back();
      UPoly next(last.size() + 1, 0);
      for (std::size_t i = 0; i < last.size(); ++i) {
        next[i] += last[i] * eta[mu];
        next[i + 1] += last[i] * tau[mu];
      }
      v.push_back(std::move(next));
    }
    return v[e];
  };
  UPoly acc;
  for (const auto& t : p.terms()) {
    UPoly term{t.coefficient};
    t.monomial.for_each([&](AtomId a, int e) {
      if (!is_covector(a)) throw MissingAtom("no value for parameter " + atom_of(a).text());
      const auto& f = power(a, e);
      UPoly prod(term.size() + f.size() - 1, 0);
      for (std::size_t i = 0; i < term.size(); ++i)
        for (std::size_t j = 0; j < f.size(); ++j) prod[i + j] += term[i] * f[j];
      term = std::move(prod);
    });
    if (acc.size() < term.size()) acc.resize(term.size(), 0);
    for (std::size_t i = 0; i < term.size(); ++i) acc[i] += term[i];
  }
  trim(acc);
  return acc;
}

std::vector<Rational> square_free(const std::vector<Rational>& coeffs) {
  UPoly f = coeffs;
  trim(f);
  if (f.size() <= 2) return f;
  const UPoly g = ugcd(f, derivative(f));
  if (g.size() <= 1) return f;
  return udivmod(f, g).first;
}

std::array<Covector, 3> transverse_basis(const Covector& tau) {
  Rational tt = 0;
  for (const auto& c : tau) tt += c * c;
  if (sgn(tt) == 0) throw std::invalid_argument("tau must be nonzero");
  std::vector<Covector> basis;
  for (int i = 0; i < 4 && basis.size() < 3; ++i) {
    Covector v{0, 0, 0, 0};
    v[i] = 1;
    auto project = [&](const Covector& w) {
      Rational vw = 0, ww = 0;
      for (int m = 0; m < 4; ++m) {
        vw += v[m] * w[m];
        ww += w[m] * w[m];
      }
      for (int m = 0; m < 4; ++m) v[m] -= vw / ww * w[m];
    };
    project(tau);
    for (const auto& b : basis) project(b);
    if (std::any_of(v.begin(), v.end(), [](const Rational& c) { return sgn(c) != 0; })) basis.push_back(v);
  }
  return {basis[0], basis[1], basis[2]};
}

HyperbolicityVerdict hyperbolicity_linear(const Poly& p, const Covector& tau, const Assignment& params) {
  const Poly pe = params.empty() ? p : partial_eval(p, params);
  const auto h = xi_homogeneity(pe);
  if (h.zero || !h.homogeneous || h.degree != 1) throw DegreeMismatch("linear test needs a xi-homogeneous polynomial of degree 1");
  HyperbolicityVerdict v;
  v.method = Method::linear_exact;
  const Rational at_tau = eval(pe, with_covector(params, tau));
  v.verdict = sgn(at_tau) != 0 ? Verdict::hyperbolic : Verdict::not_hyperbolic;
  v.detail = "p(tau) = " + to_string(at_tau);
  if (v.verdict == Verdict::not_hyperbolic) v.witness = to_double(tau);
  return v;
}

RationalMatrix quadratic_form_matrix(const Poly& p) {
  RationalMatrix q = RationalMatrix::Constant(4, 4, Rational(0));
  for (const auto& t : p.terms()) {
    std::vector<int> idx;
    t.monomial.for_each([&](AtomId a, int e) {
      if (!is_covector(a)) throw MissingAtom("no value for parameter " + atom_of(a).text());
      for (int k = 0; k < e; ++k) idx.push_back(a);
    });
    if (idx.size() != 2) throw DegreeMismatch("quadratic form needs degree 2 terms");
    if (idx[0] == idx[1]) {
      q(idx[0], idx[0]) += t.coefficient;
    } else {
      q(idx[0], idx[1]) += t.coefficient / 2;
      q(idx[1], idx[0]) += t.coefficient / 2;
    }
  }
  return q;
}

SignatureCounts signature(RationalMatrix q) {
  const Eigen::Index n = q.rows();
  SignatureCounts s;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = k; i < n && piv < 0; ++i)
      if (sgn(q(i, i)) != 0) piv = i;
    if (piv < 0) {
      // All remaining diagonal entries vanish; mix in an off-diagonal pair.
      for (Eigen::Index i = k; i < n && piv < 0; ++i)
        for (Eigen::Index j = k; j < n; ++j)
          if (i != j && sgn(q(i, j)) != 0) {
            q.row(i) += q.row(j);
            q.col(i) += q.col(j);
            piv = i;
            break;
          }
    }
    if (piv < 0) {
      s.zero += static_cast<int>(n - k);
      break;
    }
    if (piv != k) {
      q.row(k).swap(q.row(piv));
      q.col(k).swap(q.col(piv));
    }
    const Rational d = q(k, k);
    (sgn(d) > 0 ? s.positive : s.negative) += 1;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (sgn(q(i, k)) == 0) continue;
      const Rational f = q(i, k) / d;
      for (Eigen::Index j = k; j < n; ++j) q(i, j) -= f * q(k, j);
      for (Eigen::Index j = k; j < n; ++j) q(j, i) = q(i, j);
    }
  }
  return s;
}

HyperbolicityVerdict hyperbolicity_quadratic(const Poly& p, const Covector& tau, const Assignment& params) {
  const Poly pe = xi_only(p, params);
  const auto h = xi_homogeneity(pe);
  if (h.zero || !h.homogeneous || h.degree != 2) throw DegreeMismatch("quadratic test needs a xi-homogeneous polynomial of degree 2");
  const auto s = signature(quadratic_form_matrix(pe));
  const Rational at_tau = eval(pe, with_covector({}, tau));
  HyperbolicityVerdict v;
  v.method = Method::quadratic_signature;
  v.positive = s.positive;
  v.negative = s.negative;
  v.zero = s.zero;
  std::ostringstream d;
  d << "signature (" << s.positive << "," << s.negative << "," << s.zero << "), p(tau) = " << to_string(at_tau);
  v.detail = d.str();
  if (s.positive >= 2 || sgn(at_tau) <= 0) {
    v.verdict = Verdict::not_hyperbolic;
    if (sgn(at_tau) <= 0) v.witness = to_double(tau);
    return v;
  }
  if (s.zero > 0) throw DegeneracyDetected("quadratic form is singular: " + v.detail);
  v.verdict = s.positive == 1 && s.negative == 3 ? Verdict::hyperbolic : Verdict::not_hyperbolic;
  return v;
}

HyperbolicityVerdict hyperbolicity_sampled(const Poly& p, const Covector& tau, const Assignment& params, std::size_t n_samples,
                                           double tol, std::uint64_t seed) {
  if (n_samples < 1 || !(tol > 0)) throw std::invalid_argument("need at least one sample and a positive tolerance");
  const Poly pe = xi_only(p, params);
  const auto h = xi_homogeneity(pe);
  if (h.zero || !h.homogeneous) throw DegreeMismatch("sampled test needs a nonzero xi-homogeneous polynomial");
  if (sgn(eval(pe, with_covector({}, tau))) == 0) throw LeadingCoefficientVanishes("p(tau) = 0");

  const auto basis = transverse_basis(tau);
  const auto dirs = sphere_directions(n_samples, seed);
  std::vector<double> worst(n_samples, 0);
  parallel_for(n_samples, [&](std::size_t i) { worst[i] = line_roots(pe, direction_in(basis, dirs[i]), tau).max_imag; });

  HyperbolicityVerdict v;
  v.method = Method::sampled;
  v.samples = n_samples;
  v.tolerance = tol;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < n_samples; ++i)
    if (worst[i] > worst[arg]) arg = i;
  v.max_imag = worst[arg];
  v.verdict = v.max_imag <= tol ? Verdict::hyperbolic : Verdict::not_hyperbolic;
  if (v.verdict == Verdict::not_hyperbolic) v.witness = to_double(direction_in(basis, dirs[arg]));
  char buf[96];
  std::snprintf(buf, sizeof buf, "max relative |imag| = %.3e over %zu directions", v.max_imag, n_samples);
  v.detail = buf;
  return v;
}

std::optional<std::array<Poly, 3>> biquadratic_coefficients(const Poly& P) {
  for (const auto& t : P.terms()) {
    const int e = t.monomial.exponent(xi(0));
    if (e != 0 && e != 2 && e != 4) return std::nullopt;
  }
  return std::array<Poly, 3>{coefficient(P, xi(0), 4), coefficient(P, xi(0), 2), coefficient(P, xi(0), 0)};
}

BiquadraticSplit biquadratic_split(const Poly& A, const Poly& B, const Poly& C, const Assignment& params) {
  if (A.is_zero() || (!params.empty() && partial_eval(A, params).is_zero()))
    throw LeadingCoefficientZero("leading coefficient A vanishes");
  BiquadraticSplit s{A, B, C, {}, {}, {}, {}, {}, false};
  const Poly x2 = Poly::variable(xi(0), 2);
  s.P = A * x2 * x2 + B * x2 + C;
  s.discriminant = B * B - Poly(4) * A * C;
  Poly rem;
  auto root = poly_sqrt(s.discriminant, &rem);
  if (!root) {
    auto text = to_string(rem);
    if (text.size() > 400) text = text.substr(0, 400) + " ...";
    throw NotPerfectSquare("B^2 - 4AC is not a perfect square", text);
  }
  s.root = *root;
  const Poly base = Poly(2) * A * x2 + B;
  s.P1 = base - s.root;
  s.P2 = base + s.root;
  if (exact_div(Poly(4) * A * s.P, s.P1) != s.P2) throw std::logic_error("split factors do not reproduce 4A*P");
  auto d1 = divide(s.P1, Poly(2) * A), d2 = divide(s.P2, Poly(2) * A);
  if (d1.remainder.is_zero() && d2.remainder.is_zero() && A * d1.quotient * d2.quotient == s.P) {
    s.P1 = d1.quotient;
    s.P2 = d2.quotient;
    s.monic = true;
  }
  return s;
}

std::array<Poly, 3> printed_abc() {
  const Poly F = Poly::variable(param("F")), q = Poly::variable(param("q"));
  const Poly x1 = Poly::variable(xi(1)), x2 = Poly::variable(xi(2)), x3 = Poly::variable(xi(3));
  const Poly X1 = Poly::variable(param("gu11")) * x1, X2 = Poly::variable(param("gu22")) * x2,
             X3 = Poly::variable(param("gu33")) * x3;
  const Poly two = 2;
  const Poly A = F + q;
  const Poly B = two * F * x1 * X1 + two * q * x1 * X1 + two * F * x2 * X2 + two * q * x2 * X2 + q * x3 * X2 + two * F * x3 * X3 +
                 q * x3 * X3;
  const Poly C = F * pow(x1 * X1, 2) + q * pow(x1 * X1, 2) + two * F * x1 * X2 * x2 * X2 + two * q * x1 * X2 * x2 * X2 +
                 q * x1 * x3 * X1 * X2 + F * pow(x2 * X2, 2) + q * pow(x2 * X2, 2) + q * x2 * x3 * pow(x2, 2) +
                 two * F * x1 * x3 * X1 * X3 + q * x1 * x3 * X1 * X3 + two * F * x2 * x3 * X2 * X3 + q * x2 * x3 * X2 * X3 +
                 q * pow(x3, 2) * X2 * X3 + F * pow(x3 * X3, 2);
  return {A, B, C};
}

namespace {

bool manifestly_nonnegative(const Poly& p) {
  for (const auto& t : p.terms()) {
    if (sgn(t.coefficient) <= 0) return false;
    bool even = true;
    t.monomial.for_each([&](AtomId a, int e) {
      if (is_covector(a) && e % 2) even = false;
    });
    if (!even) return false;
  }
  return true;
}

}  // namespace

std::vector<std::pair<Rational, Rational>> standard_fq_grid() {
  std::vector<std::pair<Rational, Rational>> g;
  for (int F : {1, 2, 10})
    for (const Rational& q : {Rational(1, 10), Rational(1, 2), Rational(3)}) g.emplace_back(F, q);
  return g;
}

InequalityReport verify_minkowski_inequalities(const Poly& b_derived, const Poly& root_derived,
                                               const std::vector<std::pair<Rational, Rational>>& grid, std::size_t directions,
                                               std::uint64_t seed) {
  InequalityReport r;
  const Poly F = Poly::variable(param("F")), q = Poly::variable(param("q"));
  const Poly x1 = Poly::variable(xi(1)), x2 = Poly::variable(xi(2)), x3 = Poly::variable(xi(3));
  const Poly two = 2, half = Poly(Rational(1, 2));
  auto line = [&](std::string name, const Poly& lhs, const Poly& rhs) {
    r.identities.push_back({std::move(name), to_string(lhs), to_string(rhs), lhs == rhs});
  };

  // Printed −B at Minkowski with the q ξ₃ξ₂ term set aside.
  const Poly E = two * (F + q) * (x1 * x1 + x2 * x2 + half * x3 * x3) + F * x3 * x3;
  auto [pa, pb, pc] = printed_abc();
  const Assignment mink{{param("gu11"), -1}, {param("gu22"), -1}, {param("gu33"), -1}};
  const Poly minus_b_printed = -partial_eval(pb, mink);
  line("printed -B at Minkowski = E + q*xi2*xi3", minus_b_printed, E + q * x2 * x3);

  // Case xi2 >= xi3.
  const Poly c1_first = E - q * x3 * x2 - q * x3 * (x2 - x3);
  const Poly c1_second = two * (F + q) * (x1 * x1 + x2 * x2 + half * x3 * x3) + (F + q) * x3 * x3 - two * q * x2 * x3;
  const Poly c1_bound = two * (F + q) * (x1 * x1 + x2 * x2 + half * x3 * x3) + (F + q) * x3 * x3 - two * q * x2 * x2;
  const Poly c1_final = two * (F + q) * x1 * x1 + two * F * x2 * x2 + two * (F + q) * x3 * x3;
  line("case xi2>=xi3: expansion", c1_first, c1_second);
  line("case xi2>=xi3: bound gap = 2q*xi2*(xi2-xi3)", c1_second - c1_bound, two * q * x2 * (x2 - x3));
  line("case xi2>=xi3: reduced form", c1_bound, c1_final);

  // Case xi2 <= xi3.
  const Poly c2_first = E - q * x3 * x2 - q * x3 * (x3 - x2);
  const Poly c2_second = two * (F + q) * (x1 * x1 + x2 * x2) + (F + q) * x3 * x3 + F * x3 * x3 - q * x3 * x3;
  const Poly c2_final = two * (F + q) * (x1 * x1 + x2 * x2) + two * F * x3 * x3;
  line("case xi2<=xi3: expansion", c2_first, c2_second);
  line("case xi2<=xi3: reduced form", c2_second, c2_final);

  // Derived form: −B − √disc written out.
  const Poly derived_value = -b_derived - root_derived;
  r.manifestly_nonnegative = manifestly_nonnegative(c1_final) && manifestly_nonnegative(c2_final) &&
                             (manifestly_nonnegative(derived_value) || derived_value.is_zero());

  const auto dirs = sphere_directions(directions, seed);
  const Poly claimed_root = q * x3 * (x2 - x3);
  auto sample = [&](const Poly& minus_b, const Poly& root, const Rational& Fv, const Rational& qv) {
    InequalitySample s{Fv, qv, dirs.size(), 0, 0};
    const Poly mb = partial_eval(minus_b, {{param("F"), Fv}, {param("q"), qv}});
    const Poly rt = partial_eval(root, {{param("F"), Fv}, {param("q"), qv}});
    std::vector<Rational> values(dirs.size());
    parallel_for(dirs.size(), [&](std::size_t i) {
      const Assignment at{{xi(1), dirs[i][0]}, {xi(2), dirs[i][1]}, {xi(3), dirs[i][2]}};
      values[i] = eval(mb, at) - abs(eval(rt, at));
    });
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i == 0 || values[i] < s.minimum) s.minimum = values[i];
      if (sgn(values[i]) < 0) ++s.violations;
    }
    return s;
  };
  for (const auto& [Fv, qv] : grid) {
    r.derived_samples.push_back(sample(-b_derived, root_derived, Fv, qv));
    r.printed_samples.push_back(sample(minus_b_printed, claimed_root, Fv, qv));
  }

  r.pass = r.manifestly_nonnegative;
  for (const auto& id : r.identities) r.pass = r.pass && id.holds;
  for (const auto& s : r.derived_samples) r.pass = r.pass && s.violations == 0;
  for (const auto& s : r.printed_samples) r.pass = r.pass && s.violations == 0;
  return r;
}

std::optional<Rational> gevrey_sigma(const std::vector<FactorVerdict>& factors) {
  int q = 0;
  for (const auto& f : factors) {
    if (f.verdict != Verdict::hyperbolic) throw NotAllHyperbolic("every factor must be verified hyperbolic");
    if (f.multiplicity < 1) throw std::invalid_argument("factor multiplicity must be >= 1");
    q += f.multiplicity;
  }
  if (q == 0) throw std::invalid_argument("no factors");
  if (q == 1) return std::nullopt;
  return Rational(q, q - 1);
}

ConeSamples cone_sample(const Poly& p, const Covector& tau, const Assignment& params, std::size_t n, std::uint64_t seed,
                        const Poly* light, double tol) {
  const Poly pe = xi_only(p, params);
  const Poly le = light ? xi_only(*light, params) : Poly{};
  const auto basis = transverse_basis(tau);
  const auto dirs = sphere_directions(n, seed);
  ConeSamples out;
  out.rows.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const Covector eta = direction_in(basis, dirs[i]);
    auto& row = out.rows[i];
    row.direction = to_double(eta);
    for (double x : line_roots(pe, eta, tau).real) row.roots.push_back(x);
    if (light) row.light_roots = line_roots(le, eta, tau).real;
  });
  for (const auto& row : out.rows) {
    for (double x : row.roots) out.max_speed = std::max(out.max_speed, std::abs(x));
    if (light && !row.light_roots.empty()) {
      const double lo = row.light_roots.front(), hi = row.light_roots.back();
      for (double x : row.roots)
        if (x < lo - tol * (1 + std::abs(lo)) || x > hi + tol * (1 + std::abs(hi))) out.within_light_cone = false;
    }
  }
  return out;
}

std::string cone_csv(const ConeSamples& c) {
  std::ostringstream out;
  out << "eta0,eta1,eta2,eta3,roots\n";
  char buf[64];
  for (const auto& row : c.rows) {
    for (int i = 0; i < 4; ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", row.direction[i]);
      out << buf << ",";
    }
    for (std::size_t k = 0; k < row.roots.size(); ++k) {
      // Normalise -0 so output stays byte-stable.
      const double x = std::abs(row.roots[k]) < 1e-15 ? 0.0 : row.roots[k];
      std::snprintf(buf, sizeof buf, "%.12g", x);
      out << (k ? " " : "") << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace lops

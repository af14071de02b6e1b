#include "lops/poly.hpp"

#include "lops/errors.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace lops {

namespace {

bool descending(const Term& a, const Term& b) { return a.monomial > b.monomial; }

Integer denominator_lcm(const Poly& p) {
  Integer l = 1;
  for (const auto& t : p.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coefficient.get_den_mpz_t());
  return l;
}

std::vector<Integer> scaled_numerators(const Poly& p, const Integer& l) {
  std::vector<Integer> out;
  out.reserve(p.size());
  for (const auto& t : p.terms()) {
    Integer f = l / t.coefficient.get_den();
    out.push_back(t.coefficient.get_num() * f);
  }
  return out;
}


// Per-atom power cache used by evaluation routines.
class PowerTable {
 public:
  explicit PowerTable(const Assignment& values) {
    for (const auto& [a, v] : values) {
      if (a >= table_.size()) table_.resize(a + 1);
      table_[a].emplace();
      table_[a]->push_back(1);
      table_[a]->push_back(v);
    }
  }
  bool has(AtomId a) const { return a < table_.size() && table_[a].has_value(); }
  const Rational& power(AtomId a, int e) {
    auto& v = *table_[a];
    while (static_cast<int>(v.size()) <= e) v.push_back(v.back() * v[1]);
    return v[e];
  }

 private:
  std::vector<std::optional<std::vector<Rational>>> table_;
};

}  // namespace

Poly::Poly(int c) : Poly(Rational(c)) {}

Poly::Poly(const Rational& c) {
  if (sgn(c) != 0) terms_.push_back({Monomial{}, c});
}

Poly::Poly(const Monomial& m, const Rational& c) {
  if (sgn(c) != 0) terms_.push_back({m, c});
}

Poly Poly::variable(AtomId atom, int exponent) { return Poly(Monomial::of(atom, exponent)); }

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), descending);
  Poly p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().monomial == t.monomial) {
      p.terms_.back().coefficient += t.coefficient;
      if (sgn(p.terms_.back().coefficient) == 0) p.terms_.pop_back();
    } else if (sgn(t.coefficient) != 0) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

Rational Poly::constant_term() const {
  if (!terms_.empty() && terms_.back().monomial.is_one()) return terms_.back().coefficient;
  return 0;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.terms_) t.coefficient = -t.coefficient;
  return r;
}

namespace {

/// Merge of two descending term lists, a + sign·b.
std::vector<Term> merge_terms(std::vector<Term>& a, const std::vector<Term>& b, int sign) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  auto take_b = [&](const Term& t) {
    out.push_back(t);
    if (sign < 0) out.back().coefficient = -out.back().coefficient;
  };
  while (i < a.size() && j < b.size()) {
    const auto c = a[i].monomial <=> b[j].monomial;
    if (c > 0) {
      out.push_back(std::move(a[i++]));
    } else if (c < 0) {
      take_b(b[j++]);
    } else {
      if (sign > 0) a[i].coefficient += b[j].coefficient;
      else a[i].coefficient -= b[j].coefficient;
      if (sgn(a[i].coefficient) != 0) out.push_back(std::move(a[i]));
      ++i;
      ++j;
    }
  }
  for (; i < a.size(); ++i) out.push_back(std::move(a[i]));
  for (; j < b.size(); ++j) take_b(b[j]);
  return out;
}

}  // namespace

Poly& Poly::operator+=(const Poly& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  terms_ = merge_terms(terms_, o.terms_, 1);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.is_zero()) return *this;
  if (&o == this) return *this = Poly{};
  terms_ = merge_terms(terms_, o.terms_, -1);
  return *this;
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (b.size() == 1) {
    // Multiplying by a single term preserves the order.
    Poly r;
    r.terms_.reserve(a.size());
    const auto& [m, c] = b.terms_[0];
    for (const auto& t : a.terms_) r.terms_.push_back({t.monomial * m, t.coefficient * c});
    return r;
  }
  if (a.size() == 1) return b * a;

  const Integer da = denominator_lcm(a), db = denominator_lcm(b);
  const auto na = scaled_numerators(a, da), nb = scaled_numerators(b, db);
  std::unordered_map<Monomial, Integer, MonomialHash> acc;
  acc.reserve(std::min<std::size_t>(a.size() * b.size(), std::size_t{1} << 22));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& mi = a.terms_[i].monomial;
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto& slot = acc[mi * b.terms_[j].monomial];
      mpz_addmul(slot.get_mpz_t(), na[i].get_mpz_t(), nb[j].get_mpz_t());
    }
  }
  const Integer d = da * db;
  Poly r;
  r.terms_.reserve(acc.size());
  for (auto& [m, v] : acc) {
    if (sgn(v) == 0) continue;
    Rational c(v, d);
    c.canonicalize();
    r.terms_.push_back({m, std::move(c)});
  }
  std::sort(r.terms_.begin(), r.terms_.end(), descending);
  return r;
}

Poly add(const Poly& a, const Poly& b) { return a + b; }
Poly mul(const Poly& a, const Poly& b) { return a * b; }

Poly pow(const Poly& p, unsigned k) {
  Poly result = 1, base = p;
  while (k) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k) base = base * base;
  }
  return result;
}

Poly scale(const Poly& p, const Rational& c) { return p * Poly(c); }

DivisionResult divide(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw std::domain_error("division by the zero polynomial");
  const auto& [lm, lc] = den.leading_term();
  if (den.size() == 1) {
    std::vector<Term> q, r;
    for (const auto& t : num.terms()) {
      if (auto m = t.monomial.divided_by(lm))
        q.push_back({*m, t.coefficient / lc});
      else
        r.push_back(t);
    }
    return {Poly::from_terms(std::move(q)), Poly::from_terms(std::move(r))};
  }
  std::map<Monomial, Rational, std::greater<>> work;
  for (const auto& t : num.terms()) work.emplace(t.monomial, t.coefficient);
  std::vector<Term> q, r;
  while (!work.empty()) {
    auto top = work.begin();
    auto m = top->first.divided_by(lm);
    if (!m) {
      r.push_back({top->first, top->second});
      work.erase(top);
      continue;
    }
    const Rational c = top->second / lc;
    work.erase(top);
    for (std::size_t k = 1; k < den.size(); ++k) {
      const auto& t = den.terms()[k];
      auto [it, inserted] = work.try_emplace(t.monomial * *m, 0);
      it->second -= c * t.coefficient;
      if (sgn(it->second) == 0) work.erase(it);
    }
    q.push_back({std::move(*m), c});
  }
  return {Poly::from_terms(std::move(q)), Poly::from_terms(std::move(r))};
}

Poly exact_div(const Poly& num, const Poly& den) {
  auto [q, r] = divide(num, den);
  if (!r.is_zero()) {
    auto text = to_string(r);
    if (text.size() > 400) text = text.substr(0, 400) + " ...";
    throw NotDivisible("polynomial is not divisible by " + (den.size() > 8 ? std::string("the divisor") : to_string(den)), text);
  }
  return q;
}

Rational eval(const Poly& p, const Assignment& values) {
  PowerTable pw(values);
  Rational sum = 0;
  for (const auto& t : p.terms()) {
    Rational v = t.coefficient;
    t.monomial.for_each([&](AtomId a, int e) {
      if (!pw.has(a)) throw MissingAtom("no value for atom " + atom_of(a).text());
      v *= pw.power(a, e);
    });
    sum += v;
  }
  return sum;
}

Poly partial_eval(const Poly& p, const Assignment& values) {
  PowerTable pw(values);
  std::vector<Term> out;
  out.reserve(p.size());
  for (const auto& t : p.terms()) {
    Term n{Monomial{}, t.coefficient};
    t.monomial.for_each([&](AtomId a, int e) {
      if (pw.has(a))
        n.coefficient *= pw.power(a, e);
      else
        n.monomial.set_exponent(a, e);
    });
    out.push_back(std::move(n));
  }
  return Poly::from_terms(std::move(out));
}

Poly substitute(const Poly& p, const std::map<AtomId, Poly>& bindings) {
  std::map<std::pair<AtomId, int>, Poly> cache;
  auto bound_power = [&](AtomId a, int e) -> const Poly& {
    auto key = std::make_pair(a, e);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    return cache.emplace(key, pow(bindings.at(a), static_cast<unsigned>(e))).first->second;
  };
  std::unordered_map<Monomial, Rational, MonomialHash> acc;
  for (const auto& t : p.terms()) {
    Monomial free;
    Poly factor = 1;
    t.monomial.for_each([&](AtomId a, int e) {
      if (bindings.count(a))
        factor = factor * bound_power(a, e);
      else
        free.set_exponent(a, e);
    });
    for (const auto& s : factor.terms()) acc[s.monomial * free] += s.coefficient * t.coefficient;
  }
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [m, c] : acc) out.push_back({m, std::move(c)});
  return Poly::from_terms(std::move(out));
}

int degree(const Poly& p) {
  int d = -1;
  for (const auto& t : p.terms()) d = std::max(d, t.monomial.total_degree());
  return d;
}

int degree_in(const Poly& p, AtomId atom) {
  int d = p.is_zero() ? -1 : 0;
  for (const auto& t : p.terms()) d = std::max(d, t.monomial.exponent(atom));
  return d;
}

Homogeneity homogeneous_degree_in(const Poly& p, const std::vector<AtomId>& atoms) {
  if (p.is_zero()) return {true, true, 0};
  Homogeneity h{false, true, p.leading_term().monomial.degree_in(atoms)};
  for (const auto& t : p.terms()) {
    if (t.monomial.degree_in(atoms) != h.degree) {
      h.homogeneous = false;
      break;
    }
  }
  return h;
}

Homogeneity xi_homogeneity(const Poly& p) {
  if (p.is_zero()) return {true, true, 0};
  Homogeneity h{false, true, p.leading_term().monomial.xi_degree()};
  for (const auto& t : p.terms()) {
    if (t.monomial.xi_degree() != h.degree) {
      h.homogeneous = false;
      break;
    }
  }
  return h;
}

Poly coefficient(const Poly& p, AtomId atom, int k) {
  std::vector<Term> out;
  for (const auto& t : p.terms())
    if (t.monomial.exponent(atom) == k) out.push_back({t.monomial.without(atom), t.coefficient});
  return Poly::from_terms(std::move(out));
}

std::vector<AtomId> atoms_of(const Poly& p) {
  std::vector<AtomId> out;
  for (const auto& t : p.terms()) t.monomial.for_each([&](AtomId a, int) { out.push_back(a); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Monomial monomial_content(const Poly& p) {
  if (p.is_zero()) return {};
  Monomial g = p.leading_term().monomial;
  for (const auto& t : p.terms()) {
    if (g.is_one()) break;
    g = g.gcd(t.monomial);
  }
  return g;
}

Poly monic(const Poly& p) {
  if (p.is_zero()) return p;
  return scale(p, 1 / p.leading_term().coefficient);
}

std::optional<Poly> poly_sqrt(const Poly& p, Poly* remainder) {
  if (p.is_zero()) return Poly{};
  const auto& [lm, lc] = p.leading_term();
  auto fail = [&](const Poly& rem) -> std::optional<Poly> {
    if (remainder) *remainder = rem;
    return std::nullopt;
  };
  auto c0 = rational_sqrt(lc);
  if (!c0) return fail(p);
  Monomial m0;
  bool even = true;
  lm.for_each([&](AtomId a, int e) {
    if (e % 2) even = false;
    else m0.set_exponent(a, e / 2);
  });
  if (!even) return fail(p);

  // Exponent ceiling for any root term: half the largest exponent in p.
  std::map<AtomId, int> ceiling;
  for (const auto& t : p.terms()) t.monomial.for_each([&](AtomId a, int e) { ceiling[a] = std::max(ceiling[a], e / 2); });
  const Monomial trailing = p.terms().back().monomial;

  Poly root(m0, *c0);
  const Poly twice_lead(m0, 2 * *c0);
  Poly rem = p - root * root;
  Monomial last = m0;
  while (!rem.is_zero()) {
    const auto& [rm, rc] = rem.leading_term();
    auto m = rm.divided_by(m0);
    if (!m || !(*m < last) || m0 * *m < trailing) return fail(rem);
    bool bounded = true;
    m->for_each([&](AtomId a, int e) {
      auto it = ceiling.find(a);
      if (it == ceiling.end() || e > it->second) bounded = false;
    });
    if (!bounded) return fail(rem);
    const Poly t(*m, rc / (2 * *c0));
    rem -= (root + root + t) * t;
    root += t;
    last = *m;
  }
  if (remainder) *remainder = Poly{};
  return root;
}

std::string to_string(const Monomial& m) {
  std::string s;
  m.for_each([&](AtomId a, int e) {
    if (!s.empty()) s += '*';
    s += atom_of(a).text();
    if (e != 1) s += '^' + std::to_string(e);
  });
  return s;
}

std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const bool neg = sgn(c) < 0;
    if (first)
      s += neg ? "-" : "";
    else
      s += neg ? " - " : " + ";
    first = false;
    const Rational mag = abs(c);
    if (m.is_one()) {
      s += to_string(mag);
    } else {
      if (mag != 1) s += to_string(mag) + "*";
      s += to_string(m);
    }
  }
  return s;
}

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, const AtomResolver& resolve, std::size_t line, std::size_t column0)
      : text_(text), resolve_(resolve), line_(line), column0_(column0) {}

  Poly run() {
    skip();
    if (pos_ >= text_.size()) fail("expected a polynomial");
    Poly p = expr();
    skip();
    if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, column0_ + pos_, msg); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly acc;
    bool neg = false;
    if (eat('-')) neg = true;
    else eat('+');
    acc = term();
    if (neg) acc = -acc;
    for (;;) {
      if (eat('+')) acc += term();
      else if (eat('-')) acc -= term();
      else return acc;
    }
  }

  Poly term() {
    Poly acc = factor();
    for (;;) {
      if (eat('*')) {
        acc = acc * factor();
      } else if (eat('/')) {
        skip();
        const auto at = pos_;
        Poly d = factor();
        if (!d.is_constant()) {
          pos_ = at;
          fail("division is only allowed by a constant");
        }
        if (d.is_zero()) {
          pos_ = at;
          fail("division by zero");
        }
        acc = scale(acc, 1 / d.constant_term());
      } else {
        return acc;
      }
    }
  }

  Poly factor() {
    skip();
    if (eat('-')) return -factor();
    Poly base = primary();
    if (eat('^')) {
      skip();
      const auto start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected an integer exponent");
      if (pos_ - start > 4) fail("exponent too large");
      base = pow(base, static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start)))));
    }
    return base;
  }

  Poly primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of polynomial");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Poly p = expr();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const auto start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return Poly(Rational(Integer(std::string(text_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const auto start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      const auto name = text_.substr(start, pos_ - start);
      const AtomId id = resolve_ ? resolve_(name, column0_ + start) : default_atom(name);
      return Poly::variable(id);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  static AtomId default_atom(std::string_view name) {
    if (auto id = find_atom(name)) return *id;
    return param(name);
  }

  std::string_view text_;
  const AtomResolver& resolve_;
  std::size_t line_;
  std::size_t column0_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, const AtomResolver& resolve, std::size_t line, std::size_t column0) {
  return PolyParser(text, resolve, line, column0).run();
}

}  // namespace lops

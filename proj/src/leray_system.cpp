#include "lops/leray_system.hpp"

#include "lops/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace lops {

std::optional<std::size_t> LeraySystem::unknown_index(std::string_view n) const {
  for (std::size_t i = 0; i < unknowns.size(); ++i)
    if (unknowns[i].name == n) return i;
  return std::nullopt;
}

std::optional<std::size_t> LeraySystem::equation_index(std::string_view n) const {
  for (std::size_t i = 0; i < equations.size(); ++i)
    if (equations[i].name == n) return i;
  return std::nullopt;
}

int LeraySystem::unknown_total() const {
  int t = 0;
  for (const auto& u : unknowns) t += u.multiplicity;
  return t;
}

int LeraySystem::equation_total() const {
  int t = 0;
  for (const auto& e : equations) t += e.multiplicity;
  return t;
}

std::vector<int> LeraySystem::equation_offsets() const {
  std::vector<int> out;
  int acc = 0;
  for (const auto& e : equations) {
    out.push_back(acc);
    acc += e.multiplicity;
  }
  return out;
}

std::vector<int> LeraySystem::unknown_offsets() const {
  std::vector<int> out;
  int acc = 0;
  for (const auto& u : unknowns) {
    out.push_back(acc);
    acc += u.multiplicity;
  }
  return out;
}

namespace {

bool is_reserved(std::string_view name) {
  return name.size() == 3 && name.substr(0, 2) == "xi" && name[2] >= '0' && name[2] <= '3';
}

// Cursor over one line of the DSL; columns are 1-based.
class LineCursor {
 public:
  LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, pos_ + 1, msg); }
  [[noreturn]] void fail_at(std::size_t column, const std::string& msg) const { throw ParseError(line_, column, msg); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }
  std::size_t column() const { return pos_ + 1; }

  std::string identifier(const char* what) {
    skip();
    const auto start = pos_;
    if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    }
    if (start == pos_) fail(std::string("expected ") + what);
    return std::string(text_.substr(start, pos_ - start));
  }

  void keyword(std::string_view kw) {
    skip();
    const auto save = pos_;
    if (identifier_or_empty() != kw) {
      pos_ = save;
      fail("expected '" + std::string(kw) + "'");
    }
  }

  void symbol(std::string_view sym) {
    skip();
    if (text_.substr(pos_, sym.size()) != sym) fail("expected '" + std::string(sym) + "'");
    pos_ += sym.size();
  }

  int integer(const char* what, int min_value) {
    skip();
    const auto start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const auto tok = text_.substr(start, pos_ - start);
    if (tok.empty() || tok == "-") {
      pos_ = start;
      fail(std::string("expected integer ") + what);
    }
    if (tok.size() > 6) {
      pos_ = start;
      fail(std::string(what) + " out of range");
    }
    const int v = std::stoi(std::string(tok));
    if (v < min_value) {
      pos_ = start;
      fail(std::string(what) + " must be >= " + std::to_string(min_value));
    }
    return v;
  }

  Rational rational() {
    skip();
    const auto start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    try {
      return parse_rational(text_.substr(start, pos_ - start));
    } catch (const std::exception&) {
      pos_ = start;
      fail("expected a rational number");
    }
  }

  std::string_view rest() {
    skip();
    auto r = text_.substr(pos_);
    pos_ = text_.size();
    return r;
  }

  void finish() {
    if (!at_end()) fail("unexpected trailing text '" + std::string(text_.substr(pos_)) + "'");
  }

 private:
  std::string identifier_or_empty() {
    const auto start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

class SystemParser {
 public:
  LeraySystem run(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      auto line = text.substr(start, end - start);
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      parse_line(line, line_no);
      if (end == text.size()) break;
      start = end + 1;
    }
    if (in_factors_) throw ParseError(line_no, 1, "unterminated factors block (missing 'end')");
    return std::move(sys_);
  }

 private:
  void parse_line(std::string_view text, std::size_t line) {
    LineCursor c(text, line);
    if (c.at_end()) return;
    const auto kw_col = c.column();
    const std::string kw = c.identifier("a declaration keyword");
    if (in_factors_) {
      parse_factor_line(c, kw, kw_col, line);
      return;
    }
    if (kw == "system") {
      sys_.name = c.identifier("system name");
    } else if (kw == "param") {
      parse_param(c);
    } else if (kw == "unknown" || kw == "equation") {
      parse_block(c, kw == "unknown");
    } else if (kw == "entry") {
      parse_entry(c, line);
    } else if (kw == "depends") {
      parse_depends(c);
    } else if (kw == "assume" || kw == "point") {
      c.skip();
      const auto col = c.column();
      auto name = c.identifier("parameter name");
      if (!declared_.count(name)) throw UnknownAtom(line, col, "undeclared parameter '" + name + "'");
      c.symbol("=");
      auto& target = kw == "assume" ? sys_.assumptions : sys_.point;
      target.emplace_back(name, c.rational());
    } else if (kw == "factors") {
      c.symbol(":");
      if (sys_.factors) c.fail("duplicate factors block");
      sys_.factors.emplace();
      in_factors_ = true;
    } else {
      throw ParseError(line, kw_col, "unknown declaration '" + kw + "'");
    }
    c.finish();
  }

  void parse_factor_line(LineCursor& c, const std::string& kw, std::size_t kw_col, std::size_t line) {
    if (kw == "end") {
      in_factors_ = false;
    } else if (kw == "prefactor") {
      c.symbol(":=");
      sys_.factors->prefactor = poly(c, line);
    } else if (kw == "factor") {
      FactorDecl f;
      f.name = c.identifier("factor name");
      c.keyword("multiplicity");
      f.multiplicity = c.integer("multiplicity", 1);
      c.symbol(":=");
      f.factor = poly(c, line);
      sys_.factors->factors.push_back(std::move(f));
    } else {
      throw ParseError(line, kw_col, "expected 'prefactor', 'factor' or 'end' inside factors block");
    }
    c.finish();
  }

  void parse_param(LineCursor& c) {
    ParamDecl p;
    p.name = c.identifier("parameter name");
    if (is_reserved(p.name) || declared_.count(p.name)) c.fail("parameter '" + p.name + "' is reserved or already declared");
    if (!c.at_end()) {
      const auto w = c.identifier("constraint");
      if (w == "positive") p.constraint = ParamConstraint::positive;
      else if (w == "nonzero") p.constraint = ParamConstraint::nonzero;
      else c.fail("constraint must be 'positive' or 'nonzero'");
    }
    declared_.insert(p.name);
    sys_.params.push_back(std::move(p));
  }

  void parse_block(LineCursor& c, bool unknown) {
    const auto name = c.identifier("block name");
    if ((unknown ? sys_.unknown_index(name) : sys_.equation_index(name)).has_value())
      c.fail("duplicate block '" + name + "'");
    c.keyword("multiplicity");
    const int k = c.integer("multiplicity", 1);
    c.keyword("index");
    const int idx = c.integer("index", 0);
    if (unknown) sys_.unknowns.push_back({name, k, idx});
    else sys_.equations.push_back({name, k, idx});
  }

  void parse_entry(LineCursor& c, std::size_t line) {
    SymbolEntry e;
    std::tie(e.eq_block, e.eq_component) = named_component(c, false);
    std::tie(e.unk_block, e.unk_component) = named_component(c, true);
    c.symbol(":=");
    e.symbol = poly(c, line);
    const auto key = std::make_tuple(e.eq_block, e.eq_component, e.unk_block, e.unk_component);
    if (!seen_entries_.insert(key).second) throw DuplicateEntry(line, 1, "duplicate entry for this component pair");
    sys_.entries.push_back(std::move(e));
  }

  std::pair<std::size_t, int> named_component(LineCursor& c, bool unknown) {
    c.skip();
    const auto col = c.column();
    const auto name = c.identifier("block name");
    auto idx = unknown ? sys_.unknown_index(name) : sys_.equation_index(name);
    if (!idx) c.fail_at(col, std::string("undeclared ") + (unknown ? "unknown" : "equation") + " '" + name + "'");
    c.symbol("[");
    const int comp = c.integer("component", 0);
    const int mult = unknown ? sys_.unknowns[*idx].multiplicity : sys_.equations[*idx].multiplicity;
    if (comp >= mult) c.fail("component " + std::to_string(comp) + " out of range for block '" + name + "'");
    c.symbol("]");
    return {*idx, comp};
  }

  void parse_depends(LineCursor& c) {
    DependencyDecl d;
    c.skip();
    auto col = c.column();
    auto eq = c.identifier("equation name");
    auto ei = sys_.equation_index(eq);
    if (!ei) c.fail_at(col, "undeclared equation '" + eq + "'");
    c.keyword("on");
    c.skip();
    col = c.column();
    auto unk = c.identifier("unknown name");
    auto ui = sys_.unknown_index(unk);
    if (!ui) c.fail_at(col, "undeclared unknown '" + unk + "'");
    c.keyword("order");
    d.eq_block = *ei;
    d.unk_block = *ui;
    d.declared_order = c.integer("order", 0);
    sys_.deps.push_back(d);
  }

  Poly poly(LineCursor& c, std::size_t line) {
    c.skip();
    const auto col = c.column();
    auto resolver = [&](std::string_view name, std::size_t column) -> AtomId {
      if (is_reserved(name)) return xi(name[2] - '0');
      if (!declared_.count(std::string(name)))
        throw UnknownAtom(line, column, "undeclared atom '" + std::string(name) + "'");
      return param(name);
    };
    return parse_poly(c.rest(), resolver, line, col);
  }

  LeraySystem sys_;
  std::set<std::string> declared_;
  std::set<std::tuple<std::size_t, int, std::size_t, int>> seen_entries_;
  bool in_factors_ = false;
};

}  // namespace

LeraySystem parse_system(std::string_view text) { return SystemParser().run(text); }

LeraySystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

std::string print_system(const LeraySystem& s) {
  std::ostringstream out;
  out << "system " << s.name << "\n";
  for (const auto& p : s.params) {
    out << "param " << p.name;
    if (p.constraint == ParamConstraint::positive) out << " positive";
    if (p.constraint == ParamConstraint::nonzero) out << " nonzero";
    out << "\n";
  }
  for (const auto& u : s.unknowns) out << "unknown " << u.name << " multiplicity " << u.multiplicity << " index " << u.m << "\n";
  for (const auto& e : s.equations) out << "equation " << e.name << " multiplicity " << e.multiplicity << " index " << e.n << "\n";
  for (const auto& d : s.deps)
    out << "depends " << s.equations[d.eq_block].name << " on " << s.unknowns[d.unk_block].name << " order " << d.declared_order << "\n";
  for (const auto& [k, v] : s.assumptions) out << "assume " << k << " = " << to_string(v) << "\n";
  for (const auto& [k, v] : s.point) out << "point " << k << " = " << to_string(v) << "\n";
  for (const auto& e : s.entries)
    out << "entry " << s.equations[e.eq_block].name << "[" << e.eq_component << "] " << s.unknowns[e.unk_block].name << "["
        << e.unk_component << "] := " << to_string(e.symbol) << "\n";
  if (s.factors) {
    out << "factors:\n";
    out << "  prefactor := " << to_string(s.factors->prefactor) << "\n";
    for (const auto& f : s.factors->factors)
      out << "  factor " << f.name << " multiplicity " << f.multiplicity << " := " << to_string(f.factor) << "\n";
    out << "end\n";
  }
  return out.str();
}

Assignment to_assignment(const std::vector<Binding>& bindings) {
  Assignment a;
  for (const auto& [k, v] : bindings) a[param(k)] = v;
  return a;
}

StructureReport validate_structure(const LeraySystem& s) {
  StructureReport r;
  r.square = s.unknown_total() == s.equation_total();
  if (!r.square)
    r.failures.push_back("system is not square: " + std::to_string(s.equation_total()) + " equations for " +
                         std::to_string(s.unknown_total()) + " unknowns");
  for (const auto& e : s.entries) {
    EntryCheck c{e.eq_block, e.eq_component, e.unk_block, e.unk_component, s.unknowns[e.unk_block].m - s.equations[e.eq_block].n, {}, false};
    const auto h = xi_homogeneity(e.symbol);
    if (h.zero) {
      c.found_degree = c.required_degree;
      c.pass = true;
    } else {
      if (h.homogeneous) c.found_degree = h.degree;
      c.pass = h.homogeneous && h.degree == c.required_degree;
    }
    if (!c.pass) {
      std::ostringstream msg;
      msg << "entry " << s.equations[e.eq_block].name << "[" << e.eq_component << "] " << s.unknowns[e.unk_block].name << "["
          << e.unk_component << "]: required xi-degree " << c.required_degree << ", found "
          << (c.found_degree ? std::to_string(*c.found_degree) : std::string("non-homogeneous"));
      r.failures.push_back(msg.str());
    }
    r.entries.push_back(c);
  }
  for (const auto& d : s.deps) {
    DependencyCheck c{d.eq_block, d.unk_block, d.declared_order, s.unknowns[d.unk_block].m - s.equations[d.eq_block].n - 1, false};
    c.pass = d.declared_order <= c.allowed_order;
    if (!c.pass)
      r.failures.push_back("dependency " + s.equations[d.eq_block].name + " on " + s.unknowns[d.unk_block].name + ": order " +
                           std::to_string(d.declared_order) + " exceeds m - n - 1 = " + std::to_string(c.allowed_order));
    r.deps.push_back(c);
  }
  r.pass = r.failures.empty();
  return r;
}

int total_order(const LeraySystem& s) {
  int l = 0;
  for (const auto& u : s.unknowns) l += u.multiplicity * u.m;
  for (const auto& e : s.equations) l -= e.multiplicity * e.n;
  return l;
}

ConditionReport leray_condition(const LeraySystem& s, const std::vector<int>& factor_degrees) {
  ConditionReport r;
  for (int d : factor_degrees) r.max_factor_degree = std::max(r.max_factor_degree, d);
  if (!s.unknowns.empty()) {
    r.max_m = s.unknowns[0].m;
    for (const auto& u : s.unknowns) r.max_m = std::max(r.max_m, u.m);
  }
  if (!s.equations.empty()) {
    r.min_n = s.equations[0].n;
    for (const auto& e : s.equations) r.min_n = std::min(r.min_n, e.n);
  }
  r.pass = r.max_factor_degree >= r.max_m - r.min_n;
  r.statement = std::to_string(r.max_factor_degree) + (r.pass ? " >= " : " < ") + std::to_string(r.max_m - r.min_n);
  return r;
}

}  // namespace lops

#include "lops/determinant.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <queue>

namespace lops {

template <class Scalar>
Scalar cofactor_determinant(const Matrix<Scalar>& m) {
  const auto n = static_cast<int>(m.rows());
  if (n != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  if (n > 20) throw std::invalid_argument("cofactor expansion limited to 20x20");
  // det[S] = determinant of the leading |S| rows restricted to the column set S.
  std::vector<Scalar> det(std::size_t{1} << n, Scalar(0));
  det[0] = Scalar(1);
  for (std::uint32_t s = 1; s < (1U << n); ++s) {
    const int row = std::popcount(s) - 1;
    Scalar acc(0);
    int position = 0;
    for (int j = 0; j < n; ++j) {
      if (!(s & (1U << j))) continue;
      const auto& rest = det[s & ~(1U << j)];
      if (!is_zero(m(row, j)) && !is_zero(rest)) {
        Scalar term = m(row, j) * rest;
        if ((row + position) % 2) acc -= term;
        else acc += term;
      }
      ++position;
    }
    det[s] = acc;
  }
  return det.back();
}

template Poly cofactor_determinant<Poly>(const PolyMatrix&);
template Rational cofactor_determinant<Rational>(const RationalMatrix&);

BlockStructure block_triangular_structure(const Matrix<bool>& nz) {
  const auto n = static_cast<int>(nz.rows());
  BlockStructure out;
  std::vector<int> col_of_row(n, -1), row_of_col(n, -1);
  std::vector<char> seen;
  std::function<bool(int)> augment = [&](int r) {
    for (int c = 0; c < n; ++c) {
      if (!nz(r, c) || seen[c]) continue;
      seen[c] = 1;
      if (row_of_col[c] < 0 || augment(row_of_col[c])) {
        row_of_col[c] = r;
        col_of_row[r] = c;
        return true;
      }
    }
    return false;
  };
  for (int r = 0; r < n; ++r) {
    seen.assign(n, 0);
    if (!augment(r)) {
      out.singular = true;
      return out;
    }
  }

  // Sign of the permutation r -> col_of_row[r].
  std::vector<char> visited(n, 0);
  for (int r = 0; r < n; ++r) {
    if (visited[r]) continue;
    int len = 0;
    for (int k = r; !visited[k]; k = col_of_row[k]) {
      visited[k] = 1;
      ++len;
    }
    if (len % 2 == 0) out.sign = -out.sign;
  }

  // Tarjan SCC on rows: r -> k when entry (r, col_of_row[k]) is nonzero.
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  int counter = 0;
  std::function<void(int)> connect = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (int k = 0; k < n; ++k) {
      if (k == v || !nz(v, col_of_row[k])) continue;
      if (index[k] < 0) {
        connect(k);
        low[v] = std::min(low[v], low[k]);
      } else if (on_stack[k]) {
        low[v] = std::min(low[v], index[k]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<Eigen::Index> rows, cols;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        rows.push_back(w);
      } while (w != v);
      std::sort(rows.begin(), rows.end());
      for (auto r : rows) cols.push_back(col_of_row[r]);
      out.row_blocks.push_back(std::move(rows));
      out.col_blocks.push_back(std::move(cols));
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[v] < 0) connect(v);
  return out;
}

namespace {

// Tries to divide every nonzero entry of a line by `d`.
bool divides_line(const std::vector<Poly*>& line, const Poly& d) {
  std::vector<Poly> quotients;
  quotients.reserve(line.size());
  for (auto* e : line) {
    if (e->is_zero()) {
      quotients.emplace_back();
      continue;
    }
    auto [q, r] = divide(*e, d);
    if (!r.is_zero()) return false;
    quotients.push_back(std::move(q));
  }
  for (std::size_t i = 0; i < line.size(); ++i) *line[i] = std::move(quotients[i]);
  return true;
}

// Pulls common factors out of one row or column: first the monomial gcd,
// then repeatedly the primitive part of the sparsest multi-term entry.
void extract_content(std::vector<Poly*> line, std::vector<Poly>& factors) {
  Monomial g;
  bool first = true;
  for (auto* e : line) {
    if (e->is_zero()) continue;
    g = first ? monomial_content(*e) : g.gcd(monomial_content(*e));
    first = false;
  }
  if (first) return;
  if (!g.is_one()) {
    divides_line(line, Poly(g));
    factors.emplace_back(g);
  }
  for (int guard = 0; guard < 16; ++guard) {
    const Poly* sparsest = nullptr;
    for (auto* e : line)
      if (e->size() >= 2 && (!sparsest || e->size() < sparsest->size())) sparsest = e;
    if (!sparsest) return;
    Poly candidate = exact_div(*sparsest, Poly(monomial_content(*sparsest)));
    candidate = monic(candidate);
    if (!divides_line(line, candidate)) return;
    factors.push_back(std::move(candidate));
  }
}

}  // namespace

BlockDeterminants determinant_blocks(const PolyMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  BlockDeterminants out;
  const auto bs = block_triangular_structure(nonzero_pattern(m));
  if (bs.singular) {
    out.factors.push_back(Poly{});
    return out;
  }
  out.sign = bs.sign;
  for (std::size_t b = 0; b < bs.row_blocks.size(); ++b) {
    const auto& rows = bs.row_blocks[b];
    const auto& cols = bs.col_blocks[b];
    const auto k = static_cast<Eigen::Index>(rows.size());
    out.block_sizes.push_back(rows.size());
    if (k == 1) {
      out.factors.push_back(m(rows[0], cols[0]));
      continue;
    }
    PolyMatrix sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = m(rows[i], cols[j]);
    for (Eigen::Index i = 0; i < k; ++i) {
      std::vector<Poly*> line;
      for (Eigen::Index j = 0; j < k; ++j) line.push_back(&sub(i, j));
      extract_content(line, out.factors);
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      std::vector<Poly*> line;
      for (Eigen::Index i = 0; i < k; ++i) line.push_back(&sub(i, j));
      extract_content(line, out.factors);
    }
    out.factors.push_back(bareiss_determinant(sub));
  }
  return out;
}

Poly determinant(const PolyMatrix& m) {
  auto blocks = determinant_blocks(m);
  Poly d = product(std::move(blocks.factors));
  return blocks.sign < 0 ? -d : d;
}

Rational determinant(const RationalMatrix& m) {
  const Eigen::Index n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  RationalMatrix a = m;
  Rational det = 1;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = -1;
    std::size_t best = 0;
    for (Eigen::Index i = k; i < n; ++i) {
      if (is_zero(a(i, k))) continue;
      const auto c = pivot_cost(a(i, k));
      if (p < 0 || c < best) {
        p = i;
        best = c;
      }
    }
    if (p < 0) return 0;
    if (p != k) {
      a.row(k).swap(a.row(p));
      det = -det;
    }
    det *= a(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (is_zero(a(i, k))) continue;
      const Rational f = a(i, k) / a(k, k);
      for (Eigen::Index j = k + 1; j < n; ++j)
        if (!is_zero(a(k, j))) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

RationalMatrix evaluate(const PolyMatrix& m, const Assignment& values) {
  RationalMatrix r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = eval(m(i, j), values);
  return r;
}

PolyMatrix partial_evaluate(const PolyMatrix& m, const Assignment& values) {
  PolyMatrix r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = partial_eval(m(i, j), values);
  return r;
}

Poly product(std::vector<Poly> factors) {
  if (factors.empty()) return 1;
  // Repeated factors go through pow, which squares instead of growing one
  // large intermediate at a time.
  std::vector<std::pair<Poly, unsigned>> grouped;
  for (auto& f : factors) {
    auto it = std::find_if(grouped.begin(), grouped.end(), [&](const auto& g) { return g.first == f; });
    if (it == grouped.end()) grouped.emplace_back(std::move(f), 1U);
    else ++it->second;
  }
  // Greedy pairing: prefer pairs that bring in no new atoms (their terms
  // collapse), then the cheapest pair.
  struct Part {
    Poly p;
    std::vector<AtomId> atoms;
  };
  std::vector<Part> parts;
  for (auto& [f, k] : grouped) {
    Poly p = k == 1 ? std::move(f) : pow(f, k);
    auto atoms = atoms_of(p);
    parts.push_back({std::move(p), std::move(atoms)});
  }
  while (parts.size() > 1) {
    std::size_t bi = 0, bj = 1;
    std::pair<std::size_t, double> best{SIZE_MAX, 0};
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (std::size_t j = i + 1; j < parts.size(); ++j) {
        std::vector<AtomId> joined;
        std::set_union(parts[i].atoms.begin(), parts[i].atoms.end(), parts[j].atoms.begin(), parts[j].atoms.end(),
                       std::back_inserter(joined));
        const std::size_t fresh = joined.size() - std::max(parts[i].atoms.size(), parts[j].atoms.size());
        const double cost = static_cast<double>(parts[i].p.size()) * static_cast<double>(parts[j].p.size());
        if (std::pair(fresh, cost) < best) best = {fresh, cost}, bi = i, bj = j;
      }
    Poly p = parts[bi].p * parts[bj].p;
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(bj));
    parts[bi] = {std::move(p), {}};
    parts[bi].atoms = atoms_of(parts[bi].p);
  }
  return std::move(parts.front().p);
}

}  // namespace lops

#pragma once

#include "lops/poly.hpp"
#include "lops/rational.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <utility>
#include <vector>

namespace Eigen {
template <>
struct NumTraits<lops::Poly> : GenericNumTraits<lops::Poly> {
  using Real = lops::Poly;
  using NonInteger = lops::Poly;
  using Nested = lops::Poly;
  using Literal = lops::Poly;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 10,
    AddCost = 1000,
    MulCost = 10000
  };
};
}  // namespace Eigen

namespace lops {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using PolyMatrix = Matrix<Poly>;
using RationalMatrix = Matrix<Rational>;

inline bool is_zero(const Poly& p) { return p.is_zero(); }
inline Poly exact_quotient(const Poly& a, const Poly& b) { return exact_div(a, b); }
inline std::size_t pivot_cost(const Poly& p) { return p.size(); }

/// Fraction-free elimination (Bareiss) with cheapest-pivot selection.
template <class Scalar>
Scalar bareiss_determinant(Matrix<Scalar> m) {
  const Eigen::Index n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  if (n == 0) return Scalar(1);
  Scalar previous(1);
  bool negate = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index best_r = -1, best_c = -1;
    std::size_t best = 0;
    for (Eigen::Index i = k; i < n; ++i)
      for (Eigen::Index j = k; j < n; ++j) {
        if (is_zero(m(i, j))) continue;
        const auto c = pivot_cost(m(i, j));
        if (best_r < 0 || c < best) {
          best = c;
          best_r = i;
          best_c = j;
        }
      }
    if (best_r < 0) return Scalar(0);
    if (best_r != k) {
      m.row(k).swap(m.row(best_r));
      negate = !negate;
    }
    if (best_c != k) {
      m.col(k).swap(m.col(best_c));
      negate = !negate;
    }
    const Scalar pivot = m(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const bool lead_zero = is_zero(m(i, k));
      for (Eigen::Index j = k + 1; j < n; ++j) {
        Scalar v = pivot * m(i, j);
        if (!lead_zero && !is_zero(m(k, j))) v -= m(i, k) * m(k, j);
        m(i, j) = exact_quotient(v, previous);
      }
      m(i, k) = Scalar(0);
    }
    previous = pivot;
  }
  return negate ? Scalar(-m(n - 1, n - 1)) : m(n - 1, n - 1);
}

/// Laplace expansion memoised over column subsets; exponential, for n ≤ 20.
template <class Scalar>
Scalar cofactor_determinant(const Matrix<Scalar>& m);

/// Diagonal blocks of a row/column permutation that makes m block upper triangular.
struct BlockStructure {
  int sign = 1;  // sign of the column permutation relative to the row order
  std::vector<std::vector<Eigen::Index>> row_blocks;
  std::vector<std::vector<Eigen::Index>> col_blocks;
  bool singular = false;  // no perfect matching on the nonzero pattern
};

BlockStructure block_triangular_structure(const Matrix<bool>& nonzero);

template <class Scalar>
Matrix<bool> nonzero_pattern(const Matrix<Scalar>& m) {
  Matrix<bool> p(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) p(i, j) = !is_zero(m(i, j));
  return p;
}

/// Determinant of each diagonal block together with the overall sign.
struct BlockDeterminants {
  int sign = 1;
  std::vector<Poly> factors;  // pulled-out contents and block determinants
  std::vector<std::size_t> block_sizes;
};

BlockDeterminants determinant_blocks(const PolyMatrix& m);
Poly determinant(const PolyMatrix& m);
Rational determinant(const RationalMatrix& m);

/// Evaluates every entry at an assignment covering all atoms.
RationalMatrix evaluate(const PolyMatrix& m, const Assignment& values);
PolyMatrix partial_evaluate(const PolyMatrix& m, const Assignment& values);

/// Product of many polynomials, multiplying the smallest operands first.
Poly product(std::vector<Poly> factors);

}  // namespace lops

#pragma once

#include "lops/determinant.hpp"
#include "lops/leray_system.hpp"
#include "lops/sampling.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace lops {

using Covector = std::array<Rational, 4>;

inline Covector time_covector() { return {1, 0, 0, 0}; }

/// Scalar expansion of all blocks, rows by equation component and columns by
/// unknown component. Declared assumptions are substituted when requested.
PolyMatrix build_symbol_matrix(const LeraySystem& s, bool apply_assumptions = true);

struct NamedFactor {
  std::string name;
  Poly factor;
  int multiplicity = 1;
};

struct Factorization {
  Poly scalar_prefactor = 1;
  std::vector<NamedFactor> factors;
};

Factorization factorization_of(const FactorsBlock& block);
/// prefactor · Π factor^multiplicity, expanded.
Poly expand(const Factorization& f);

struct VerifyReport {
  bool pass = false;
  std::size_t difference_terms = 0;
  std::string witness;  // first differing monomial with its coefficient in det − product
};

VerifyReport verify_factorization(const Poly& det, const Factorization& f);

/// Largest k with factor^k dividing p.
int factor_multiplicity(Poly p, const Poly& factor);

enum class Method { linear_exact, quadratic_signature, biquadratic_closed_form, sampled };
enum class Verdict { hyperbolic, not_hyperbolic, inconclusive };

std::string to_string(Method m);
std::string to_string(Verdict v);

struct HyperbolicityVerdict {
  std::string factor;
  Method method = Method::sampled;
  Verdict verdict = Verdict::inconclusive;
  std::string detail;
  std::optional<std::array<double, 4>> witness;
  std::size_t samples = 0;
  double tolerance = 0;
  double max_imag = 0;
  int positive = 0, negative = 0, zero = 0;  // quadratic signature counts
};

/// Linear form: hyperbolic iff p(τ) ≠ 0. Throws DegreeMismatch.
HyperbolicityVerdict hyperbolicity_linear(const Poly& p, const Covector& tau, const Assignment& params = {});

/// Quadratic form: hyperbolic iff the exact signature is (1, 3) with p(τ) > 0.
/// Throws DegreeMismatch, and DegeneracyDetected when the form is singular
/// with exactly one positive direction.
HyperbolicityVerdict hyperbolicity_quadratic(const Poly& p, const Covector& tau, const Assignment& params = {});

struct SignatureCounts {
  int positive = 0, negative = 0, zero = 0;
};
/// Sylvester inertia of a symmetric rational matrix by exact congruence.
SignatureCounts signature(RationalMatrix q);
RationalMatrix quadratic_form_matrix(const Poly& p);

/// Sampled root test over directions η ⊥ τ. Throws LeadingCoefficientVanishes.
HyperbolicityVerdict hyperbolicity_sampled(const Poly& p, const Covector& tau, const Assignment& params, std::size_t n_samples,
                                           double tol, std::uint64_t seed = 7);

struct BiquadraticSplit {
  Poly A, B, C;
  Poly P;             // A ξ₀⁴ + B ξ₀² + C
  Poly discriminant;  // B² − 4AC
  Poly root;          // exact square root of the discriminant
  Poly P1, P2;        // P = A·P1·P2 when `monic`, else 4A·P = P1·P2
  bool monic = false;
};

/// Throws NotPerfectSquare (with remainder) or LeadingCoefficientZero.
BiquadraticSplit biquadratic_split(const Poly& A, const Poly& B, const Poly& C, const Assignment& params = {});

/// Splits a polynomial even in ξ₀ into its ξ₀⁴, ξ₀², ξ₀⁰ coefficients.
std::optional<std::array<Poly, 3>> biquadratic_coefficients(const Poly& P);

struct IdentityLine {
  std::string name;
  std::string lhs, rhs;
  bool holds = false;
};

struct InequalitySample {
  Rational F, q;
  std::size_t directions = 0;
  std::size_t violations = 0;
  Rational minimum;
};

struct InequalityReport {
  std::vector<IdentityLine> identities;
  std::vector<InequalitySample> derived_samples;  // from the determinant-derived B and discriminant
  std::vector<InequalitySample> printed_samples;  // from the printed B and claimed discriminant
  bool manifestly_nonnegative = false;
  bool pass = false;
};

/// Case reductions as exact identities in ξ₁..ξ₃ and sampled checks of
/// −B − √(B² − 4AC) ≥ 0 at Minkowski. `b_derived` and `root_derived` are the
/// ξ₀² coefficient and the discriminant root of the determinant-derived P,
/// already specialised to the Minkowski metric.
InequalityReport verify_minkowski_inequalities(const Poly& b_derived, const Poly& root_derived,
                                               const std::vector<std::pair<Rational, Rational>>& grid, std::size_t directions,
                                               std::uint64_t seed = 7);

/// The grid F ∈ {1, 2, 10} × q ∈ {1/10, 1/2, 3}.
std::vector<std::pair<Rational, Rational>> standard_fq_grid();

/// B and C as printed for the adapted metric (g₀₀ = 1, g₀ᵢ = 0, diagonal spatial part).
std::array<Poly, 3> printed_abc();

struct FactorVerdict {
  int multiplicity = 1;
  Verdict verdict = Verdict::inconclusive;
};

/// q/(q−1) with q the multiplicity-counted number of hyperbolic factors;
/// nullopt stands for σ₀ = ∞ (q = 1). Throws NotAllHyperbolic.
std::optional<Rational> gevrey_sigma(const std::vector<FactorVerdict>& factors);

struct ConeRow {
  std::array<double, 4> direction;
  std::vector<double> roots;
  std::vector<double> light_roots;
};

struct ConeSamples {
  std::string factor;
  std::vector<ConeRow> rows;
  bool within_light_cone = true;
  double max_speed = 0;
};

/// Real roots of s ↦ p(η + sτ) per direction. When `light` is given, also
/// checks that every sheet lies within the light-cone sheets.
ConeSamples cone_sample(const Poly& p, const Covector& tau, const Assignment& params, std::size_t n, std::uint64_t seed = 7,
                        const Poly* light = nullptr, double tol = 1e-9);

std::string cone_csv(const ConeSamples& c);

/// Coefficients (ascending) of s ↦ p(η + sτ) for a ξ-only polynomial.
std::vector<Rational> restrict_to_line(const Poly& p, const Covector& eta, const Covector& tau);
/// Exact square-free part of a univariate rational polynomial.
std::vector<Rational> square_free(const std::vector<Rational>& coeffs);

/// Exact orthogonal (Euclidean) rational basis of τ^⊥.
std::array<Covector, 3> transverse_basis(const Covector& tau);

}  // namespace lops

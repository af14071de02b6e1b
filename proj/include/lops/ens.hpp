#pragma once

#include "lops/char_analysis.hpp"
#include "lops/leray_system.hpp"
#include "lops/report.hpp"
#include "lops/sampling.hpp"

#include <array>
#include <functional>
#include <optional>
#include <random>
#include <string>

namespace lops {

/// Fixed data of the Einstein–Navier–Stokes instance.
struct EnsReferenceValues {
  static constexpr std::array<int, 5> m{3, 2, 2, 1, 2};
  static constexpr std::array<int, 5> n{1, 0, 0, 0, 0};
  static constexpr std::array<int, 5> multiplicity{10, 1, 4, 6, 4};
  static constexpr int total_order = 44;
  static constexpr int light_power = 14, flow_power = 6, cubic_power = 2;
  static constexpr int hyperbolic_factor_count = 24;  // 14 + 6 + 2 + 2
  static Rational sigma0() { return Rational(24, 23); }
};

/// Metric pair index (a ≤ b) of component k in 00,01,02,03,11,12,13,22,23,33.
std::array<int, 2> metric_pair(int k);
/// Antisymmetric pair (a < b) of component k in 01,02,03,12,13,23.
std::array<int, 2> vorticity_pair(int k);

/// Scalar row/column where each block starts: g, s, u, Ω, C.
struct EnsLayout {
  static constexpr int g = 0, s = 10, u = 11, omega = 15, current = 19, size = 25;
};

/// The 25-component system with every principal entry populated, the
/// adapted-metric assumptions, a Minkowski evaluation point and the claimed
/// factorization.
///
/// Parameter atoms: gu<ab> = g^{ab}, gl<ab> = g_{ab} (a ≤ b), u<a> = u^a,
/// ul<a> = u_a, F, invF = 1/F, q, vartheta, inv_theta_r = 1/(θ r), and the
/// first-derivative coefficients du<a><b> = ∂_a u_b, dU<a><b> = ∂_a u^b.
/// Raised and lowered symbols are independent atoms; a concrete state binds
/// them consistently.
const LeraySystem& ens_system();
LeraySystem build_ens_system();

struct EquationOfState {
  std::string name;
  std::function<double(double r, double s)> density, pressure, temperature, internal_energy, index;
  std::function<double(double F, double s)> rest_mass;  // r(F, s)
};

/// r(F, s) = F·e^{−s}: p = F²e^{−s}/2, θ = F/2, ϱ = p. Saturates ∂r/∂F ≥ r/F.
EquationOfState stiff_toy_eos();

struct FluidState {
  LorentzFrame metric = minkowski_frame();
  Vec4Q u{1, 0, 0, 0};    // u^α
  Vec4Q u_lower{1, 0, 0, 0};
  Rational F = 1;
  Rational q = Rational(1, 2);
  Rational vartheta = -1;
  Rational entropy = 0;
  /// Values of the first-derivative coefficient atoms (du.., dU..).
  Assignment derivatives;

  Vec4Q current() const;  // C_α = F u_α
};

/// Minkowski, u = (1,0,0,0), F = 1, q = 1/2, ϑ = −1.
FluidState reference_state();
/// State with u^α given and u_α lowered by the state metric.
FluidState make_state(const LorentzFrame& g, const Vec4Q& u, Rational F, Rational q);
/// General Lorentzian metric, random unit timelike u, F ∈ [1, 3], q ∈ (0, 2],
/// ϑ nonzero, rationals with denominators up to 2^16.
FluidState random_state(std::mt19937_64& rng);

/// 1/(θ r) from the eos at (F, entropy); exact for the stiff toy at s = 0.
Rational inv_theta_r(const FluidState& st, const EquationOfState& eos);

/// Binds every parameter atom of the system at the state.
Assignment state_assignment(const FluidState& st, const EquationOfState& eos = stiff_toy_eos());

Report validate_state(const FluidState& st, const EquationOfState& eos);

/// ξ-polynomial pieces at a state.
Poly light_cone_at(const FluidState& st);  // g^{μν} ξ_μ ξ_ν
Poly flow_at(const FluidState& st);        // u^μ ξ_μ

/// P(ξ) obtained from the Ω–C block: its determinant divided by
/// F³(F+q)²(uξ)⁶(ξξ)², with the biquadratic data.
struct DerivedQuartic {
  Poly block_det;  // adapted-metric 10×10 determinant
  Poly P;
  BiquadraticSplit split;
  bool split_ok = false;
  std::string split_error;
};

/// Cached symbolic derivation under the adapted metric.
const DerivedQuartic& derived_quartic();

/// F³(F+q)³(ξξ)^14(uξ)^6(uξ·ξξ)^2·P₁P₂ at the state, as a ξ-polynomial.
/// P₁, P₂ come from the symbolic split; away from the adapted metric they
/// are used in covariant form, which requires them to be the light cone.
Poly reference_product(const FluidState& st);
Factorization reference_factors(const FluidState& st);
/// The reference product evaluated factor by factor at ξ.
Rational reference_value(const FluidState& st, const Covector& x);

struct EnsOptions {
  std::size_t samples = 100;   // numeric 25×25 states
  std::size_t block_samples = 100;  // Ω–C block states
  std::uint64_t seed = 7;
  std::size_t directions = 10000;
  std::optional<Rational> q_override;  // q = 0 degeneration report
};

/// Symbolic and numeric checks of the characteristic determinant, the
/// discriminant identity, the Minkowski inequalities and the q = 0 limit.
Report verify_ens_determinant(const EnsOptions& opt = {});

/// Separate pieces, for callers that need only one.
void check_symbolic_determinant(Report& r);
void check_numeric_determinant(Report& r, std::size_t samples, std::uint64_t seed);
void check_block_determinant(Report& r, std::size_t samples, std::uint64_t seed);
void check_discriminant(Report& r);
void check_inequalities(Report& r, std::size_t directions, std::uint64_t seed);
void check_degeneration(Report& r, const Rational& q);
void check_vartheta_scaling(Report& r);

}  // namespace lops

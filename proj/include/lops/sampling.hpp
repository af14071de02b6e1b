#pragma once

#include "lops/rational.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace lops {

using Vec3Q = std::array<Rational, 3>;
using Vec4Q = std::array<Rational, 4>;

/// Radical inverse of `index` in the given base.
double radical_inverse(std::uint64_t index, unsigned base);

/// Deterministic, exactly-unit rational points on S².
///
/// A Halton pair (bases 2, 3) picks an area-uniform point, which is
/// stereographically projected, rounded to a dyadic grid and mapped back,
/// so the result has |x|² = 1 exactly. `seed` offsets the sequence.
std::vector<Vec3Q> sphere_directions(std::size_t count, std::uint64_t seed);

/// Rational in [-bound, bound] with denominator up to 2^bits.
Rational random_rational(std::mt19937_64& rng, int bound_num, int bits);

/// Exact rational Lorentz frame: a 4x4 matrix L with g = Lᵀ η L the metric.
struct LorentzFrame {
  std::array<std::array<Rational, 4>, 4> lower;    // g_{μν}
  std::array<std::array<Rational, 4>, 4> inverse;  // g^{μν}
  std::array<std::array<Rational, 4>, 4> frame;    // L
  std::array<std::array<Rational, 4>, 4> frame_inverse;
};

/// Random Lorentzian metric near Minkowski with g^{00} > 0. `spread` scales
/// the perturbation of the frame.
LorentzFrame random_lorentz_frame(std::mt19937_64& rng, const Rational& spread);
LorentzFrame minkowski_frame();

/// Unit timelike vector u^μ for the frame: u = L⁻¹ w with w a rational
/// Minkowski-unit vector of rapidity bounded by `max_speed` < 1.
Vec4Q random_unit_timelike(std::mt19937_64& rng, const LorentzFrame& frame, const Rational& max_speed);

/// Minkowski-unit rational vector from spatial velocity parameter s (|s| < 1):
/// ((1+|s|²)/(1−|s|²), 2s/(1−|s|²)).
Vec4Q unit_timelike_from(const Vec3Q& s);

Vec4Q lower_index(const LorentzFrame& frame, const Vec4Q& up);

}  // namespace lops

#include "lops/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lops {

double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0, f = 1.0 / base;
  while (index) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

namespace {

Rational dyadic(double x, int bits) {
  const double scale = std::ldexp(1.0, bits);
  Rational r(Integer(static_cast<long>(std::llround(x * scale))), Integer(1) << bits);
  r.canonicalize();
  return r;
}

}  // namespace

std::vector<Vec3Q> sphere_directions(std::size_t count, std::uint64_t seed) {
  std::vector<Vec3Q> out;
  out.reserve(count);
  for (std::uint64_t i = 0; out.size() < count; ++i) {
    const std::uint64_t k = seed * 7919 + i + 1;
    const double z = 2 * radical_inverse(k, 2) - 1;
    const double phi = 2 * std::numbers::pi * radical_inverse(k, 3);
    const double rho = std::sqrt(std::max(0.0, 1 - z * z));
    // Project from the pole on the far side so the denominator stays away from 0.
    const double sign = z > 0 ? 1.0 : -1.0;
    const double X = rho * std::cos(phi) / (1 + sign * z), Y = rho * std::sin(phi) / (1 + sign * z);
    const Rational a = dyadic(X, 16), b = dyadic(Y, 16);
    const Rational n = a * a + b * b;
    const Rational d = n + 1;
    out.push_back({2 * a / d, 2 * b / d, sign * (1 - n) / d});
  }
  return out;
}

Rational random_rational(std::mt19937_64& rng, int bound_num, int bits) {
  const long den = 1L << bits;
  std::uniform_int_distribution<long> num(-static_cast<long>(bound_num) * den, static_cast<long>(bound_num) * den);
  Rational r(num(rng), den);
  r.canonicalize();
  return r;
}

namespace {

using M4 = std::array<std::array<Rational, 4>, 4>;

M4 identity4() {
  M4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = i == j ? 1 : 0;
  return m;
}

M4 inverse4(M4 a) {
  M4 inv = identity4();
  for (int k = 0; k < 4; ++k) {
    int p = k;
    while (p < 4 && sgn(a[p][k]) == 0) ++p;
    if (p == 4) throw std::domain_error("singular frame");
    std::swap(a[p], a[k]);
    std::swap(inv[p], inv[k]);
    const Rational piv = a[k][k];
    for (int j = 0; j < 4; ++j) {
      a[k][j] /= piv;
      inv[k][j] /= piv;
    }
    for (int i = 0; i < 4; ++i) {
      if (i == k || sgn(a[i][k]) == 0) continue;
      const Rational f = a[i][k];
      for (int j = 0; j < 4; ++j) {
        a[i][j] -= f * a[k][j];
        inv[i][j] -= f * inv[k][j];
      }
    }
  }
  return inv;
}

LorentzFrame from_frame(const M4& L) {
  static const int eta[4] = {1, -1, -1, -1};
  LorentzFrame f;
  f.frame = L;
  f.frame_inverse = inverse4(L);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      Rational g = 0, gi = 0;
      for (int a = 0; a < 4; ++a) {
        g += L[a][m] * eta[a] * L[a][n];
        gi += f.frame_inverse[m][a] * eta[a] * f.frame_inverse[n][a];
      }
      f.lower[m][n] = g;
      f.inverse[m][n] = gi;
    }
  return f;
}

}  // namespace

LorentzFrame minkowski_frame() { return from_frame(identity4()); }

LorentzFrame random_lorentz_frame(std::mt19937_64& rng, const Rational& spread) {
  for (;;) {
    M4 L = identity4();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) L[i][j] += spread * random_rational(rng, 1, 4);
    try {
      auto f = from_frame(L);
      if (sgn(f.inverse[0][0]) > 0) return f;
    } catch (const std::domain_error&) {
    }
  }
}

Vec4Q unit_timelike_from(const Vec3Q& s) {
  const Rational n = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
  if (n >= 1) throw std::invalid_argument("velocity parameter must satisfy |s| < 1");
  const Rational d = 1 - n;
  return {(1 + n) / d, 2 * s[0] / d, 2 * s[1] / d, 2 * s[2] / d};
}

Vec4Q random_unit_timelike(std::mt19937_64& rng, const LorentzFrame& frame, const Rational& max_speed) {
  Vec3Q s;
  do {
    for (auto& c : s) c = max_speed * random_rational(rng, 1, 5);
  } while (s[0] * s[0] + s[1] * s[1] + s[2] * s[2] >= max_speed * max_speed);
  const Vec4Q w = unit_timelike_from(s);
  Vec4Q u;
  for (int m = 0; m < 4; ++m) {
    u[m] = 0;
    for (int a = 0; a < 4; ++a) u[m] += frame.frame_inverse[m][a] * w[a];
  }
  return u;
}

Vec4Q lower_index(const LorentzFrame& frame, const Vec4Q& up) {
  Vec4Q d;
  for (int m = 0; m < 4; ++m) {
    d[m] = 0;
    for (int n = 0; n < 4; ++n) d[m] += frame.lower[m][n] * up[n];
  }
  return d;
}

}  // namespace lops

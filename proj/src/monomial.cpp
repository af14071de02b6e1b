#include "lops/monomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace lops {

namespace {

constexpr std::uint64_t kHigh = 0x8080808080808080ULL;
constexpr std::uint64_t kLow = 0x7f7f7f7f7f7f7f7fULL;

constexpr std::size_t word_of(AtomId atom) { return atom / 8; }
constexpr unsigned shift_of(AtomId atom) { return 8U * (7U - atom % 8U); }

int byte_sum(std::uint64_t w) {
  int s = 0;
  for (int i = 0; i < 8; ++i) s += static_cast<int>((w >> (8 * i)) & 0xffU);
  return s;
}

}  // namespace

Monomial Monomial::of(AtomId atom, int exponent) {
  Monomial m;
  m.set_exponent(atom, exponent);
  return m;
}

int Monomial::exponent(AtomId atom) const {
  const auto w = word_of(atom);
  if (w >= words_.size()) return 0;
  return static_cast<int>((words_[w] >> shift_of(atom)) & 0xffU);
}

void Monomial::set_exponent(AtomId atom, int exponent) {
  if (exponent < 0 || exponent > kMaxExponent) throw std::overflow_error("monomial exponent out of range 0..127");
  const auto w = word_of(atom);
  if (w >= words_.size()) {
    if (exponent == 0) return;
    words_.resize(w + 1, 0);
  }
  const auto sh = shift_of(atom);
  words_[w] = (words_[w] & ~(std::uint64_t{0xff} << sh)) | (static_cast<std::uint64_t>(exponent) << sh);
  trim();
}

int Monomial::total_degree() const {
  int d = 0;
  for (auto w : words_) d += byte_sum(w);
  return d;
}

int Monomial::xi_degree() const {
  if (words_.empty()) return 0;
  return byte_sum(words_[0] >> 32);
}

int Monomial::degree_in(std::span<const AtomId> atoms) const {
  int d = 0;
  for (auto a : atoms) d += exponent(a);
  return d;
}

Monomial Monomial::operator*(const Monomial& other) const {
  const Monomial& longer = words_.size() >= other.words_.size() ? *this : other;
  const Monomial& shorter = words_.size() >= other.words_.size() ? other : *this;
  Monomial r = longer;
  for (std::size_t i = 0; i < shorter.words_.size(); ++i) {
    const auto s = r.words_[i] + shorter.words_[i];
    if (s & kHigh) throw std::overflow_error("monomial exponent exceeds 127");
    r.words_[i] = s;
  }
  return r;
}

bool Monomial::divisible_by(const Monomial& other) const {
  if (other.words_.size() > words_.size()) return false;
  for (std::size_t i = 0; i < other.words_.size(); ++i) {
    if ((((words_[i] | kHigh) - other.words_[i]) & kHigh) != kHigh) return false;
  }
  return true;
}

std::optional<Monomial> Monomial::divided_by(const Monomial& other) const {
  if (!divisible_by(other)) return std::nullopt;
  Monomial r = *this;
  for (std::size_t i = 0; i < other.words_.size(); ++i) r.words_[i] = ((r.words_[i] | kHigh) - other.words_[i]) & kLow;
  r.trim();
  return r;
}

Monomial Monomial::gcd(const Monomial& other) const {
  Monomial r;
  const auto n = std::min(words_.size(), other.words_.size());
  r.words_.resize(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t w = 0;
    for (unsigned b = 0; b < 8; ++b) {
      const auto x = (words_[i] >> (8 * b)) & 0xffU;
      const auto y = (other.words_[i] >> (8 * b)) & 0xffU;
      w |= std::min(x, y) << (8 * b);
    }
    r.words_[i] = w;
  }
  r.trim();
  return r;
}

Monomial Monomial::without(AtomId atom) const {
  Monomial r = *this;
  if (word_of(atom) < r.words_.size()) r.set_exponent(atom, 0);
  return r;
}

void Monomial::for_each(const std::function<void(AtomId, int)>& fn) const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] == 0) continue;
    for (unsigned b = 0; b < 8; ++b) {
      const auto e = static_cast<int>((words_[w] >> (8U * (7U - b))) & 0xffU);
      if (e != 0) fn(static_cast<AtomId>(w * 8 + b), e);
    }
  }
}

std::strong_ordering Monomial::operator<=>(const Monomial& other) const {
  const auto n = std::max(words_.size(), other.words_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = i < words_.size() ? words_[i] : 0;
    const auto b = i < other.words_.size() ? other.words_[i] : 0;
    if (a != b) return a <=> b;
  }
  return std::strong_ordering::equal;
}

std::size_t Monomial::hash() const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (auto w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 33));
}

void Monomial::trim() {
  while (!words_.empty() && words_.back() == 0) words_.pop_back();
}

}  // namespace lops

#pragma once
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <string>

namespace rw {

// Generators for holomorphic dimension n <= NMAX:
//   even: x^1..x^n, xb^1..xb^n (base), y^1..y^n (fiber)
//   odd:  dx^1..dx^n (bits 0..n-1), dxb^1..dxb^n (bits NMAX..NMAX+n-1)
inline constexpr int NMAX = 4;

enum class Var : uint8_t { X, XB, Y };

struct Mono {
  std::array<uint8_t, NMAX> x{}, xb{}, y{};
  uint16_t odd = 0;

  int base_order() const {
    int s = 0;
    for (int i = 0; i < NMAX; ++i) s += x[i] + xb[i];
    return s;
  }
  int fiber_order() const {
    int s = 0;
    for (int i = 0; i < NMAX; ++i) s += y[i];
    return s;
  }
  int even_order() const { return base_order() + fiber_order(); }
  int form_degree() const { return std::popcount(odd); }
  int form_degree_dx() const { return std::popcount(uint16_t(odd & ((1u << NMAX) - 1))); }
  int form_degree_dxb() const { return std::popcount(uint16_t(odd >> NMAX)); }
  bool is_unit() const { return even_order() == 0 && odd == 0; }

  friend bool operator==(const Mono&, const Mono&) = default;
  friend auto operator<=>(const Mono& a, const Mono& b) {
    if (auto c = a.x <=> b.x; c != 0) return c;
    if (auto c = a.xb <=> b.xb; c != 0) return c;
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.odd <=> b.odd;
  }
};

// Sign of merging two ascending odd-factor lists (Koszul): for each bit of b,
// count the bits of a strictly above it. Returns 0 if a and b share a factor.
inline int merge_odd(uint16_t a, uint16_t b, uint16_t& out) {
  if (a & b) return 0;
  out = a | b;
  int inv = 0;
  uint16_t bb = b;
  while (bb) {
    int j = std::countr_zero(bb);
    bb &= bb - 1;
    inv += std::popcount(uint16_t(a >> (j + 1)));
  }
  return (inv & 1) ? -1 : 1;
}

// Sign of inserting generator bit g at the left of an ascending list.
inline int left_insert_sign(uint16_t mask, int g) {
  return (std::popcount(uint16_t(mask & ((1u << g) - 1))) & 1) ? -1 : 1;
}

inline std::string gen_name(Var v, int i) {
  switch (v) {
    case Var::X: return "x" + std::to_string(i + 1);
    case Var::XB: return "xb" + std::to_string(i + 1);
    default: return "y" + std::to_string(i + 1);
  }
}

inline std::string odd_name(int bit) {
  if (bit < NMAX) return "dx" + std::to_string(bit + 1);
  return "dxb" + std::to_string(bit - NMAX + 1);
}

}  // namespace rw

#pragma once

#include <cstdint>

#include "errors.hpp"

namespace probelab {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  const std::uint64_t s = a + b;
  return (s >= m || s < a) ? s - m : s;
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return a >= b ? a - b : a + (m - b);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, base, m);
    base = mul_mod(base, base, m);
    e >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin; the first twelve primes as bases cover all
// 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  constexpr std::uint64_t bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t q : bases) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  unsigned r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : bases) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Smallest prime >= n.
inline std::uint64_t next_prime(std::uint64_t n) {
  if (n <= 2) return 2;
  for (std::uint64_t c = n | 1;; c += 2) {
    if (is_prime(c)) return c;
    if (c + 2 < c) throw range_error("next_prime: overflow");
  }
}

inline bool is_power_of_two(std::uint64_t x) { return x && !(x & (x - 1)); }

inline unsigned floor_log2(std::uint64_t x) {
  return x ? 63u - static_cast<unsigned>(__builtin_clzll(x)) : 0u;
}

inline unsigned ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0u : floor_log2(x - 1) + 1;
}

}  // namespace probelab

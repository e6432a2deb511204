#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gapforms/bignat.hpp"

// Deterministic integer primitives. Everything here is pure and re-entrant.
namespace gapforms::arith {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

/// Reduces a signed integer into [0, m).
inline std::uint64_t reduce(std::int64_t a, std::uint64_t m) {
  if (a >= 0) return static_cast<std::uint64_t>(a) % m;
  std::uint64_t r = static_cast<std::uint64_t>(-(a + 1)) % m;  // avoids overflow at INT64_MIN
  return m - 1 - r;
}

std::uint64_t mod_pow(std::uint64_t a, std::uint64_t e, std::uint64_t p);
std::uint64_t mod_pow(std::int64_t a, std::uint64_t e, std::uint64_t p);

/// Exact for every 64-bit input (Miller-Rabin with the first twelve prime bases).
bool is_prime(std::uint64_t n);

/// Primes in [lo, hi), ascending. Segmented Eratosthenes.
std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi);

/// floor(n^(1/s)) for s in {2,3,4}; seeded in floating point, corrected exactly.
BigNat int_root(const BigNat& n, int s);
std::uint64_t int_root(std::uint64_t n, int s);

/// Checked x^s for 64-bit values; returns false on overflow.
bool checked_pow(std::uint64_t x, int s, std::uint64_t& out);

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

/// Legendre symbol (a/p) for odd prime p: -1, 0 or 1.
int legendre(std::int64_t a, std::uint64_t p);

/// Prime factorization by trial division; intended for coefficients and p-1.
std::vector<std::pair<std::uint64_t, int>> factor_small(std::uint64_t n);

struct Congruence {
  BigNat residue;
  std::uint64_t modulus;
};
using ResidueSystem = std::vector<Congruence>;

struct CrtSolution {
  BigNat m;  // 0 <= m < M
  BigNat M;  // product of the moduli
};

/// Chinese remaindering over pairwise-coprime moduli; throws DomainError otherwise.
CrtSolution crt(const ResidueSystem& sys);

}  // namespace gapforms::arith

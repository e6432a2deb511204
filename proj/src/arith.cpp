#include "gapforms/arith.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "gapforms/error.hpp"

namespace gapforms::arith {

std::uint64_t mod_pow(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  if (p == 1) return 0;
  std::uint64_t result = 1;
  a %= p;
  while (e > 0) {
    if (e & 1) result = mul_mod(result, a, p);
    a = mul_mod(a, a, p);
    e >>= 1;
  }
  return result;
}

std::uint64_t mod_pow(std::int64_t a, std::uint64_t e, std::uint64_t p) {
  return mod_pow(reduce(a, p), e, p);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::array<std::uint64_t, 12> kBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t b : kBases) {
    if (n % b == 0) return n == b;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t b : kBases) {
    std::uint64_t x = mod_pow(b, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
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

std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  if (hi <= lo) return out;
  lo = std::max<std::uint64_t>(lo, 2);
  if (hi <= lo) return out;

  const std::uint64_t root = int_root(hi - 1, 2);
  std::vector<std::uint64_t> base;
  {
    std::vector<char> composite(root + 1, 0);
    for (std::uint64_t i = 2; i <= root; ++i) {
      if (composite[i]) continue;
      base.push_back(i);
      for (std::uint64_t j = i * i; j <= root; j += i) composite[j] = 1;
    }
  }

  constexpr std::uint64_t kSegment = 1 << 18;
  std::vector<char> mark(kSegment);
  for (std::uint64_t seg = lo; seg < hi; seg += kSegment) {
    const std::uint64_t end = std::min(hi, seg + kSegment);
    std::fill(mark.begin(), mark.end(), 0);
    for (std::uint64_t q : base) {
      if (q * q >= end) break;
      std::uint64_t start = std::max(q * q, (seg + q - 1) / q * q);
      for (std::uint64_t j = start; j < end; j += q) mark[j - seg] = 1;
    }
    for (std::uint64_t n = seg; n < end; ++n) {
      if (!mark[n - seg]) out.push_back(n);
    }
  }
  return out;
}

bool checked_pow(std::uint64_t x, int s, std::uint64_t& out) {
  unsigned __int128 acc = 1;
  for (int i = 0; i < s; ++i) {
    acc *= x;
    if (acc > UINT64_MAX) return false;
  }
  out = static_cast<std::uint64_t>(acc);
  return true;
}

std::uint64_t int_root(std::uint64_t n, int s) {
  if (s < 2 || s > 4) throw DomainError("int_root: degree must be 2, 3 or 4");
  if (n < 2) return n;
  const double d = static_cast<double>(n);
  const double seed = s == 2 ? std::sqrt(d) : s == 3 ? std::cbrt(d) : std::sqrt(std::sqrt(d));
  auto r = static_cast<std::uint64_t>(std::min(seed, 4294967295.0));
  std::uint64_t v = 0;
  while (r > 0 && (!checked_pow(r, s, v) || v > n)) --r;
  while (checked_pow(r + 1, s, v) && v <= n) ++r;
  return r;
}

BigNat int_root(const BigNat& n, int s) {
  if (s < 2 || s > 4) throw DomainError("int_root: degree must be 2, 3 or 4");
  if (n.fits_u64()) return BigNat(int_root(n.to_u64(), s));

  // Seed from the leading bits: n = top * 2^(s*shift).
  const std::size_t bits = n.bit_length();
  const std::size_t shift = (bits > 200) ? (bits - 200) / s : 0;
  mpz_class top;
  mpz_fdiv_q_2exp(top.get_mpz_t(), n.mpz().get_mpz_t(), shift * s);
  const double seed_top = std::pow(top.get_d(), 1.0 / s) * (1.0 + 1e-12) + 2.0;
  mpz_class x(seed_top);
  mpz_mul_2exp(x.get_mpz_t(), x.get_mpz_t(), shift);
  x += 1;

  // Newton from above decreases monotonically to the floor root.
  const mpz_class& target = n.mpz();
  while (true) {
    mpz_class xs1;
    mpz_pow_ui(xs1.get_mpz_t(), x.get_mpz_t(), s - 1);
    mpz_class next = ((s - 1) * x + target / xs1) / s;
    if (next >= x) break;
    x = next;
  }

  auto power = [s](const mpz_class& v) {
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), v.get_mpz_t(), s);
    return out;
  };
  while (x > 0 && power(x) > target) x -= 1;
  while (power(x + 1) <= target) x += 1;
  return BigNat(x);
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

int legendre(std::int64_t a, std::uint64_t p) {
  std::uint64_t r = mod_pow(a, (p - 1) / 2, p);
  if (r == 0) return 0;
  return r == 1 ? 1 : -1;
}

std::vector<std::pair<std::uint64_t, int>> factor_small(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, int>> out;
  if (n < 2) return out;
  for (std::uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d != 0) continue;
    int e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    out.emplace_back(d, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

CrtSolution crt(const ResidueSystem& sys) {
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (sys[i].modulus == 0) throw DomainError("crt: modulus must be positive");
    if (sys[i].residue >= BigNat(sys[i].modulus)) {
      throw DomainError("crt: residue " + sys[i].residue.to_string() + " not below its modulus " +
                        std::to_string(sys[i].modulus));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (gcd(sys[i].modulus, sys[j].modulus) != 1) {
        throw DomainError("crt: moduli " + std::to_string(sys[j].modulus) + " and " +
                          std::to_string(sys[i].modulus) + " are not coprime");
      }
    }
  }

  mpz_class m = 0;
  mpz_class M = 1;
  for (const auto& c : sys) {
    const mpz_class mod = BigNat(c.modulus).mpz();
    // m + M*t = r (mod mod)  =>  t = (r - m) * M^-1 (mod mod)
    mpz_class inv;
    if (c.modulus == 1) {
      continue;
    }
    mpz_invert(inv.get_mpz_t(), mpz_class(M % mod).get_mpz_t(), mod.get_mpz_t());
    mpz_class t = (c.residue.mpz() - m) * inv;
    mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), mod.get_mpz_t());
    m += M * t;
    M *= mod;
  }
  return {BigNat(m), BigNat(M)};
}

}  // namespace gapforms::arith
